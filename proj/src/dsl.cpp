// Line-oriented `.psys` front end:
//
//   system <name>
//   states: <id>+
//   init: <id>
//   var <id> : { <id>+ } = <id>
//   pointer <id>
//   local [<name> :] <state> -> <state> { (<var> := <val>)* } [when <ptr>.<var> == <val>] [set <ptr> := self]
//   looptrans <name> : <state> [ <guard> ] ? <state> : <state> [capture <ptr> when <guard>]
//   property <name> : <expr>
//
// Comments start with '#'. Declarations (system/states/init/var/pointer) are
// resolved before transitions and properties, so their order is free.

#include "paratrap/model.hpp"

#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace paratrap {
namespace {

struct Token {
  enum class Kind { Ident, Number, Symbol, End };
  Kind kind = Kind::End;
  std::string text;
  int line = 0;
  int column = 0;
};

std::vector<Token> tokenize(std::string_view line, int line_no) {
  static const char *const kLong[] = {":=", "->", "==", "!=", "&&", "||"};
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (c == '#')
      break;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Token tok;
    tok.line = line_no;
    tok.column = static_cast<int>(i) + 1;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < line.size() &&
             (std::isalnum(static_cast<unsigned char>(line[j])) || line[j] == '_'))
        ++j;
      tok.kind = Token::Kind::Ident;
      tok.text = std::string(line.substr(i, j - i));
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j])))
        ++j;
      tok.kind = Token::Kind::Number;
      tok.text = std::string(line.substr(i, j - i));
      i = j;
    } else {
      tok.kind = Token::Kind::Symbol;
      bool matched = false;
      for (const char *sym : kLong) {
        if (line.substr(i, 2) == sym) {
          tok.text = sym;
          i += 2;
          matched = true;
          break;
        }
      }
      if (!matched) {
        if (std::string_view(":{}[]()?=!&|,.").find(c) == std::string_view::npos)
          throw ModelError(std::string("unexpected character '") + c + "'", line_no,
                           static_cast<int>(i) + 1);
        tok.text = std::string(1, c);
        ++i;
      }
    }
    out.push_back(std::move(tok));
  }
  Token end;
  end.line = line_no;
  end.column = static_cast<int>(line.size()) + 1;
  out.push_back(end);
  return out;
}

class Cursor {
public:
  explicit Cursor(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  const Token &peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  bool at_end() const { return peek().kind == Token::Kind::End; }
  bool is(std::string_view sym) const {
    return peek().kind != Token::Kind::End && peek().text == sym;
  }
  bool accept(std::string_view sym) {
    if (!is(sym))
      return false;
    ++pos_;
    return true;
  }
  const Token &next() {
    const Token &t = peek();
    if (pos_ < tokens_.size() - 1)
      ++pos_;
    return t;
  }
  void expect(std::string_view sym) {
    if (!accept(sym))
      fail("expected '" + std::string(sym) + "'");
  }
  const Token &ident(const std::string &what) {
    if (peek().kind != Token::Kind::Ident)
      fail("expected " + what);
    return next();
  }
  int number(const std::string &what) {
    if (peek().kind != Token::Kind::Number)
      fail("expected " + what);
    return std::stoi(next().text);
  }
  void expect_end() {
    if (!at_end())
      fail("unexpected '" + peek().text + "'");
  }
  [[noreturn]] void fail(const std::string &msg) const {
    const Token &t = peek();
    const std::string found = t.kind == Token::Kind::End ? "end of line" : "'" + t.text + "'";
    throw ModelError(msg + " (found " + found + ")", t.line, t.column);
  }

private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

[[noreturn]] void fail_at(const Token &t, const std::string &msg) {
  throw ModelError(msg, t.line, t.column);
}

class Resolver {
public:
  explicit Resolver(const ParamSystem &sys) : sys_(sys) {}

  int state(const Token &t) const {
    if (auto s = sys_.find_state(t.text))
      return *s;
    fail_at(t, "undeclared state '" + t.text + "'");
  }
  int var(const Token &t) const {
    if (auto v = sys_.find_var(t.text))
      return *v;
    fail_at(t, "undeclared variable '" + t.text + "'");
  }
  int value(int var, const Token &t) const {
    if (auto v = sys_.find_value(var, t.text))
      return *v;
    fail_at(t, "'" + t.text + "' is not a value of variable '" +
                   sys_.vars[static_cast<std::size_t>(var)].name + "'");
  }
  int pointer(const Token &t) const {
    if (auto p = sys_.find_pointer(t.text))
      return *p;
    fail_at(t, "undeclared pointer '" + t.text + "'");
  }

  GuardFormula guard_or(Cursor &c) const {
    std::vector<GuardFormula> parts{guard_and(c)};
    while (c.accept("|") || c.accept("||"))
      parts.push_back(guard_and(c));
    return GuardFormula::disj(std::move(parts));
  }

  GuardFormula guard_and(Cursor &c) const {
    std::vector<GuardFormula> parts{guard_unary(c)};
    while (c.accept("&") || c.accept("&&"))
      parts.push_back(guard_unary(c));
    return GuardFormula::conj(std::move(parts));
  }

  GuardFormula guard_unary(Cursor &c) const {
    if (c.accept("!"))
      return GuardFormula::negate(guard_unary(c));
    if (c.accept("(")) {
      GuardFormula g = guard_or(c);
      c.expect(")");
      return g;
    }
    const Token &id = c.ident("guard atom");
    if (id.text == "self")
      return GuardFormula::self();
    if (id.text == "true" && !c.is("=") && !c.is("==") && !c.is("!="))
      return GuardFormula::truth();
    if (id.text == "false" && !c.is("=") && !c.is("==") && !c.is("!="))
      return GuardFormula::falsity();
    const int v = var(id);
    bool negated = false;
    if (c.accept("!="))
      negated = true;
    else if (!c.accept("==") && !c.accept("="))
      c.fail("expected '=' after variable");
    const int val = value(v, c.ident("value"));
    GuardFormula atom = GuardFormula::eq(v, val);
    return negated ? GuardFormula::negate(std::move(atom)) : atom;
  }

  PropertyFormula prop_implies(Cursor &c) const {
    PropertyFormula lhs = prop_or(c);
    if (c.accept("->"))
      return PropertyFormula::implies(std::move(lhs), prop_implies(c));
    return lhs;
  }

  PropertyFormula prop_or(Cursor &c) const {
    std::vector<PropertyFormula> parts{prop_and(c)};
    while (c.accept("|") || c.accept("||"))
      parts.push_back(prop_and(c));
    return PropertyFormula::disj(std::move(parts));
  }

  PropertyFormula prop_and(Cursor &c) const {
    std::vector<PropertyFormula> parts{prop_unary(c)};
    while (c.accept("&") || c.accept("&&"))
      parts.push_back(prop_unary(c));
    return PropertyFormula::conj(std::move(parts));
  }

  PropertyFormula prop_unary(Cursor &c) const {
    if (c.accept("!"))
      return PropertyFormula::negate(prop_unary(c));
    if (c.accept("(")) {
      PropertyFormula p = prop_implies(c);
      c.expect(")");
      return p;
    }
    const Token &id = c.ident("property atom");
    if (id.text == "true") {
      PropertyFormula p;
      p.kind = PropertyFormula::Kind::True;
      return p;
    }
    if (id.text == "false") {
      PropertyFormula p;
      p.kind = PropertyFormula::Kind::False;
      return p;
    }
    if (id.text != "atLeast")
      fail_at(id, "expected atLeast(k, ...), got '" + id.text + "'");
    c.expect("(");
    const Token &num_tok = c.peek();
    const int k = c.number("count");
    if (k < 1)
      fail_at(num_tok, "atLeast count must be at least 1");
    c.expect(",");
    const Token &lhs = c.ident("'state' or variable");
    if (!c.accept("==") && !c.accept("="))
      c.fail("expected '='");
    const Token &rhs = c.ident("value");
    c.expect(")");
    if (lhs.text == "state" && !sys_.find_var("state"))
      return PropertyFormula::at_least_state(k, state(rhs));
    const int v = var(lhs);
    return PropertyFormula::at_least_var(k, v, value(v, rhs));
  }

private:
  const ParamSystem &sys_;
};

struct Line {
  int number;
  std::vector<Token> tokens;
};

} // namespace

ParamSystem parse_system(std::string_view text) {
  std::vector<Line> lines;
  {
    int no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos)
        end = text.size();
      ++no;
      std::string_view raw = text.substr(start, end - start);
      if (!raw.empty() && raw.back() == '\r')
        raw.remove_suffix(1);
      auto toks = tokenize(raw, no);
      if (toks.size() > 1)
        lines.push_back({no, std::move(toks)});
      start = end + 1;
    }
  }

  ParamSystem sys;
  bool have_name = false, have_states = false, have_init = false;
  std::optional<Token> init_tok;
  std::vector<std::pair<VariableDecl, Token>> pending_vars;
  std::vector<std::pair<Token, Token>> pending_initial_values; // (var, value)

  // Declarations.
  for (const Line &line : lines) {
    Cursor c(line.tokens);
    const Token &kw = c.ident("keyword");
    if (kw.text == "system") {
      if (have_name)
        fail_at(kw, "duplicate 'system' line");
      sys.name = c.ident("system name").text;
      c.expect_end();
      have_name = true;
    } else if (kw.text == "states") {
      if (have_states)
        fail_at(kw, "duplicate 'states' line");
      c.expect(":");
      std::set<std::string> seen;
      while (!c.at_end()) {
        const Token &s = c.ident("state name");
        if (!seen.insert(s.text).second)
          fail_at(s, "duplicate state '" + s.text + "'");
        sys.states.push_back(s.text);
      }
      if (sys.states.empty())
        c.fail("expected at least one state");
      have_states = true;
    } else if (kw.text == "init") {
      if (have_init)
        fail_at(kw, "duplicate 'init' line");
      c.expect(":");
      init_tok = c.ident("initial state");
      c.expect_end();
      have_init = true;
    } else if (kw.text == "var") {
      const Token &name = c.ident("variable name");
      if (sys.find_var(name.text))
        fail_at(name, "duplicate variable '" + name.text + "'");
      c.expect(":");
      c.expect("{");
      VariableDecl decl;
      decl.name = name.text;
      std::set<std::string> seen;
      while (!c.accept("}")) {
        c.accept(",");
        if (c.accept("}"))
          break;
        const Token &v = c.ident("value");
        if (!seen.insert(v.text).second)
          fail_at(v, "duplicate value '" + v.text + "'");
        decl.values.push_back(v.text);
      }
      if (decl.values.empty())
        fail_at(name, "variable '" + name.text + "' has no values");
      c.expect("=");
      const Token &init = c.ident("initial value");
      c.expect_end();
      auto idx = std::find(decl.values.begin(), decl.values.end(), init.text);
      if (idx == decl.values.end())
        fail_at(init, "initial value '" + init.text + "' is not a value of '" + name.text + "'");
      decl.initial = static_cast<int>(idx - decl.values.begin());
      sys.vars.push_back(std::move(decl));
    } else if (kw.text == "pointer") {
      const Token &name = c.ident("pointer name");
      if (sys.find_pointer(name.text))
        fail_at(name, "duplicate pointer '" + name.text + "'");
      c.expect_end();
      sys.pointers.push_back({name.text});
    } else if (kw.text != "local" && kw.text != "looptrans" && kw.text != "property") {
      fail_at(kw, "unknown keyword '" + kw.text + "'");
    }
  }
  if (!have_name)
    throw ModelError("missing 'system' line");
  if (!have_states)
    throw ModelError("missing 'states' line");
  if (!have_init)
    throw ModelError("missing 'init' line");
  {
    Resolver r(sys);
    sys.initial_state = r.state(*init_tok);
  }

  // Generated local names must not collide with loop names declared later.
  std::set<std::string> names;
  std::set<std::string> reserved;
  std::map<std::string, int> auto_names;
  for (const Line &line : lines)
    if (line.tokens[0].text == "looptrans" && line.tokens[1].kind == Token::Kind::Ident)
      reserved.insert(line.tokens[1].text);
  Resolver r(sys);
  for (const Line &line : lines) {
    Cursor c(line.tokens);
    const Token &kw = c.ident("keyword");
    if (kw.text == "local") {
      LocalTransition t;
      std::optional<Token> explicit_name;
      if (c.peek(1).kind == Token::Kind::Symbol && c.peek(1).text == ":") {
        explicit_name = c.ident("transition name");
        c.expect(":");
      }
      t.origin = r.state(c.ident("origin state"));
      c.expect("->");
      t.target = r.state(c.ident("target state"));
      c.expect("{");
      std::set<int> assigned;
      while (!c.accept("}")) {
        c.accept(",");
        if (c.accept("}"))
          break;
        const Token &v = c.ident("variable");
        const int var = r.var(v);
        c.expect(":=");
        const int val = r.value(var, c.ident("value"));
        if (!assigned.insert(var).second)
          fail_at(v, "variable '" + v.text + "' assigned twice");
        t.assignments.push_back({var, val});
      }
      if (c.accept("when")) {
        PointerGuard pg;
        pg.pointer = r.pointer(c.ident("pointer"));
        c.expect(".");
        pg.var = r.var(c.ident("variable"));
        if (!c.accept("==") && !c.accept("="))
          c.fail("expected '=='");
        pg.value = r.value(pg.var, c.ident("value"));
        t.pointer_guard = pg;
      }
      if (c.accept("set")) {
        const int p = r.pointer(c.ident("pointer"));
        c.expect(":=");
        const Token &self = c.ident("'self'");
        if (self.text != "self")
          fail_at(self, "only 'self' can be assigned to a pointer");
        t.set_pointer_to_self = p;
      }
      c.expect_end();
      if (explicit_name) {
        t.name = explicit_name->text;
        if (!names.insert(t.name).second)
          fail_at(*explicit_name, "duplicate transition name '" + t.name + "'");
      } else {
        std::string base = sys.states[static_cast<std::size_t>(t.origin)] + "_" +
                           sys.states[static_cast<std::size_t>(t.target)];
        std::string candidate = base;
        int &counter = auto_names[base];
        while (names.count(candidate) || reserved.count(candidate))
          candidate = base + "_" + std::to_string(++counter + 1);
        t.name = candidate;
        names.insert(t.name);
      }
      sys.local_transitions.push_back(std::move(t));
    } else if (kw.text == "looptrans") {
      LoopTransition t;
      const Token &name = c.ident("loop transition name");
      t.name = name.text;
      if (!names.insert(t.name).second)
        fail_at(name, "duplicate transition name '" + t.name + "'");
      if (sys.find_state(t.name))
        fail_at(name, "loop transition '" + t.name + "' clashes with a state name");
      c.expect(":");
      t.origin = r.state(c.ident("origin state"));
      c.expect("[");
      t.guard = r.guard_or(c);
      c.expect("]");
      c.expect("?");
      t.target_succ = r.state(c.ident("success state"));
      c.expect(":");
      t.target_fail = r.state(c.ident("failure state"));
      if (c.accept("capture")) {
        Capture cap;
        cap.pointer = r.pointer(c.ident("pointer"));
        const Token &when = c.ident("'when'");
        if (when.text != "when")
          fail_at(when, "expected 'when'");
        cap.when = r.guard_or(c);
        t.capture = std::move(cap);
      }
      c.expect_end();
      sys.loop_transitions.push_back(std::move(t));
    } else if (kw.text == "property") {
      SafetyProperty p;
      const Token &name = c.ident("property name");
      p.name = name.text;
      for (const auto &q : sys.properties)
        if (q.name == p.name)
          fail_at(name, "duplicate property '" + p.name + "'");
      c.expect(":");
      p.formula = r.prop_implies(c);
      c.expect_end();
      sys.properties.push_back(std::move(p));
    }
  }

  sys.validate();
  return sys;
}

namespace {

bool guard_is_compound(const GuardFormula &g) {
  return g.kind == GuardFormula::Kind::And || g.kind == GuardFormula::Kind::Or;
}

void print_guard(std::ostream &os, const ParamSystem &sys, const GuardFormula &g) {
  using K = GuardFormula::Kind;
  switch (g.kind) {
  case K::True:
    os << "true";
    return;
  case K::False:
    os << "false";
    return;
  case K::Self:
    os << "self";
    return;
  case K::Eq: {
    const auto &v = sys.vars.at(static_cast<std::size_t>(g.var));
    os << v.name << " = " << v.values.at(static_cast<std::size_t>(g.value));
    return;
  }
  case K::Not: {
    const auto &c = g.children.at(0);
    const bool paren = c.kind != K::Self && c.kind != K::True && c.kind != K::False;
    os << "!";
    if (paren)
      os << "(";
    print_guard(os, sys, c);
    if (paren)
      os << ")";
    return;
  }
  case K::And:
  case K::Or: {
    const char *sep = g.kind == K::And ? " & " : " | ";
    for (std::size_t i = 0; i < g.children.size(); ++i) {
      if (i)
        os << sep;
      const bool paren = guard_is_compound(g.children[i]);
      if (paren)
        os << "(";
      print_guard(os, sys, g.children[i]);
      if (paren)
        os << ")";
    }
    return;
  }
  }
}

bool prop_is_compound(const PropertyFormula &p) {
  using K = PropertyFormula::Kind;
  return p.kind == K::And || p.kind == K::Or || p.kind == K::Implies;
}

void print_property(std::ostream &os, const ParamSystem &sys, const PropertyFormula &p) {
  using K = PropertyFormula::Kind;
  auto child = [&](const PropertyFormula &c) {
    const bool paren = prop_is_compound(c);
    if (paren)
      os << "(";
    print_property(os, sys, c);
    if (paren)
      os << ")";
  };
  switch (p.kind) {
  case K::True:
    os << "true";
    return;
  case K::False:
    os << "false";
    return;
  case K::AtLeastState:
    os << "atLeast(" << p.k << ", state=" << sys.states.at(static_cast<std::size_t>(p.state))
       << ")";
    return;
  case K::AtLeastVar: {
    const auto &v = sys.vars.at(static_cast<std::size_t>(p.var));
    os << "atLeast(" << p.k << ", " << v.name << "=" << v.values.at(static_cast<std::size_t>(p.value))
       << ")";
    return;
  }
  case K::Not:
    os << "!";
    child(p.children.at(0));
    return;
  case K::And:
  case K::Or: {
    const char *sep = p.kind == K::And ? " & " : " | ";
    for (std::size_t i = 0; i < p.children.size(); ++i) {
      if (i)
        os << sep;
      child(p.children[i]);
    }
    return;
  }
  case K::Implies:
    child(p.children.at(0));
    os << " -> ";
    child(p.children.at(1));
    return;
  }
}

} // namespace

std::string format_guard(const ParamSystem &sys, const GuardFormula &g) {
  std::ostringstream os;
  print_guard(os, sys, g);
  return os.str();
}

std::string format_property(const ParamSystem &sys, const PropertyFormula &p) {
  std::ostringstream os;
  print_property(os, sys, p);
  return os.str();
}

std::string pretty_print(const ParamSystem &sys) {
  std::ostringstream os;
  os << "system " << sys.name << "\n";
  os << "states:";
  for (const auto &s : sys.states)
    os << " " << s;
  os << "\n";
  os << "init: " << sys.states.at(static_cast<std::size_t>(sys.initial_state)) << "\n";
  for (const auto &v : sys.vars) {
    os << "var " << v.name << " : {";
    for (const auto &val : v.values)
      os << " " << val;
    os << " } = " << v.values.at(static_cast<std::size_t>(v.initial)) << "\n";
  }
  for (const auto &p : sys.pointers)
    os << "pointer " << p.name << "\n";
  auto state = [&](int s) -> const std::string & { return sys.states.at(static_cast<std::size_t>(s)); };
  for (const auto &t : sys.local_transitions) {
    os << "local " << t.name << " : " << state(t.origin) << " -> " << state(t.target) << " {";
    for (std::size_t i = 0; i < t.assignments.size(); ++i) {
      const auto &a = t.assignments[i];
      const auto &v = sys.vars.at(static_cast<std::size_t>(a.var));
      os << (i ? ", " : " ") << v.name << " := " << v.values.at(static_cast<std::size_t>(a.value));
    }
    os << " }";
    if (t.pointer_guard) {
      const auto &pg = *t.pointer_guard;
      const auto &v = sys.vars.at(static_cast<std::size_t>(pg.var));
      os << " when " << sys.pointers.at(static_cast<std::size_t>(pg.pointer)).name << "." << v.name
         << " == " << v.values.at(static_cast<std::size_t>(pg.value));
    }
    if (t.set_pointer_to_self)
      os << " set " << sys.pointers.at(static_cast<std::size_t>(*t.set_pointer_to_self)).name
         << " := self";
    os << "\n";
  }
  for (const auto &t : sys.loop_transitions) {
    os << "looptrans " << t.name << " : " << state(t.origin) << " [ " << format_guard(sys, t.guard)
       << " ] ? " << state(t.target_succ) << " : " << state(t.target_fail);
    if (t.capture)
      os << " capture " << sys.pointers.at(static_cast<std::size_t>(t.capture->pointer)).name
         << " when " << format_guard(sys, t.capture->when);
    os << "\n";
  }
  for (const auto &p : sys.properties)
    os << "property " << p.name << " : " << format_property(sys, p.formula) << "\n";
  return os.str();
}

} // namespace paratrap
