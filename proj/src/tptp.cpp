#include <cctype>
#include <sstream>

#include "paratrap/folcheck.hpp"

namespace paratrap::fo {

using K = Formula::Kind;

namespace {

void print_term(std::ostream &out, const Term &t) {
  out << t.name;
  if (t.args.empty())
    return;
  out << '(';
  for (std::size_t k = 0; k < t.args.size(); ++k) {
    if (k)
      out << ',';
    print_term(out, t.args[k]);
  }
  out << ')';
}

void print(std::ostream &out, const Formula &f) {
  switch (f.kind) {
  case K::True:
    out << "$true";
    return;
  case K::False:
    out << "$false";
    return;
  case K::Pred:
    print_term(out, Term::fn(f.name, f.args));
    return;
  case K::Eq:
    print_term(out, f.args.at(0));
    out << " = ";
    print_term(out, f.args.at(1));
    return;
  case K::Not: {
    const auto &c = f.children.at(0);
    if (c.kind == K::Eq) {
      print_term(out, c.args.at(0));
      out << " != ";
      print_term(out, c.args.at(1));
      return;
    }
    out << "~ ";
    const bool wrap = c.kind == K::Not;
    if (wrap)
      out << '(';
    print(out, c);
    if (wrap)
      out << ')';
    return;
  }
  case K::And:
  case K::Or:
  case K::Implies:
  case K::Iff: {
    const char *op = f.kind == K::And ? " & " : f.kind == K::Or ? " | " : f.kind == K::Implies ? " => " : " <=> ";
    out << '(';
    for (std::size_t k = 0; k < f.children.size(); ++k) {
      if (k)
        out << op;
      print(out, f.children[k]);
    }
    out << ')';
    return;
  }
  case K::Forall:
  case K::Exists: {
    out << '(' << (f.kind == K::Forall ? "! [" : "? [");
    for (std::size_t k = 0; k < f.vars.size(); ++k)
      out << (k ? "," : "") << f.vars[k];
    out << "] : ";
    print(out, f.children.at(0));
    out << ')';
    return;
  }
  }
}

} // namespace

std::string to_tptp(const Formula &f) {
  std::ostringstream out;
  print(out, f);
  return out.str();
}

std::string emit_tptp(const Problem &p) {
  std::ostringstream out;
  out << "% " << p.name << "\n";
  if (!p.comment.empty())
    out << "% " << p.comment << "\n";
  for (const auto &a : p.axioms)
    out << "fof(" << a.name << ", axiom, " << to_tptp(a.formula) << ").\n";
  out << "fof(" << p.conjecture.name << ", conjecture, " << to_tptp(p.conjecture.formula) << ").\n";
  return out.str();
}

namespace {

class Parser {
public:
  explicit Parser(const std::string &text) : s_(text) {}

  Problem problem() {
    Problem p;
    bool have_conjecture = false;
    skip();
    while (pos_ < s_.size()) {
      if (!word_is("fof"))
        fail("expected fof");
      expect("(");
      const std::string name = ident();
      expect(",");
      const std::string role = ident();
      expect(",");
      Formula f = formula();
      expect(")");
      expect(".");
      if (role == "axiom") {
        p.axioms.push_back({name, std::move(f)});
      } else if (role == "conjecture") {
        if (have_conjecture)
          fail("more than one conjecture");
        p.conjecture = {name, std::move(f)};
        have_conjecture = true;
      } else {
        fail("unsupported role " + role);
      }
      skip();
    }
    if (!have_conjecture)
      fail("no conjecture");
    return p;
  }

  std::vector<std::string> leading_comments;

private:
  [[noreturn]] void fail(const std::string &msg) const {
    throw Error("TPTP parse error at offset " + std::to_string(pos_) + ": " + msg);
  }

  void skip() {
    for (;;) {
      while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
        ++pos_;
      if (pos_ < s_.size() && s_[pos_] == '%') {
        const std::size_t end = s_.find('\n', pos_);
        std::string line = s_.substr(pos_ + 1, end == std::string::npos ? std::string::npos : end - pos_ - 1);
        if (!line.empty() && line[0] == ' ')
          line.erase(0, 1);
        leading_comments.push_back(line);
        pos_ = end == std::string::npos ? s_.size() : end + 1;
        continue;
      }
      return;
    }
  }

  bool peek(const std::string &tok) {
    skip();
    return s_.compare(pos_, tok.size(), tok) == 0;
  }

  bool accept(const std::string &tok) {
    if (!peek(tok))
      return false;
    pos_ += tok.size();
    return true;
  }

  void expect(const std::string &tok) {
    if (!accept(tok))
      fail("expected '" + tok + "'");
  }

  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }

  std::string ident() {
    skip();
    const std::size_t start = pos_;
    if (pos_ < s_.size() && s_[pos_] == '$')
      ++pos_;
    while (pos_ < s_.size() && ident_char(s_[pos_]))
      ++pos_;
    if (start == pos_)
      fail("expected an identifier");
    return s_.substr(start, pos_ - start);
  }

  bool word_is(const std::string &w) {
    skip();
    if (s_.compare(pos_, w.size(), w) != 0)
      return false;
    if (pos_ + w.size() < s_.size() && ident_char(s_[pos_ + w.size()]))
      return false;
    pos_ += w.size();
    return true;
  }

  Term term() {
    const std::string name = ident();
    if (std::isupper(static_cast<unsigned char>(name[0])))
      return Term::var(name);
    Term t = Term::fn(name);
    if (accept("(")) {
      do
        t.args.push_back(term());
      while (accept(","));
      expect(")");
    }
    return t;
  }

  Formula formula() {
    Formula first = unary();
    if (peek("<=>")) {
      pos_ += 3;
      return Formula::iff(std::move(first), unary());
    }
    if (peek("=>")) {
      pos_ += 2;
      return Formula::implies(std::move(first), unary());
    }
    if (peek("&") || peek("|")) {
      const bool is_and = s_[pos_] == '&';
      std::vector<Formula> parts{std::move(first)};
      while (accept(is_and ? "&" : "|"))
        parts.push_back(unary());
      if (peek("&") || peek("|") || peek("=>") || peek("<=>"))
        fail("mixed connectives need parentheses");
      return is_and ? Formula::conj(std::move(parts)) : Formula::disj(std::move(parts));
    }
    return first;
  }

  Formula unary() {
    if (accept("(")) {
      Formula f = formula();
      expect(")");
      return f;
    }
    if (accept("~"))
      return Formula::negate(unary());
    if (peek("!") && !peek("!=")) {
      ++pos_;
      return quantifier(K::Forall);
    }
    if (accept("?"))
      return quantifier(K::Exists);
    if (word_is("$true"))
      return Formula::truth();
    if (word_is("$false"))
      return Formula::falsity();
    Term lhs = term();
    if (accept("!="))
      return Formula::neq(std::move(lhs), term());
    if (!peek("=>") && accept("="))
      return Formula::eq(std::move(lhs), term());
    if (lhs.is_var)
      fail("variable used as a formula");
    return Formula::pred(lhs.name, std::move(lhs.args));
  }

  Formula quantifier(K kind) {
    expect("[");
    std::vector<std::string> vars;
    do
      vars.push_back(ident());
    while (accept(","));
    expect("]");
    expect(":");
    Formula body = unary();
    return kind == K::Forall ? Formula::forall(std::move(vars), std::move(body))
                             : Formula::exists(std::move(vars), std::move(body));
  }

  const std::string &s_;
  std::size_t pos_ = 0;
};

} // namespace

Problem parse_tptp(const std::string &text) {
  Parser parser(text);
  Problem p = parser.problem();
  const auto &c = parser.leading_comments;
  if (!c.empty())
    p.name = c[0];
  if (c.size() > 1)
    p.comment = c[1];
  return p;
}

} // namespace paratrap::fo
