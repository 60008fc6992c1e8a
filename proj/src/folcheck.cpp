#include "paratrap/folcheck.hpp"

#include <algorithm>
#include <functional>

namespace paratrap::fo {

using K = Formula::Kind;

Formula Formula::negate(Formula f) {
  if (f.kind == K::True)
    return falsity();
  if (f.kind == K::False)
    return truth();
  if (f.kind == K::Not)
    return std::move(f.children[0]);
  Formula n;
  n.kind = K::Not;
  n.children.push_back(std::move(f));
  return n;
}

namespace {

Formula junction(K kind, std::vector<Formula> parts) {
  const K unit = kind == K::And ? K::True : K::False;
  const K absorb = kind == K::And ? K::False : K::True;
  Formula out;
  out.kind = kind;
  for (auto &p : parts) {
    if (p.kind == unit)
      continue;
    if (p.kind == absorb)
      return p;
    if (p.kind == kind)
      for (auto &c : p.children)
        out.children.push_back(std::move(c));
    else
      out.children.push_back(std::move(p));
  }
  if (out.children.empty())
    return kind == K::And ? Formula::truth() : Formula::falsity();
  if (out.children.size() == 1)
    return std::move(out.children[0]);
  return out;
}

Formula binary(K kind, Formula a, Formula b) {
  Formula out;
  out.kind = kind;
  out.children.push_back(std::move(a));
  out.children.push_back(std::move(b));
  return out;
}

Formula quantified(K kind, std::vector<std::string> vars, Formula body) {
  if (vars.empty())
    return body;
  Formula out;
  out.kind = kind;
  out.vars = std::move(vars);
  out.children.push_back(std::move(body));
  return out;
}

} // namespace

Formula Formula::conj(std::vector<Formula> parts) { return junction(K::And, std::move(parts)); }
Formula Formula::disj(std::vector<Formula> parts) { return junction(K::Or, std::move(parts)); }
Formula Formula::implies(Formula a, Formula b) {
  if (a.kind == K::True)
    return b;
  if (a.kind == K::False || b.kind == K::True)
    return truth();
  return binary(K::Implies, std::move(a), std::move(b));
}
Formula Formula::iff(Formula a, Formula b) { return binary(K::Iff, std::move(a), std::move(b)); }
Formula Formula::forall(std::vector<std::string> vars, Formula body) {
  return quantified(K::Forall, std::move(vars), std::move(body));
}
Formula Formula::exists(std::vector<std::string> vars, Formula body) {
  return quantified(K::Exists, std::move(vars), std::move(body));
}

Term zero() { return Term::fn("zero"); }
Term last() { return Term::fn("last"); }
Term succ(Term t) { return Term::fn("succ", {std::move(t)}); }
Formula leq(Term a, Term b) { return Formula::pred("leq", {std::move(a), std::move(b)}); }
Formula lt(Term a, Term b) {
  return Formula::conj({leq(a, b), Formula::neq(a, b)});
}

namespace {

std::string sanitize(const std::string &s) {
  std::string out;
  for (char ch : s) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                    (ch >= '0' && ch <= '9') || ch == '_';
    out += ok ? ch : '_';
  }
  return out;
}

std::string prime(std::string s, bool primed) { return primed ? s + "_p" : s; }

Term V(const std::string &name) { return Term::var(name); }

} // namespace

std::string loc_symbol(const ParamSystem &sys, int loc, bool primed) {
  return prime("loc_" + sanitize(sys.location_name(loc)), primed);
}

std::string var_symbol(const ParamSystem &sys, int var, int value, bool primed) {
  const auto &v = sys.vars[static_cast<std::size_t>(var)];
  return prime("x_" + sanitize(v.name) + "_" + sanitize(v.values[static_cast<std::size_t>(value)]),
               primed);
}

std::string loop_fn_symbol(const ParamSystem &sys, int t, bool primed) {
  return prime("f_" + sanitize(sys.loop_transitions[static_cast<std::size_t>(t)].name), primed);
}

std::string pointer_symbol(const ParamSystem &sys, int p, bool primed) {
  return prime("ptr_" + sanitize(sys.pointers[static_cast<std::size_t>(p)].name), primed);
}

namespace {

Formula at_loc(const ParamSystem &sys, int loc, const Term &x, bool primed) {
  return Formula::pred(loc_symbol(sys, loc, primed), {x});
}

Formula has_value(const ParamSystem &sys, int var, int value, const Term &x, bool primed) {
  return Formula::pred(var_symbol(sys, var, value, primed), {x});
}

Term loop_fn(const ParamSystem &sys, int t, const Term &x, bool primed) {
  return Term::fn(loop_fn_symbol(sys, t, primed), {x});
}

Term pointer(const ParamSystem &sys, int p, bool primed) {
  return Term::fn(pointer_symbol(sys, p, primed));
}

// Exactly one of `atoms` holds.
Formula exactly_one(const std::vector<Formula> &atoms) {
  std::vector<Formula> cases;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    std::vector<Formula> parts{atoms[k]};
    for (std::size_t o = 0; o < atoms.size(); ++o)
      if (o != k)
        parts.push_back(Formula::negate(atoms[o]));
    cases.push_back(Formula::conj(std::move(parts)));
  }
  return Formula::disj(std::move(cases));
}

} // namespace

Formula build_eta(const ParamSystem &sys, bool primed) {
  const Term i = V("I");
  std::vector<Formula> parts;
  for (std::size_t v = 0; v < sys.vars.size(); ++v) {
    std::vector<Formula> atoms;
    for (std::size_t val = 0; val < sys.vars[v].values.size(); ++val)
      atoms.push_back(has_value(sys, static_cast<int>(v), static_cast<int>(val), i, primed));
    parts.push_back(exactly_one(atoms));
  }
  std::vector<Formula> locs;
  for (int q = 0; q < sys.num_locations(); ++q)
    locs.push_back(at_loc(sys, q, i, primed));
  parts.push_back(exactly_one(locs));
  return Formula::forall({"I"}, Formula::conj(std::move(parts)));
}

Formula build_psi() {
  const Term x = V("X"), y = V("Y"), z = V("Z");
  using F = Formula;
  return F::conj({
      F::forall({"X"}, leq(x, x)),
      F::forall({"X", "Y"}, F::implies(F::conj({leq(x, y), leq(y, x)}), F::eq(x, y))),
      F::forall({"X", "Y", "Z"}, F::implies(F::conj({leq(x, y), leq(y, z)}), leq(x, z))),
      F::forall({"X", "Y"}, F::disj({leq(x, y), leq(y, x)})),
      F::forall({"X"}, leq(zero(), x)),
      F::forall({"X"}, leq(x, last())),
      F::neq(zero(), last()),
      F::forall({"X"}, F::implies(F::neq(x, last()),
                                  F::conj({lt(x, succ(x)),
                                           F::negate(F::exists({"Y"}, F::conj({lt(x, y),
                                                                               lt(y, succ(x))})))}))),
  });
}

namespace {

// Atoms saying that the configuration intersects `letter` at position `y`;
// `name_pos[n]` is the position term of name n.
Formula letter_atoms(const ParamSystem &sys, const NormalizedLayout &nl, const NormalizedLetter &a,
                     const Term &y, const std::vector<Term> &name_pos) {
  std::vector<Formula> out;
  auto each = [&](int slot, const std::function<void(int)> &fn) {
    const std::uint64_t m = a.sets.at(static_cast<std::size_t>(slot));
    for (int v = 0; v < nl.alphabet_size(slot); ++v)
      if ((m >> v) & 1u)
        fn(v);
  };
  each(nl.loc_slot(), [&](int q) { out.push_back(at_loc(sys, q, y, false)); });
  for (std::size_t var = 0; var < sys.vars.size(); ++var)
    each(nl.var_slot(static_cast<int>(var)), [&](int val) {
      out.push_back(has_value(sys, static_cast<int>(var), val, y, false));
    });
  for (int n = 0; n < nl.names(); ++n)
    for (std::size_t t = 0; t < sys.loop_transitions.size(); ++t) {
      const int ti = static_cast<int>(t);
      const Term &p = name_pos[static_cast<std::size_t>(n)];
      const Formula mark = Formula::conj(
          {at_loc(sys, sys.loop_location(ti), p, false), Formula::eq(loop_fn(sys, ti, p, false), y)});
      each(nl.loop_slot(n, ti), [&](int v) {
        out.push_back(v == kUp ? mark : Formula::negate(mark));
      });
    }
  for (std::size_t p = 0; p < sys.pointers.size(); ++p)
    each(nl.pointer_slot(static_cast<int>(p)), [&](int v) {
      const Formula here = Formula::eq(pointer(sys, static_cast<int>(p), false), y);
      out.push_back(v == kUp ? here : Formula::negate(here));
    });
  return Formula::disj(std::move(out));
}

Formula language_phi(const ParamSystem &sys, const TrapLanguage &lang) {
  const NormalizedLayout nl(sys, lang.names);
  // Literal tokens and the star (if any) in front of each and after the last.
  std::vector<std::size_t> literals;
  std::vector<const Token *> star_before; // size literals + 1
  const Token *pending = nullptr;
  for (std::size_t k = 0; k < lang.tokens.size(); ++k) {
    const auto &t = lang.tokens[k];
    if (t.star) {
      if (pending)
        throw Error("language has two stars with no letter between them");
      pending = &t;
      continue;
    }
    star_before.push_back(pending);
    pending = nullptr;
    literals.push_back(k);
  }
  star_before.push_back(pending);

  const std::size_t L = literals.size();
  std::vector<std::string> xs;
  std::vector<Term> pos;
  for (std::size_t j = 0; j < L; ++j) {
    xs.push_back("X" + std::to_string(j));
    pos.push_back(V(xs.back()));
  }
  std::vector<Term> name_pos(static_cast<std::size_t>(lang.names), zero());
  for (std::size_t j = 0; j < L; ++j) {
    const int n = lang.tokens[literals[j]].letter.index;
    if (n != kNoName)
      name_pos[static_cast<std::size_t>(n)] = pos[j];
  }

  std::vector<Formula> shape;
  if (L > 0) {
    if (!star_before[0])
      shape.push_back(Formula::eq(pos[0], zero()));
    if (!star_before[L])
      shape.push_back(Formula::eq(pos[L - 1], last()));
  }
  for (std::size_t j = 1; j < L; ++j) {
    shape.push_back(lt(pos[j - 1], pos[j]));
    if (!star_before[j])
      shape.push_back(Formula::eq(pos[j], succ(pos[j - 1])));
  }

  std::vector<Formula> cases;
  const Term y = V("Y");
  for (std::size_t j = 0; j <= L; ++j) {
    if (star_before[j]) {
      Formula atoms = letter_atoms(sys, nl, star_before[j]->letter, y, name_pos);
      if (atoms.kind != K::False) {
        std::vector<Formula> parts;
        if (j > 0)
          parts.push_back(lt(pos[j - 1], y));
        if (j < L)
          parts.push_back(lt(y, pos[j]));
        parts.push_back(std::move(atoms));
        cases.push_back(Formula::exists({"Y"}, Formula::conj(std::move(parts))));
      }
    }
    if (j < L)
      cases.push_back(letter_atoms(sys, nl, lang.tokens[literals[j]].letter, pos[j], name_pos));
  }
  return Formula::forall(xs, Formula::implies(Formula::conj(std::move(shape)),
                                              Formula::disj(std::move(cases))));
}

} // namespace

Formula build_phi(const ParamSystem &sys, const std::vector<TrapLanguage> &langs, int name_budget) {
  std::vector<Formula> parts;
  for (const auto &lang : langs) {
    if (auto err = check_language(sys, lang))
      throw Error("malformed trap language: " + *err);
    if (lang.names > name_budget)
      throw Error("trap language uses " + std::to_string(lang.names) + " names, budget is " +
                  std::to_string(name_budget));
    parts.push_back(language_phi(sys, lang));
  }
  return Formula::conj(std::move(parts));
}

namespace {

Formula guard_formula(const ParamSystem &sys, const GuardFormula &g, const Term &j, const Term &i) {
  using GK = GuardFormula::Kind;
  std::vector<Formula> parts;
  switch (g.kind) {
  case GK::True:
    return Formula::truth();
  case GK::False:
    return Formula::falsity();
  case GK::Self:
    return Formula::eq(j, i);
  case GK::Eq:
    return has_value(sys, g.var, g.value, j, false);
  case GK::Not:
    return Formula::negate(guard_formula(sys, g.children.at(0), j, i));
  case GK::And:
  case GK::Or:
    for (const auto &c : g.children)
      parts.push_back(guard_formula(sys, c, j, i));
    return g.kind == GK::And ? Formula::conj(std::move(parts)) : Formula::disj(std::move(parts));
  }
  return Formula::falsity();
}

Formula same_loc(const ParamSystem &sys, const Term &k) {
  std::vector<Formula> parts;
  for (int q = 0; q < sys.num_locations(); ++q)
    parts.push_back(Formula::iff(at_loc(sys, q, k, false), at_loc(sys, q, k, true)));
  return Formula::conj(std::move(parts));
}

Formula same_var(const ParamSystem &sys, int v, const Term &k) {
  std::vector<Formula> parts;
  for (std::size_t val = 0; val < sys.vars[static_cast<std::size_t>(v)].values.size(); ++val)
    parts.push_back(Formula::iff(has_value(sys, v, static_cast<int>(val), k, false),
                                 has_value(sys, v, static_cast<int>(val), k, true)));
  return Formula::conj(std::move(parts));
}

Formula same_vars(const ParamSystem &sys, const Term &k) {
  std::vector<Formula> parts;
  for (std::size_t v = 0; v < sys.vars.size(); ++v)
    parts.push_back(same_var(sys, static_cast<int>(v), k));
  return Formula::conj(std::move(parts));
}

// Loop functions of agent k other than `except` keep their values.
Formula same_fns(const ParamSystem &sys, const Term &k, int except = -1) {
  std::vector<Formula> parts;
  for (std::size_t t = 0; t < sys.loop_transitions.size(); ++t)
    if (static_cast<int>(t) != except)
      parts.push_back(Formula::eq(loop_fn(sys, static_cast<int>(t), k, true),
                                  loop_fn(sys, static_cast<int>(t), k, false)));
  return Formula::conj(std::move(parts));
}

Formula same_pointer(const ParamSystem &sys, int p) {
  return Formula::eq(pointer(sys, p, true), pointer(sys, p, false));
}

Formula frame_except(const ParamSystem &sys, const Term &i) {
  const Term k = V("K");
  return Formula::forall(
      {"K"}, Formula::implies(Formula::neq(k, i),
                              Formula::conj({same_loc(sys, k), same_vars(sys, k), same_fns(sys, k)})));
}

Formula local_tau(const ParamSystem &sys, int ti) {
  const auto &t = sys.local_transitions.at(static_cast<std::size_t>(ti));
  const Term i = V("I");
  std::vector<Formula> parts{at_loc(sys, t.origin, i, false), at_loc(sys, t.target, i, true)};
  if (t.pointer_guard)
    parts.push_back(has_value(sys, t.pointer_guard->var, t.pointer_guard->value,
                              pointer(sys, t.pointer_guard->pointer, false), false));
  for (std::size_t v = 0; v < sys.vars.size(); ++v) {
    const auto a = std::find_if(t.assignments.begin(), t.assignments.end(),
                                [&](const Assignment &x) { return x.var == static_cast<int>(v); });
    parts.push_back(a == t.assignments.end()
                        ? same_var(sys, static_cast<int>(v), i)
                        : has_value(sys, static_cast<int>(v), a->value, i, true));
  }
  parts.push_back(same_fns(sys, i));
  for (std::size_t p = 0; p < sys.pointers.size(); ++p)
    parts.push_back(t.set_pointer_to_self == static_cast<int>(p)
                        ? Formula::eq(pointer(sys, static_cast<int>(p), true), i)
                        : same_pointer(sys, static_cast<int>(p)));
  parts.push_back(frame_except(sys, i));
  return Formula::exists({"I"}, Formula::conj(std::move(parts)));
}

Formula loop_tau(const ParamSystem &sys, int ti) {
  const auto &t = sys.loop_transitions.at(static_cast<std::size_t>(ti));
  const int here = sys.loop_location(ti);
  const Term i = V("I");

  std::vector<Formula> start{at_loc(sys, t.origin, i, false), at_loc(sys, here, i, true),
                             Formula::eq(loop_fn(sys, ti, i, true), zero()), same_vars(sys, i),
                             same_fns(sys, i, ti)};
  for (std::size_t p = 0; p < sys.pointers.size(); ++p)
    start.push_back(same_pointer(sys, static_cast<int>(p)));

  const Term j = loop_fn(sys, ti, i, false);
  const Formula g = guard_formula(sys, t.guard, j, i);
  std::vector<Formula> step{
      at_loc(sys, here, i, false),
      same_vars(sys, i),
      same_fns(sys, i, ti),
      Formula::implies(Formula::negate(g), at_loc(sys, t.target_fail, i, true)),
      Formula::implies(Formula::conj({g, Formula::neq(j, last())}),
                       Formula::conj({at_loc(sys, here, i, true),
                                      Formula::eq(loop_fn(sys, ti, i, true), succ(j))})),
      Formula::implies(Formula::conj({g, Formula::eq(j, last())}),
                       at_loc(sys, t.target_succ, i, true)),
  };
  for (std::size_t p = 0; p < sys.pointers.size(); ++p) {
    const int pi = static_cast<int>(p);
    if (t.capture && t.capture->pointer == pi) {
      const Formula when = guard_formula(sys, t.capture->when, j, i);
      step.push_back(Formula::implies(when, Formula::eq(pointer(sys, pi, true), j)));
      step.push_back(Formula::implies(Formula::negate(when), same_pointer(sys, pi)));
    } else {
      step.push_back(same_pointer(sys, pi));
    }
  }
  return Formula::exists({"I"}, Formula::conj({Formula::disj({Formula::conj(std::move(start)),
                                                              Formula::conj(std::move(step))}),
                                               frame_except(sys, i)}));
}

} // namespace

Formula build_tau(const ParamSystem &sys, int transition, bool loop) {
  const std::size_t count = loop ? sys.loop_transitions.size() : sys.local_transitions.size();
  if (transition < 0 || static_cast<std::size_t>(transition) >= count)
    throw Error("unknown transition index " + std::to_string(transition));
  return loop ? loop_tau(sys, transition) : local_tau(sys, transition);
}

namespace {

Formula property_formula(const ParamSystem &sys, const PropertyFormula &p, bool primed, int &fresh) {
  using PK = PropertyFormula::Kind;
  std::vector<Formula> parts;
  switch (p.kind) {
  case PK::True:
    return Formula::truth();
  case PK::False:
    return Formula::falsity();
  case PK::AtLeastState:
  case PK::AtLeastVar: {
    std::vector<std::string> names;
    for (int k = 0; k < p.k; ++k)
      names.push_back("A" + std::to_string(fresh++));
    for (std::size_t a = 0; a < names.size(); ++a) {
      const Term x = V(names[a]);
      parts.push_back(p.kind == PK::AtLeastState ? at_loc(sys, p.state, x, primed)
                                                 : has_value(sys, p.var, p.value, x, primed));
      for (std::size_t b = 0; b < a; ++b)
        parts.push_back(Formula::neq(V(names[b]), x));
    }
    return Formula::exists(names, Formula::conj(std::move(parts)));
  }
  case PK::Not:
    return Formula::negate(property_formula(sys, p.children.at(0), primed, fresh));
  case PK::And:
  case PK::Or:
    for (const auto &c : p.children)
      parts.push_back(property_formula(sys, c, primed, fresh));
    return p.kind == PK::And ? Formula::conj(std::move(parts)) : Formula::disj(std::move(parts));
  case PK::Implies: {
    Formula a = property_formula(sys, p.children.at(0), primed, fresh);
    return Formula::implies(std::move(a), property_formula(sys, p.children.at(1), primed, fresh));
  }
  }
  return Formula::falsity();
}

} // namespace

Formula build_property(const ParamSystem &sys, const PropertyFormula &p, bool primed) {
  int fresh = 1;
  return property_formula(sys, p, primed, fresh);
}

Formula build_initial(const ParamSystem &sys) {
  const Term i = V("I");
  std::vector<Formula> parts{at_loc(sys, sys.initial_state, i, false)};
  for (std::size_t v = 0; v < sys.vars.size(); ++v)
    parts.push_back(has_value(sys, static_cast<int>(v), sys.vars[v].initial, i, false));
  return Formula::forall({"I"}, Formula::conj(std::move(parts)));
}

Formula build_size_floor(int n) {
  std::vector<std::string> names;
  std::vector<Formula> parts;
  for (int a = 0; a < n; ++a) {
    names.push_back("S" + std::to_string(a));
    for (int b = 0; b < a; ++b)
      parts.push_back(Formula::neq(V(names[static_cast<std::size_t>(b)]), V(names.back())));
  }
  return Formula::exists(names, Formula::conj(std::move(parts)));
}

std::vector<Problem> build_problems(const ParamSystem &sys, const std::vector<TrapLanguage> &langs,
                                    const SafetyProperty &p, const ProblemOptions &options) {
  std::vector<NamedFormula> common{{"eta", build_eta(sys, false)},
                                   {"eta_p", build_eta(sys, true)},
                                   {"psi", build_psi()}};
  for (std::size_t k = 0; k < langs.size(); ++k)
    common.push_back({"phi_" + std::to_string(k + 1), build_phi(sys, {langs[k]})});
  if (options.size_floor > 0)
    common.push_back({"size_floor", build_size_floor(options.size_floor)});

  const std::string stem = sanitize(sys.name);
  std::vector<Problem> out;
  auto add = [&](const std::string &tname, int index, bool loop) {
    Problem pr;
    pr.name = stem + "_" + sanitize(tname);
    pr.comment = "inductivity of " + p.name + " under " + tname + " with " +
                 std::to_string(langs.size()) + " trap languages";
    pr.axioms = common;
    pr.axioms.push_back({"tau_" + sanitize(tname), build_tau(sys, index, loop)});
    pr.axioms.push_back({"prop", build_property(sys, p.formula, false)});
    pr.conjecture = {"prop_p", build_property(sys, p.formula, true)};
    out.push_back(std::move(pr));
  };
  for (std::size_t t = 0; t < sys.local_transitions.size(); ++t)
    add(sys.local_transitions[t].name, static_cast<int>(t), false);
  for (std::size_t t = 0; t < sys.loop_transitions.size(); ++t)
    add(sys.loop_transitions[t].name, static_cast<int>(t), true);

  Problem init;
  init.name = stem + "_initial";
  init.comment = p.name + " holds in every initial configuration";
  init.axioms = {{"eta", build_eta(sys, false)}, {"psi", build_psi()}, {"init", build_initial(sys)}};
  if (options.size_floor > 0)
    init.axioms.push_back({"size_floor", build_size_floor(options.size_floor)});
  init.conjecture = {"prop", build_property(sys, p.formula, false)};
  out.push_back(std::move(init));
  return out;
}

Structure Structure::standard(int size) {
  if (size < 1)
    throw Error("structure size must be at least 1");
  Structure s;
  s.size = size;
  auto &le = s.preds["leq"];
  le.assign(static_cast<std::size_t>(size * size), false);
  for (int a = 0; a < size; ++a)
    for (int b = a; b < size; ++b)
      le[static_cast<std::size_t>(a * size + b)] = true;
  s.fns["zero"] = {0};
  s.fns["last"] = {size - 1};
  auto &sc = s.fns["succ"];
  for (int a = 0; a < size; ++a)
    sc.push_back(std::min(a + 1, size - 1));
  return s;
}

namespace {

struct Env {
  std::vector<std::pair<std::string, int>> bound;

  int lookup(const std::string &v) const {
    for (auto it = bound.rbegin(); it != bound.rend(); ++it)
      if (it->first == v)
        return it->second;
    throw Error("unbound variable " + v);
  }
};

std::size_t table_index(const Structure &s, const std::vector<int> &args) {
  std::size_t idx = 0;
  for (int a : args)
    idx = idx * static_cast<std::size_t>(s.size) + static_cast<std::size_t>(a);
  return idx;
}

int eval_term(const Structure &s, const Term &t, const Env &env) {
  if (t.is_var)
    return env.lookup(t.name);
  const auto it = s.fns.find(t.name);
  if (it == s.fns.end())
    throw Error("unknown function symbol " + t.name);
  std::vector<int> args;
  for (const auto &a : t.args)
    args.push_back(eval_term(s, a, env));
  return it->second.at(table_index(s, args));
}

bool eval(const Structure &s, const Formula &f, Env &env) {
  switch (f.kind) {
  case K::True:
    return true;
  case K::False:
    return false;
  case K::Pred: {
    const auto it = s.preds.find(f.name);
    if (it == s.preds.end())
      throw Error("unknown predicate symbol " + f.name);
    std::vector<int> args;
    for (const auto &a : f.args)
      args.push_back(eval_term(s, a, env));
    return it->second.at(table_index(s, args));
  }
  case K::Eq:
    return eval_term(s, f.args.at(0), env) == eval_term(s, f.args.at(1), env);
  case K::Not:
    return !eval(s, f.children.at(0), env);
  case K::And:
    for (const auto &c : f.children)
      if (!eval(s, c, env))
        return false;
    return true;
  case K::Or:
    for (const auto &c : f.children)
      if (eval(s, c, env))
        return true;
    return false;
  case K::Implies:
    return !eval(s, f.children.at(0), env) || eval(s, f.children.at(1), env);
  case K::Iff:
    return eval(s, f.children.at(0), env) == eval(s, f.children.at(1), env);
  case K::Forall:
  case K::Exists: {
    const bool want = f.kind == K::Exists;
    const std::size_t base = env.bound.size();
    for (const auto &v : f.vars)
      env.bound.emplace_back(v, 0);
    // Odometer over all assignments of the bound variables.
    bool result = !want;
    for (;;) {
      if (eval(s, f.children.at(0), env) == want) {
        result = want;
        break;
      }
      std::size_t k = env.bound.size();
      while (k > base && ++env.bound[k - 1].second == s.size)
        env.bound[--k].second = 0;
      if (k == base)
        break;
    }
    env.bound.resize(base);
    return result;
  }
  }
  return false;
}

void encode_into(Structure &s, const ParamSystem &sys, const Configuration &c, bool primed) {
  const Layout l(sys, c.length());
  const int n = l.size();
  for (int q = 0; q < sys.num_locations(); ++q) {
    auto &tab = s.preds[loc_symbol(sys, q, primed)];
    tab.assign(static_cast<std::size_t>(n), false);
    for (int a = 0; a < n; ++a)
      tab[static_cast<std::size_t>(a)] = c.at(a, l.loc_slot()) == q;
  }
  for (int v = 0; v < l.num_vars(); ++v)
    for (std::size_t val = 0; val < sys.vars[static_cast<std::size_t>(v)].values.size(); ++val) {
      auto &tab = s.preds[var_symbol(sys, v, static_cast<int>(val), primed)];
      tab.assign(static_cast<std::size_t>(n), false);
      for (int a = 0; a < n; ++a)
        tab[static_cast<std::size_t>(a)] = c.at(a, l.var_slot(v)) == static_cast<int>(val);
    }
  for (int t = 0; t < l.num_loops(); ++t) {
    auto &tab = s.fns[loop_fn_symbol(sys, t, primed)];
    tab.assign(static_cast<std::size_t>(n), 0);
    for (int a = 0; a < n; ++a)
      for (int h = 0; h < n; ++h)
        if (c.at(h, l.loop_slot(a, t)) == kUp)
          tab[static_cast<std::size_t>(a)] = h;
  }
  for (int p = 0; p < l.num_pointers(); ++p) {
    int holder = 0;
    for (int h = 0; h < n; ++h)
      if (c.at(h, l.pointer_slot(p)) == kUp)
        holder = h;
    s.fns[pointer_symbol(sys, p, primed)] = {holder};
  }
}

} // namespace

bool evaluate(const Structure &s, const Formula &f) {
  Env env;
  return eval(s, f, env);
}

Structure encode(const ParamSystem &sys, const Configuration &c, const Configuration *next) {
  Structure s = Structure::standard(c.length());
  encode_into(s, sys, c, false);
  if (next) {
    if (next->length() != c.length())
      throw Error("configurations of different sizes");
    encode_into(s, sys, *next, true);
  }
  return s;
}

} // namespace paratrap::fo
