#include "paratrap/model.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace paratrap {

ModelError::ModelError(const std::string &message, int line, int column)
    : Error(line > 0 ? std::to_string(line) + ":" + std::to_string(column) +
                           ": " + message
                     : message),
      line_(line), column_(column) {}

GuardFormula GuardFormula::negate(GuardFormula g) {
  GuardFormula n{Kind::Not, -1, -1, {}};
  n.children.push_back(std::move(g));
  return n;
}

GuardFormula GuardFormula::conj(std::vector<GuardFormula> parts) {
  if (parts.size() == 1)
    return std::move(parts.front());
  return {Kind::And, -1, -1, std::move(parts)};
}

GuardFormula GuardFormula::disj(std::vector<GuardFormula> parts) {
  if (parts.size() == 1)
    return std::move(parts.front());
  return {Kind::Or, -1, -1, std::move(parts)};
}

bool eval_guard(const GuardFormula &g, const std::vector<int> &valuation,
                bool self_flag) {
  using K = GuardFormula::Kind;
  switch (g.kind) {
  case K::True:
    return true;
  case K::False:
    return false;
  case K::Self:
    return self_flag;
  case K::Eq:
    return valuation.at(static_cast<std::size_t>(g.var)) == g.value;
  case K::Not:
    return !eval_guard(g.children.at(0), valuation, self_flag);
  case K::And:
    return std::all_of(g.children.begin(), g.children.end(), [&](const auto &c) {
      return eval_guard(c, valuation, self_flag);
    });
  case K::Or:
    return std::any_of(g.children.begin(), g.children.end(), [&](const auto &c) {
      return eval_guard(c, valuation, self_flag);
    });
  }
  return false;
}

namespace {

void collect_vars(const GuardFormula &g, std::set<int> &out) {
  if (g.kind == GuardFormula::Kind::Eq)
    out.insert(g.var);
  for (const auto &c : g.children)
    collect_vars(c, out);
}

} // namespace

std::vector<int> guard_variables(const GuardFormula &g) {
  std::set<int> vars;
  collect_vars(g, vars);
  return {vars.begin(), vars.end()};
}

PropertyFormula PropertyFormula::at_least_state(int k, int state) {
  PropertyFormula p;
  p.kind = Kind::AtLeastState;
  p.k = k;
  p.state = state;
  return p;
}

PropertyFormula PropertyFormula::at_least_var(int k, int var, int value) {
  PropertyFormula p;
  p.kind = Kind::AtLeastVar;
  p.k = k;
  p.var = var;
  p.value = value;
  return p;
}

PropertyFormula PropertyFormula::negate(PropertyFormula p) {
  PropertyFormula n;
  n.kind = Kind::Not;
  n.children.push_back(std::move(p));
  return n;
}

PropertyFormula PropertyFormula::conj(std::vector<PropertyFormula> parts) {
  if (parts.size() == 1)
    return std::move(parts.front());
  PropertyFormula n;
  n.kind = Kind::And;
  n.children = std::move(parts);
  return n;
}

PropertyFormula PropertyFormula::disj(std::vector<PropertyFormula> parts) {
  if (parts.size() == 1)
    return std::move(parts.front());
  PropertyFormula n;
  n.kind = Kind::Or;
  n.children = std::move(parts);
  return n;
}

PropertyFormula PropertyFormula::implies(PropertyFormula lhs, PropertyFormula rhs) {
  PropertyFormula n;
  n.kind = Kind::Implies;
  n.children.push_back(std::move(lhs));
  n.children.push_back(std::move(rhs));
  return n;
}

std::string ParamSystem::location_name(int loc) const {
  if (loc >= 0 && loc < num_states())
    return states[static_cast<std::size_t>(loc)];
  const int t = loc - num_states();
  if (t >= 0 && t < static_cast<int>(loop_transitions.size()))
    return loop_transitions[static_cast<std::size_t>(t)].name;
  throw Error("location index out of range: " + std::to_string(loc));
}

namespace {

template <class Range, class Proj>
std::optional<int> find_by_name(const Range &range, std::string_view name, Proj proj) {
  for (std::size_t i = 0; i < range.size(); ++i)
    if (proj(range[i]) == name)
      return static_cast<int>(i);
  return std::nullopt;
}

} // namespace

std::optional<int> ParamSystem::find_state(std::string_view n) const {
  return find_by_name(states, n, [](const std::string &s) -> const std::string & { return s; });
}

std::optional<int> ParamSystem::find_var(std::string_view n) const {
  return find_by_name(vars, n, [](const VariableDecl &v) -> const std::string & { return v.name; });
}

std::optional<int> ParamSystem::find_value(int var, std::string_view value) const {
  if (var < 0 || var >= static_cast<int>(vars.size()))
    return std::nullopt;
  return find_by_name(vars[static_cast<std::size_t>(var)].values, value,
                      [](const std::string &s) -> const std::string & { return s; });
}

std::optional<int> ParamSystem::find_pointer(std::string_view n) const {
  return find_by_name(pointers, n, [](const PointerDecl &p) -> const std::string & { return p.name; });
}

std::optional<int> ParamSystem::find_loop(std::string_view n) const {
  return find_by_name(loop_transitions, n,
                      [](const LoopTransition &t) -> const std::string & { return t.name; });
}

std::optional<int> ParamSystem::find_local(std::string_view n) const {
  return find_by_name(local_transitions, n,
                      [](const LocalTransition &t) -> const std::string & { return t.name; });
}

const SafetyProperty &ParamSystem::property(std::string_view n) const {
  for (const auto &p : properties)
    if (p.name == n)
      return p;
  throw ModelError("unknown property '" + std::string(n) + "' in system '" + name + "'");
}

std::vector<int> ParamSystem::initial_valuation() const {
  std::vector<int> v;
  v.reserve(vars.size());
  for (const auto &d : vars)
    v.push_back(d.initial);
  return v;
}

namespace {

void check_unique(const std::vector<std::string> &names, const std::string &what) {
  std::set<std::string> seen;
  for (const auto &n : names)
    if (!seen.insert(n).second)
      throw ModelError("duplicate " + what + " '" + n + "'");
}

} // namespace

void ParamSystem::validate() const {
  if (states.empty())
    throw ModelError("system '" + name + "' declares no states");
  check_unique(states, "state");
  if (initial_state < 0 || initial_state >= num_states())
    throw ModelError("initial state out of range");

  std::vector<std::string> var_names;
  for (const auto &v : vars) {
    var_names.push_back(v.name);
    if (v.values.empty())
      throw ModelError("variable '" + v.name + "' has no values");
    if (v.values.size() > 64)
      throw ModelError("variable '" + v.name + "' has more than 64 values");
    check_unique(v.values, "value of variable '" + v.name + "'");
    if (v.initial < 0 || v.initial >= static_cast<int>(v.values.size()))
      throw ModelError("initial value of '" + v.name + "' outside its value set");
  }
  check_unique(var_names, "variable");

  std::vector<std::string> ptr_names;
  for (const auto &p : pointers)
    ptr_names.push_back(p.name);
  check_unique(ptr_names, "pointer");

  if (num_locations() > 64)
    throw ModelError("more than 64 locations");

  auto check_state = [&](int s, const std::string &where) {
    if (s < 0 || s >= num_states())
      throw ModelError("transition '" + where + "' references an undeclared state");
  };
  auto check_value = [&](int var, int value, const std::string &where) {
    if (var < 0 || var >= static_cast<int>(vars.size()))
      throw ModelError("transition '" + where + "' references an undeclared variable");
    if (value < 0 || value >= static_cast<int>(vars[static_cast<std::size_t>(var)].values.size()))
      throw ModelError("transition '" + where + "' references an undeclared value of '" +
                       vars[static_cast<std::size_t>(var)].name + "'");
  };
  auto check_pointer = [&](int p, const std::string &where) {
    if (p < 0 || p >= static_cast<int>(pointers.size()))
      throw ModelError("transition '" + where + "' references an undeclared pointer");
  };
  std::function<void(const GuardFormula &, const std::string &)> check_guard =
      [&](const GuardFormula &g, const std::string &where) {
        if (g.kind == GuardFormula::Kind::Eq)
          check_value(g.var, g.value, where);
        if (g.kind == GuardFormula::Kind::Not && g.children.size() != 1)
          throw ModelError("malformed negation in '" + where + "'");
        for (const auto &c : g.children)
          check_guard(c, where);
      };

  std::vector<std::string> transition_names;
  for (const auto &t : local_transitions) {
    transition_names.push_back(t.name);
    check_state(t.origin, t.name);
    check_state(t.target, t.name);
    std::set<int> assigned;
    for (const auto &a : t.assignments) {
      check_value(a.var, a.value, t.name);
      if (!assigned.insert(a.var).second)
        throw ModelError("transition '" + t.name + "' assigns '" +
                         vars[static_cast<std::size_t>(a.var)].name + "' twice");
    }
    if (t.pointer_guard) {
      check_pointer(t.pointer_guard->pointer, t.name);
      check_value(t.pointer_guard->var, t.pointer_guard->value, t.name);
    }
    if (t.set_pointer_to_self)
      check_pointer(*t.set_pointer_to_self, t.name);
  }
  for (const auto &t : loop_transitions) {
    transition_names.push_back(t.name);
    check_state(t.origin, t.name);
    check_state(t.target_succ, t.name);
    check_state(t.target_fail, t.name);
    check_guard(t.guard, t.name);
    if (t.capture) {
      check_pointer(t.capture->pointer, t.name);
      check_guard(t.capture->when, t.name);
    }
  }
  check_unique(transition_names, "transition");
  {
    std::set<std::string> loc_names(states.begin(), states.end());
    for (const auto &t : loop_transitions)
      if (loc_names.count(t.name))
        throw ModelError("loop transition '" + t.name + "' clashes with a state name");
  }

  std::vector<std::string> prop_names;
  std::function<void(const PropertyFormula &, const std::string &)> check_prop =
      [&](const PropertyFormula &p, const std::string &where) {
        using K = PropertyFormula::Kind;
        if (p.kind == K::AtLeastState || p.kind == K::AtLeastVar) {
          if (p.k < 1)
            throw ModelError("property '" + where + "' uses a count below 1");
          if (p.kind == K::AtLeastState && (p.state < 0 || p.state >= num_states()))
            throw ModelError("property '" + where + "' references an undeclared state");
          if (p.kind == K::AtLeastVar) {
            if (p.var < 0 || p.var >= static_cast<int>(vars.size()))
              throw ModelError("property '" + where + "' references an undeclared variable");
            if (p.value < 0 ||
                p.value >= static_cast<int>(vars[static_cast<std::size_t>(p.var)].values.size()))
              throw ModelError("property '" + where + "' references an undeclared value");
          }
        }
        for (const auto &c : p.children)
          check_prop(c, where);
      };
  for (const auto &p : properties) {
    prop_names.push_back(p.name);
    check_prop(p.formula, p.name);
  }
  check_unique(prop_names, "property");
}

} // namespace paratrap
