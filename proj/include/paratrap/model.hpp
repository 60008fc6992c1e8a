#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace paratrap {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised by the DSL front end and by ParamSystem::validate().
class ModelError : public Error {
public:
  ModelError(const std::string &message, int line = 0, int column = 0);

  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_;
  int column_;
};

// Boolean combination over `var = val` atoms and the nullary `self` predicate.
struct GuardFormula {
  enum class Kind { True, False, Self, Eq, Not, And, Or };

  Kind kind = Kind::True;
  int var = -1;
  int value = -1;
  std::vector<GuardFormula> children;

  static GuardFormula truth() { return {Kind::True, -1, -1, {}}; }
  static GuardFormula falsity() { return {Kind::False, -1, -1, {}}; }
  static GuardFormula self() { return {Kind::Self, -1, -1, {}}; }
  static GuardFormula eq(int var, int value) { return {Kind::Eq, var, value, {}}; }
  static GuardFormula negate(GuardFormula g);
  static GuardFormula conj(std::vector<GuardFormula> parts);
  static GuardFormula disj(std::vector<GuardFormula> parts);

  bool operator==(const GuardFormula &) const = default;
};

/// Evaluates `g` for an agent whose variable values are `valuation`
/// (indexed by variable id). `self` evaluates to `self_flag`.
bool eval_guard(const GuardFormula &g, const std::vector<int> &valuation,
                bool self_flag);

/// Sorted, duplicate-free list of the variables `g` mentions.
std::vector<int> guard_variables(const GuardFormula &g);

// Boolean combination over counting atoms AtLeast(k, loc = q) and
// AtLeast(k, var = val).
struct PropertyFormula {
  enum class Kind { True, False, AtLeastState, AtLeastVar, Not, And, Or, Implies };

  Kind kind = Kind::True;
  int k = 1;
  int state = -1;
  int var = -1;
  int value = -1;
  std::vector<PropertyFormula> children;

  static PropertyFormula at_least_state(int k, int state);
  static PropertyFormula at_least_var(int k, int var, int value);
  static PropertyFormula negate(PropertyFormula p);
  static PropertyFormula conj(std::vector<PropertyFormula> parts);
  static PropertyFormula disj(std::vector<PropertyFormula> parts);
  static PropertyFormula implies(PropertyFormula lhs, PropertyFormula rhs);

  bool operator==(const PropertyFormula &) const = default;
};

/// Evaluates a property given the per-atom agent counts. `count_state(q)` and
/// `count_var(var, value)` return how many agents satisfy the atom.
template <class StateCount, class VarCount>
bool eval_property(const PropertyFormula &p, const StateCount &count_state,
                   const VarCount &count_var) {
  using K = PropertyFormula::Kind;
  switch (p.kind) {
  case K::True:
    return true;
  case K::False:
    return false;
  case K::AtLeastState:
    return count_state(p.state) >= p.k;
  case K::AtLeastVar:
    return count_var(p.var, p.value) >= p.k;
  case K::Not:
    return !eval_property(p.children.at(0), count_state, count_var);
  case K::And:
    for (const auto &c : p.children)
      if (!eval_property(c, count_state, count_var))
        return false;
    return true;
  case K::Or:
    for (const auto &c : p.children)
      if (eval_property(c, count_state, count_var))
        return true;
    return false;
  case K::Implies:
    return !eval_property(p.children.at(0), count_state, count_var) ||
           eval_property(p.children.at(1), count_state, count_var);
  }
  return false;
}

struct SafetyProperty {
  std::string name;
  PropertyFormula formula;

  bool operator==(const SafetyProperty &) const = default;
};

struct VariableDecl {
  std::string name;
  std::vector<std::string> values;
  int initial = 0;

  bool operator==(const VariableDecl &) const = default;
};

struct PointerDecl {
  std::string name;

  bool operator==(const PointerDecl &) const = default;
};

struct Assignment {
  int var = -1;
  int value = -1;

  bool operator==(const Assignment &) const = default;
};

// "the agent `pointer` refers to has var = value"
struct PointerGuard {
  int pointer = -1;
  int var = -1;
  int value = -1;

  bool operator==(const PointerGuard &) const = default;
};

struct LocalTransition {
  std::string name;
  int origin = -1;
  std::vector<Assignment> assignments;
  int target = -1;
  std::optional<PointerGuard> pointer_guard;
  // Pointer set to the acting agent, if any.
  std::optional<int> set_pointer_to_self;

  bool operator==(const LocalTransition &) const = default;
};

struct Capture {
  int pointer = -1;
  GuardFormula when;

  bool operator==(const Capture &) const = default;
};

struct LoopTransition {
  std::string name;
  int origin = -1;
  GuardFormula guard;
  int target_succ = -1;
  int target_fail = -1;
  std::optional<Capture> capture;

  bool operator==(const LoopTransition &) const = default;
};

/// A parameterized system. Immutable once validated; share by const reference.
///
/// Locations are numbered states first, then loop transitions: location
/// `states.size() + t` means "executing loop transition t".
struct ParamSystem {
  std::string name;
  std::vector<std::string> states;
  int initial_state = 0;
  std::vector<VariableDecl> vars;
  std::vector<PointerDecl> pointers;
  std::vector<LocalTransition> local_transitions;
  std::vector<LoopTransition> loop_transitions;
  std::vector<SafetyProperty> properties;

  /// Throws ModelError describing the first violated invariant.
  void validate() const;

  int num_states() const { return static_cast<int>(states.size()); }
  int num_locations() const {
    return num_states() + static_cast<int>(loop_transitions.size());
  }
  int loop_location(int t) const { return num_states() + t; }
  std::string location_name(int loc) const;

  std::optional<int> find_state(std::string_view name) const;
  std::optional<int> find_var(std::string_view name) const;
  std::optional<int> find_value(int var, std::string_view value) const;
  std::optional<int> find_pointer(std::string_view name) const;
  std::optional<int> find_loop(std::string_view name) const;
  std::optional<int> find_local(std::string_view name) const;

  /// Throws ModelError if no property is called `name`.
  const SafetyProperty &property(std::string_view name) const;

  std::vector<int> initial_valuation() const;

  bool operator==(const ParamSystem &) const = default;
};

/// Parses a `.psys` document. Throws ModelError with line/column on failure.
ParamSystem parse_system(std::string_view text);

/// Canonical `.psys` rendering; parse_system(pretty_print(s)) == s.
std::string pretty_print(const ParamSystem &sys);

std::string format_guard(const ParamSystem &sys, const GuardFormula &g);
std::string format_property(const ParamSystem &sys, const PropertyFormula &p);

/// Names accepted by builtin().
std::vector<std::string> builtin_names();

/// Bundled benchmark models. Throws ModelError for unknown names.
ParamSystem builtin(std::string_view name);

/// The `.psys` source of a bundled model.
std::string_view builtin_source(std::string_view name);

} // namespace paratrap
