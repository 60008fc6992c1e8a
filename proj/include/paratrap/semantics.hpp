#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "paratrap/model.hpp"
#include "paratrap/word.hpp"

namespace paratrap {

enum class OccurrenceKind { Local, LoopStart, LoopAdvance, LoopFail, LoopSucceed };

std::string to_string(OccurrenceKind k);

/// One ground instance of a transition in an instance of fixed size.
///
/// `changed_pre` and `changed_post` list the same (agent, slot) pairs in the
/// same order; `guard` cells are required and left unchanged.
struct Occurrence {
  OccurrenceKind kind = OccurrenceKind::Local;
  int transition = -1; // index into local_transitions or loop_transitions
  int actor = -1;
  int inspectee = -1; // loop kinds other than LoopStart
  std::vector<Cell> changed_pre;
  std::vector<Cell> changed_post;
  std::vector<Cell> guard;

  bool operator==(const Occurrence &) const = default;
};

/// Initial configuration of the instance with `size` agents. Throws Error for
/// size < 1.
Configuration initial_config(const ParamSystem &sys, int size);

/// Every occurrence of the instance, in the deterministic order
/// (kind, transition, actor, inspectee, valuation, pointer holder).
std::vector<Occurrence> enumerate_occurrences(const ParamSystem &sys, int size);

bool is_enabled(const Occurrence &o, const Configuration &c);

/// Throws Error if `o` is not enabled at `c`.
Configuration apply(const Occurrence &o, const Configuration &c);

/// Precomputed occurrences of one instance, indexed by the acting agent's
/// location. Cheap to query, immutable after construction.
class Instance {
public:
  Instance(const ParamSystem &sys, int size);

  const ParamSystem &system() const { return layout_.system(); }
  const Layout &layout() const { return layout_; }
  int size() const { return layout_.size(); }
  const std::vector<Occurrence> &occurrences() const { return occurrences_; }
  const Configuration &initial() const { return initial_; }

  /// (occurrence index, successor) pairs in occurrence order.
  std::vector<std::pair<int, Configuration>> successors(const Configuration &c) const;

private:
  Layout layout_;
  std::vector<Occurrence> occurrences_;
  Configuration initial_;
  // by_actor_loc_[actor * num_locations + loc] = occurrence indices
  std::vector<std::vector<int>> by_actor_loc_;
};

std::vector<std::pair<Occurrence, Configuration>> successors(const ParamSystem &sys,
                                                             const Configuration &c);

struct ReachabilityResult {
  std::vector<Configuration> states; // BFS order; states[0] is initial
  std::vector<int> parent;           // -1 for the root
  std::vector<int> via;              // occurrence index, -1 for the root
  bool truncated = false;

  /// The configurations on the BFS path from the initial one to states[index].
  std::vector<int> path_to(int index) const;
};

/// Breadth-first exploration. Stops once `bound` states are stored and sets
/// `truncated` if unexplored states remain.
ReachabilityResult reachable(const Instance &inst, std::optional<std::size_t> bound = {});
ReachabilityResult reachable(const ParamSystem &sys, int size,
                             std::optional<std::size_t> bound = {});

/// Evaluates a property on a configuration by counting agents.
bool holds(const ParamSystem &sys, const PropertyFormula &p, const Configuration &c);

struct Trace {
  std::vector<Configuration> configurations;
  std::vector<Occurrence> steps; // steps[k] leads from configurations[k] to [k+1]
};

struct ExplicitVerdict {
  enum class Status { Holds, Violated, Truncated };
  Status status = Status::Holds;
  std::size_t explored = 0;
  std::optional<Trace> trace; // set when Violated
};

/// Exhaustive reachability check; a violation carries a shortest trace.
ExplicitVerdict check_property_explicit(const ParamSystem &sys, int size,
                                        const SafetyProperty &p,
                                        std::optional<std::size_t> bound = {});

std::string format_occurrence(const Layout &layout, const Occurrence &o);

/// Column-per-agent table with one row per slot.
std::string render_configuration(const Layout &layout, const Configuration &c);
std::string render_trace(const Layout &layout, const Trace &t);

} // namespace paratrap
