#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "paratrap/sat.hpp"
#include "paratrap/semantics.hpp"

namespace paratrap {

/// Dense numbering of the cells of an instance; cell k is SAT variable k + 1
/// in a trap encoding.
class CellIndex {
public:
  explicit CellIndex(const Layout &layout);

  int count() const { return count_; }
  int index(const Cell &c) const {
    return c.agent * per_agent_ + offset_[static_cast<std::size_t>(c.slot)] + c.value;
  }
  int index(int agent, int slot, int value) const { return index(Cell{agent, slot, value}); }
  Cell cell(int index) const;

private:
  std::vector<int> offset_;
  std::vector<int> slot_of_offset_;
  int per_agent_ = 0;
  int count_ = 0;
};

struct StructuralCheck {
  bool initial_intersects = false;
  std::optional<int> violating_occurrence; // first occurrence breaking inductivity

  bool ok() const { return initial_intersects && !violating_occurrence; }
};

/// Occurrence-local sufficient condition for O being a trap.
StructuralCheck check_trap_structural(const Instance &inst, const Powerword &o);
bool is_trap_structural(const Instance &inst, const Powerword &o);

/// Brute force over every well-formed configuration. Throws Error if the
/// instance has more than `limit` configurations.
bool is_trap_exact(const Instance &inst, const Powerword &o, std::size_t limit = 5'000'000);

struct TrapCnf {
  CellIndex cells;
  sat::Cnf cnf;
  // Constraints before clausification: one per occurrence plus the
  // initial-intersection constraint.
  std::size_t constraints = 0;
};

TrapCnf encode_trap_constraints(const Instance &inst);

/// The powerword whose cells are the true cell variables of a model.
Powerword decode_trap(const Layout &layout, const CellIndex &cells, const sat::Backend &solver);

struct Counterexample {
  Configuration before;
  int occurrence = -1;
  Configuration after;
};

/// A step C ⊢ C' between well-formed configurations with C intersecting O
/// and C' not, found by SAT; none iff O is inductive. Unlike is_trap_exact
/// this scales to large instances.
std::optional<Counterexample> find_trap_violation(const Instance &inst, const Powerword &o);

struct CounterexampleOptions {
  bool assume_property_before = true; // require P(C) as well as not P(C')
};

/// Persistent search for C ⊢ C' with C intersecting every added trap and C'
/// violating the property.
class CounterexampleSearch {
public:
  CounterexampleSearch(const Instance &inst, const PropertyFormula &p,
                       CounterexampleOptions options = {}, const sat::SolverConfig &solver = {});
  ~CounterexampleSearch();

  void add_trap(const Powerword &o);
  std::optional<Counterexample> next();
  const sat::Cnf &cnf() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::optional<Counterexample> find_counterexample(const Instance &inst,
                                                  const std::vector<Powerword> &traps,
                                                  const PropertyFormula &p,
                                                  CounterexampleOptions options = {});

/// Persistent search for traps not intersected by a given configuration.
class TrapSearch {
public:
  explicit TrapSearch(const Instance &inst, const sat::SolverConfig &solver = {},
                      bool minimize = true);
  ~TrapSearch();

  std::optional<Powerword> excluding(const Configuration &c);
  const TrapCnf &encoding() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::optional<Powerword> find_excluding_trap(const Instance &inst, const Configuration &c,
                                             bool minimize = true);

struct CegarOptions {
  CounterexampleOptions counterexample;
  int max_iterations = 100000;
  bool minimize = true;
  sat::SolverConfig solver;
  std::string emit_cnf_dir; // empty: no DIMACS output
};

struct CegarResult {
  enum class Verdict { Proved, Unknown };
  Verdict verdict = Verdict::Unknown;
  std::vector<Powerword> traps; // seeds first, then found traps
  std::size_t seeded = 0;
  std::optional<Counterexample> counterexample;
  std::string reason;
  int iterations = 0;
};

/// Refinement loop: find a violating step from a configuration intersecting
/// every trap so far, then a trap excluding its source configuration.
/// Seed traps that fail the structural check are ignored.
CegarResult cegar(const Instance &inst, const SafetyProperty &p, const CegarOptions &options = {},
                  const std::vector<Powerword> &seeds = {});

/// Table with one column per agent, "∅" for empty entries.
std::string render_powerword(const Layout &layout, const Powerword &o);

} // namespace paratrap
