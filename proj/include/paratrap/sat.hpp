#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace paratrap::sat {

// Variables are 1-based; a literal is +v or -v, as in DIMACS.

enum class Result { Sat, Unsat, Unknown };

std::string to_string(Result r);

struct Cnf {
  int num_vars = 0;
  std::vector<std::vector<int>> clauses;

  int new_var() { return ++num_vars; }
  void add(std::vector<int> clause) { clauses.push_back(std::move(clause)); }
};

std::string to_dimacs(const Cnf &cnf, const std::string &comment = {});

/// Throws paratrap::Error on malformed input.
Cnf parse_dimacs(const std::string &text);

/// Incremental propositional solver.
class Backend {
public:
  virtual ~Backend() = default;

  virtual int new_var() = 0;
  virtual int num_vars() const = 0;
  virtual void add_clause(std::span<const int> lits) = 0;
  /// Assumptions hold for this call only.
  virtual Result solve(std::span<const int> assumptions = {}) = 0;
  /// Value of `var` in the last model; valid after solve() returned Sat.
  virtual bool value(int var) const = 0;

  void add_clause(std::initializer_list<int> lits) {
    add_clause(std::span<const int>(lits.begin(), lits.size()));
  }
  void ensure_vars(int n) {
    while (num_vars() < n)
      new_var();
  }
  void load(const Cnf &cnf);
  bool value_lit(int lit) const { return lit > 0 ? value(lit) : !value(-lit); }
};

/// Conflict-driven clause learning with two watched literals, first-UIP
/// learning, VSIDS and Luby restarts.
class CdclSolver final : public Backend {
public:
  struct Options {
    std::uint64_t seed = 0;         // 0: deterministic initial order
    long long conflict_budget = -1; // per solve() call; -1 unlimited
  };

  CdclSolver();
  explicit CdclSolver(Options options);
  ~CdclSolver() override;
  CdclSolver(const CdclSolver &) = delete;
  CdclSolver &operator=(const CdclSolver &) = delete;

  int new_var() override;
  int num_vars() const override;
  void add_clause(std::span<const int> lits) override;
  using Backend::add_clause;
  Result solve(std::span<const int> assumptions = {}) override;
  bool value(int var) const override;

  long long conflicts() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Runs a DIMACS solver executable (`command <file>`) per solve() call and
/// reads the `s`/`v` lines of its answer.
class ExternalSolver final : public Backend {
public:
  explicit ExternalSolver(std::string command);

  int new_var() override { return ++cnf_.num_vars; }
  int num_vars() const override { return cnf_.num_vars; }
  void add_clause(std::span<const int> lits) override;
  using Backend::add_clause;
  Result solve(std::span<const int> assumptions = {}) override;
  bool value(int var) const override;

private:
  std::string command_;
  Cnf cnf_;
  std::vector<bool> model_;
};

struct SolverConfig {
  std::string external_command; // empty: built-in solver
  std::uint64_t seed = 0;
};

std::unique_ptr<Backend> make_backend(const SolverConfig &cfg);

} // namespace paratrap::sat
