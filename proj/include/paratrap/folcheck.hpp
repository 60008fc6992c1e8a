#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "paratrap/abduction.hpp"
#include "paratrap/model.hpp"
#include "paratrap/word.hpp"

namespace paratrap::fo {

// Terms: variables (upper-case names) or applications of function symbols
// (lower-case names; constants have no arguments).
struct Term {
  bool is_var = false;
  std::string name;
  std::vector<Term> args;

  static Term var(std::string name) { return {true, std::move(name), {}}; }
  static Term fn(std::string name, std::vector<Term> args = {}) {
    return {false, std::move(name), std::move(args)};
  }

  bool operator==(const Term &) const = default;
};

struct Formula {
  enum class Kind { True, False, Pred, Eq, Not, And, Or, Implies, Iff, Forall, Exists };

  Kind kind = Kind::True;
  std::string name;               // Pred
  std::vector<Term> args;         // Pred, Eq (two terms)
  std::vector<std::string> vars;  // Forall, Exists
  std::vector<Formula> children;

  static Formula truth() { return {}; }
  static Formula falsity() { return {Kind::False, {}, {}, {}, {}}; }
  static Formula pred(std::string name, std::vector<Term> args) {
    return {Kind::Pred, std::move(name), std::move(args), {}, {}};
  }
  static Formula eq(Term a, Term b) { return {Kind::Eq, {}, {std::move(a), std::move(b)}, {}, {}}; }
  static Formula neq(Term a, Term b) { return negate(eq(std::move(a), std::move(b))); }
  static Formula negate(Formula f);
  // conj/disj flatten nested And/Or and drop neutral elements; zero parts
  // give True/False, one part gives the part itself.
  static Formula conj(std::vector<Formula> parts);
  static Formula disj(std::vector<Formula> parts);
  static Formula implies(Formula a, Formula b);
  static Formula iff(Formula a, Formula b);
  static Formula forall(std::vector<std::string> vars, Formula body);
  static Formula exists(std::vector<std::string> vars, Formula body);

  bool operator==(const Formula &) const = default;
};

// Symbols shared by every encoding.
Term zero();
Term last();
Term succ(Term t);
Formula leq(Term a, Term b);
Formula lt(Term a, Term b); // a <= b and a != b

/// Symbol names of the configuration encoding; `primed` selects C'.
std::string loc_symbol(const ParamSystem &sys, int loc, bool primed);
std::string var_symbol(const ParamSystem &sys, int var, int value, bool primed);
std::string loop_fn_symbol(const ParamSystem &sys, int t, bool primed);
std::string pointer_symbol(const ParamSystem &sys, int p, bool primed);

/// Every agent has exactly one location and one value per variable.
Formula build_eta(const ParamSystem &sys, bool primed = false);

/// Finite linear order with least element zero, greatest element last,
/// zero != last, and succ as the immediate successor below last.
Formula build_psi();

/// Every configuration intersects every word of each language of its size.
/// Throws Error for a language that is malformed, uses more than
/// `name_budget` names, or has two stars with no letter token between them.
Formula build_phi(const ParamSystem &sys, const std::vector<TrapLanguage> &langs,
                  int name_budget = kDefaultNameBudget);

/// Step relation restricted to one transition. `loop` selects a loop
/// transition (start or scan step) instead of a local one.
Formula build_tau(const ParamSystem &sys, int transition, bool loop);

Formula build_property(const ParamSystem &sys, const PropertyFormula &p, bool primed);

/// All agents in the initial state with the initial valuation.
Formula build_initial(const ParamSystem &sys);

/// At least `n` distinct agents.
Formula build_size_floor(int n);

struct NamedFormula {
  std::string name;
  Formula formula;

  bool operator==(const NamedFormula &) const = default;
};

struct Problem {
  std::string name; // file stem, e.g. example21_t_lp
  std::vector<NamedFormula> axioms;
  NamedFormula conjecture;
  std::string comment;

  bool operator==(const Problem &) const = default;
};

std::string to_tptp(const Formula &f);
std::string emit_tptp(const Problem &p);

/// Reads the FOF subset written by emit_tptp. Throws Error on anything else.
Problem parse_tptp(const std::string &text);

struct ProblemOptions {
  int size_floor = 0; // >0: add "at least size_floor agents"
};

/// One problem per transition (local transitions first, then loop
/// transitions, in declaration order), then the initial-configuration problem.
std::vector<Problem> build_problems(const ParamSystem &sys, const std::vector<TrapLanguage> &langs,
                                    const SafetyProperty &p, const ProblemOptions &options = {});

// Finite structures.

struct Structure {
  int size = 0;
  std::map<std::string, std::vector<bool>> preds; // index: args in base `size`
  std::map<std::string, std::vector<int>> fns;    // arity 0: one entry

  /// Standard order, zero, last and succ (succ(last) = last).
  static Structure standard(int size);
};

/// Throws Error on an unknown symbol or an unbound variable.
bool evaluate(const Structure &s, const Formula &f);

/// Encodes c (and optionally c' as the primed symbols) over the standard
/// order. Loop functions of agents not executing the loop map to 0.
Structure encode(const ParamSystem &sys, const Configuration &c,
                 const Configuration *next = nullptr);

// Prover driver.

enum class Status { Theorem, CounterSatisfiable, Timeout, Error };

std::string to_string(Status s);

struct ProverConfig {
  /// argv of the prover; "{file}" and "{timeout}" are substituted, and the
  /// file path is appended if no argument mentions "{file}".
  std::vector<std::string> command;
  int timeout_seconds = 60;
};

struct Verdict {
  Status status = Status::Error;
  double seconds = 0;
  std::string szs;     // raw SZS status word, if any
  std::string message; // error detail or last output line
};

/// Maps an SZS status word to a verdict status.
Status status_from_szs(const std::string &word);

Verdict run_prover(const std::string &tptp, const ProverConfig &cfg);

/// Looks for a prover: `explicit_path`, then $PARATRAP_PROVER, then the
/// bundled cvc5 adapter and vampire/eprover on PATH. Returns none if no
/// candidate is executable.
std::optional<ProverConfig> discover_prover(const std::string &explicit_path = {},
                                            int timeout_seconds = 60);

struct InductivityEntry {
  std::string problem;
  Verdict verdict;
};

struct InductivityReport {
  std::vector<InductivityEntry> entries;
  bool single_agent_ok = false; // instance N=1 checked by explicit search
  bool proved = false;
};

InductivityReport check_inductivity(const ParamSystem &sys, const std::vector<TrapLanguage> &langs,
                                    const SafetyProperty &p, const ProverConfig &cfg,
                                    const ProblemOptions &options = {});

} // namespace paratrap::fo
