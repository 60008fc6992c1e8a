#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "paratrap/abduction.hpp"
#include "paratrap/folcheck.hpp"
#include "paratrap/io.hpp"
#include "paratrap/semantics.hpp"
#include "paratrap/traps.hpp"

namespace paratrap {

struct VerifyOptions {
  int min_size = 2;
  int max_size = 8;
  int max_iterations = 100000;        // CEGAR iterations per size
  bool assume_property_before = true; // counterexample steps start in P
  bool size_floor = false;            // add "at least max analysed N agents"
  int name_budget = kDefaultNameBudget;
  std::size_t max_seeds = 5000;       // words of known languages fed to CEGAR
  int subsumption_length = 10;        // lengths checked when pruning languages
  std::optional<fo::ProverConfig> prover; // none: stop at problem emission
  std::string tptp_dir;                   // non-empty: write the problems there
  std::string emit_cnf_dir;
  std::uint64_t seed = 0;
  std::function<void(const std::string &)> log; // progress lines, may be empty
};

struct SizeResult {
  int size = 0;
  bool proved = false; // CEGAR proved the instance
  int seeded = 0;
  int traps_found = 0;
  int iterations = 0;
  int new_languages = 0;
  double seconds = 0;
  std::string reason; // why CEGAR stopped, if it did not prove
};

struct VerificationReport {
  enum class Verdict { Proved, NotProved, ProverUnavailable };

  std::string system;
  std::string property;
  Verdict verdict = Verdict::NotProved;
  std::vector<SizeResult> sizes;
  std::vector<TrapLanguage> languages;
  std::optional<fo::InductivityReport> inductivity; // last attempt
  int inductivity_attempts = 0;
  std::vector<std::string> tptp_files;
  std::optional<Counterexample> counterexample; // from CEGAR
  int counterexample_size = 0;
  std::optional<Trace> violation; // confirmed by explicit search
  std::vector<std::string> notes;
  double seconds = 0;

  int max_size() const;
  int total_traps() const;
  int max_names() const;
  double max_proving_seconds() const;
};

std::string to_string(VerificationReport::Verdict v);

/// Per size: CEGAR (seeded with the words of the languages found so far),
/// abduction of the new traps, then the first-order inductivity check of all
/// languages. Stops at the first proof or confirmed violation.
VerificationReport verify(const ParamSystem &sys, const SafetyProperty &p,
                          const VerifyOptions &options = {});

io::json to_json(const ParamSystem &sys, const VerificationReport &r);

/// One line per column of the summary table, then details per size.
std::string render_report(const ParamSystem &sys, const VerificationReport &r);

} // namespace paratrap
