#include "paratrap/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace paratrap {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

void say(const VerifyOptions &o, const std::string &line) {
  if (o.log)
    o.log(line);
}

std::vector<Powerword> seeds_from(const ParamSystem &sys, const std::vector<TrapLanguage> &langs,
                                  int n, std::size_t cap) {
  std::vector<Powerword> out;
  for (const auto &lang : langs) {
    for_each_word(lang, n, [&](const NormalizedTrap &w) {
      out.push_back(concretize(sys, w));
      return out.size() < cap;
    });
    if (out.size() >= cap)
      break;
  }
  std::sort(out.begin(), out.end(),
            [](const Powerword &a, const Powerword &b) { return a.data() < b.data(); });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

} // namespace

int VerificationReport::max_size() const {
  int m = 0;
  for (const auto &s : sizes)
    m = std::max(m, s.size);
  return m;
}

int VerificationReport::total_traps() const {
  int t = 0;
  for (const auto &s : sizes)
    t += s.traps_found;
  return t;
}

int VerificationReport::max_names() const {
  int m = 0;
  for (const auto &l : languages)
    m = std::max(m, l.names);
  return m;
}

double VerificationReport::max_proving_seconds() const {
  double m = 0;
  if (inductivity)
    for (const auto &e : inductivity->entries)
      m = std::max(m, e.verdict.seconds);
  return m;
}

std::string to_string(VerificationReport::Verdict v) {
  switch (v) {
  case VerificationReport::Verdict::Proved:
    return "proved";
  case VerificationReport::Verdict::NotProved:
    return "not proved";
  case VerificationReport::Verdict::ProverUnavailable:
    return "prover unavailable";
  }
  return "?";
}

VerificationReport verify(const ParamSystem &sys, const SafetyProperty &p,
                          const VerifyOptions &options) {
  if (options.min_size < 1 || options.max_size < options.min_size)
    throw Error("verify: empty size range");
  if (options.max_iterations < 1)
    throw Error("verify: iteration cap must be positive");
  const auto start = Clock::now();
  VerificationReport r;
  r.system = sys.name;
  r.property = p.name;

  CegarOptions copt;
  copt.max_iterations = options.max_iterations;
  copt.counterexample.assume_property_before = options.assume_property_before;
  copt.solver.seed = options.seed;
  copt.emit_cnf_dir = options.emit_cnf_dir;

  auto emit = [&](const std::vector<fo::Problem> &probs) {
    if (options.tptp_dir.empty())
      return;
    std::filesystem::create_directories(options.tptp_dir);
    r.tptp_files.clear();
    for (const auto &prob : probs) {
      const auto path = std::filesystem::path(options.tptp_dir) / (prob.name + ".p");
      std::ofstream(path) << fo::emit_tptp(prob);
      r.tptp_files.push_back(path.string());
    }
  };

  bool languages_changed = false;
  for (int n = options.min_size; n <= options.max_size; ++n) {
    const auto t0 = Clock::now();
    SizeResult sr;
    sr.size = n;
    const Instance inst(sys, n);
    const auto seeds = seeds_from(sys, r.languages, n, options.max_seeds);
    const CegarResult res = cegar(inst, p, copt, seeds);
    sr.proved = res.verdict == CegarResult::Verdict::Proved;
    sr.seeded = static_cast<int>(res.seeded);
    sr.traps_found = static_cast<int>(res.traps.size() - res.seeded);
    sr.iterations = res.iterations;
    sr.reason = res.reason;
    say(options, "N=" + std::to_string(n) + ": cegar " + (sr.proved ? "proved" : "unknown") + ", " +
                     std::to_string(sr.traps_found) + " new traps, " + std::to_string(sr.seeded) +
                     " seeded");

    if (!sr.proved) {
      sr.seconds = since(t0);
      r.sizes.push_back(sr);
      if (res.counterexample) {
        r.counterexample = res.counterexample;
        r.counterexample_size = n;
        const ExplicitVerdict ev = check_property_explicit(sys, n, p, 2'000'000);
        if (ev.status == ExplicitVerdict::Status::Violated) {
          r.violation = ev.trace;
          r.notes.push_back("property violated at N=" + std::to_string(n));
          break;
        }
      }
      r.notes.push_back("N=" + std::to_string(n) + ": cegar gave up (" + res.reason + ")");
      continue;
    }

    for (std::size_t k = res.seeded; k < res.traps.size(); ++k) {
      try {
        const NormalizedTrap nt = normalize(sys, res.traps[k], options.name_budget);
        auto lang = abduct(sys, nt, {n});
        if (!lang)
          continue;
        // Keep only languages no other language subsumes; dropping one
        // weakens the assumptions of the first-order problems, so this is
        // safe even though subsumption is only checked up to a length.
        const int horizon = std::max(options.subsumption_length, n + lang->threshold);
        const bool known = std::any_of(r.languages.begin(), r.languages.end(), [&](const TrapLanguage &l) {
          return subsumes(sys, l, *lang, horizon);
        });
        if (known)
          continue;
        std::erase_if(r.languages, [&](const TrapLanguage &l) { return subsumes(sys, *lang, l, horizon); });
        r.languages.push_back(std::move(*lang));
        ++sr.new_languages;
        languages_changed = true;
      } catch (const Error &e) {
        r.notes.push_back("N=" + std::to_string(n) + ": trap skipped: " + e.what());
      }
    }
    sr.seconds = since(t0);
    r.sizes.push_back(sr);
    say(options, "N=" + std::to_string(n) + ": " + std::to_string(sr.new_languages) +
                     " new languages, " + std::to_string(r.languages.size()) + " total");

    if (!languages_changed || r.languages.empty())
      continue;
    languages_changed = false;
    fo::ProblemOptions popt;
    if (options.size_floor)
      popt.size_floor = n;
    emit(fo::build_problems(sys, r.languages, p, popt));
    if (!options.prover) {
      r.verdict = VerificationReport::Verdict::ProverUnavailable;
      r.notes.push_back("no prover configured; stopped after emitting the first-order problems");
      break;
    }
    r.inductivity = fo::check_inductivity(sys, r.languages, p, *options.prover, popt);
    ++r.inductivity_attempts;
    say(options, std::string("inductivity: ") + (r.inductivity->proved ? "proved" : "not proved"));
    if (r.inductivity->proved) {
      r.verdict = VerificationReport::Verdict::Proved;
      break;
    }
  }
  r.seconds = since(start);
  return r;
}

io::json to_json(const ParamSystem &sys, const VerificationReport &r) {
  using io::json;
  json sizes = json::array();
  for (const auto &s : r.sizes)
    sizes.push_back({{"size", s.size},
                     {"cegar", s.proved ? "proved" : "unknown"},
                     {"seeded", s.seeded},
                     {"traps_found", s.traps_found},
                     {"iterations", s.iterations},
                     {"new_languages", s.new_languages},
                     {"seconds", s.seconds},
                     {"reason", s.reason}});
  json langs = json::array();
  for (const auto &l : r.languages)
    langs.push_back(io::to_json(sys, l));
  json out = {{"version", io::kSchemaVersion},
              {"system", r.system},
              {"property", r.property},
              {"verdict", to_string(r.verdict)},
              {"seconds", r.seconds},
              {"max_size", r.max_size()},
              {"traps", r.total_traps()},
              {"language_count", r.languages.size()},
              {"max_names", r.max_names()},
              {"max_proving_seconds", r.max_proving_seconds()},
              {"sizes", sizes},
              {"languages", langs},
              {"tptp_files", r.tptp_files},
              {"notes", r.notes}};
  if (r.inductivity) {
    json problems = json::object();
    for (const auto &e : r.inductivity->entries)
      problems[e.problem] = {{"status", fo::to_string(e.verdict.status)},
                             {"seconds", e.verdict.seconds},
                             {"szs", e.verdict.szs}};
    out["inductivity"] = {{"attempts", r.inductivity_attempts},
                          {"single_agent_ok", r.inductivity->single_agent_ok},
                          {"proved", r.inductivity->proved},
                          {"problems", problems}};
  }
  if (r.violation)
    out["violation"] = io::to_json(Layout(sys, r.counterexample_size), *r.violation);
  else if (r.counterexample) {
    const Layout l(sys, r.counterexample_size);
    out["counterexample"] = {{"before", io::to_json(l, r.counterexample->before)},
                             {"after", io::to_json(l, r.counterexample->after)}};
  }
  return out;
}

std::string render_report(const ParamSystem &sys, const VerificationReport &r) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  out << "system            " << r.system << "\n"
      << "property          " << r.property << "\n"
      << "verdict           " << to_string(r.verdict) << "\n"
      << "time (s)          " << r.seconds << "\n"
      << "max. N            " << r.max_size() << "\n"
      << "#traps            " << r.total_traps() << "\n"
      << "#trap languages   " << r.languages.size() << "\n"
      << "max. #indices     " << r.max_names() << "\n"
      << "max. proving (s)  " << r.max_proving_seconds() << "\n";
  out << "\nper size:\n";
  for (const auto &s : r.sizes)
    out << "  N=" << s.size << "  cegar " << (s.proved ? "proved " : "unknown") << "  traps "
        << s.traps_found << " (+" << s.seeded << " seeded)  languages +" << s.new_languages << "  "
        << s.seconds << " s" << (s.reason.empty() ? "" : "  (" + s.reason + ")") << "\n";
  if (r.inductivity) {
    out << "\ninductivity (attempt " << r.inductivity_attempts << "):\n";
    out << "  N=1 by explicit search: " << (r.inductivity->single_agent_ok ? "holds" : "fails") << "\n";
    for (const auto &e : r.inductivity->entries)
      out << "  " << e.problem << ": " << fo::to_string(e.verdict.status) << " (" << e.verdict.seconds
          << " s)\n";
  }
  for (std::size_t k = 0; k < r.languages.size(); ++k)
    out << "\nlanguage " << k + 1 << ":\n" << render_language(sys, r.languages[k]);
  if (r.violation)
    out << "\nviolation at N=" << r.counterexample_size << ":\n"
        << render_trace(Layout(sys, r.counterexample_size), *r.violation);
  for (const auto &n : r.notes)
    out << "note: " << n << "\n";
  return out.str();
}

} // namespace paratrap
