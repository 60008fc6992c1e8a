// Acceptance checks for example21, one PASS/FAIL line per criterion.
// Exit status is 1 if any criterion fails; a skipped criterion does not fail.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "paratrap/abduction.hpp"
#include "paratrap/folcheck.hpp"
#include "paratrap/pipeline.hpp"
#include "paratrap/semantics.hpp"
#include "paratrap/traps.hpp"

using namespace paratrap;
using fixtures::config_of;
using fixtures::ex21_letter;

namespace {

// Tolerances.
constexpr double kOracleBudget = 300;      // criteria 1 and 2, seconds
constexpr double kVerifyBudget = 600;      // criterion 6
constexpr double kProblemBudget = 60;      // criterion 7, per problem
constexpr int kMaxLanguages = 5;
constexpr int kMaxNames = 2;
constexpr int kMinPumpedTraps = 50;
constexpr int kPhiSamples = 200;
constexpr int kDropSamples = 500;

using Clock = std::chrono::steady_clock;

struct Outcome {
  enum class Kind { Pass, Fail, Skip };
  Kind kind = Kind::Pass;
  std::string detail;
};

Outcome pass(std::string d) { return {Outcome::Kind::Pass, std::move(d)}; }
Outcome fail(std::string d) { return {Outcome::Kind::Fail, std::move(d)}; }
Outcome skip(std::string d) { return {Outcome::Kind::Skip, std::move(d)}; }

const ParamSystem &ex21() {
  static const ParamSystem sys = builtin("example21");
  return sys;
}

bool replays(const ParamSystem &sys, int n, const Trace &t, const PropertyFormula &p) {
  if (t.configurations.empty() || t.configurations.front() != initial_config(sys, n))
    return false;
  if (t.steps.size() + 1 != t.configurations.size())
    return false;
  for (std::size_t k = 0; k < t.steps.size(); ++k) {
    if (!is_enabled(t.steps[k], t.configurations[k]))
      return false;
    if (apply(t.steps[k], t.configurations[k]) != t.configurations[k + 1])
      return false;
  }
  return !holds(sys, p, t.configurations.back());
}

Outcome oracle_safety() {
  const auto &sys = ex21();
  std::ostringstream d;
  for (int n = 1; n <= 5; ++n) {
    const auto v = check_property_explicit(sys, n, sys.property("mutex"));
    if (v.status != ExplicitVerdict::Status::Holds)
      return fail("mutex not established at N=" + std::to_string(n));
    d << "N=" << n << ":" << v.explored << " ";
  }
  const auto &never = sys.property("never_critical");
  for (int n = 1; n <= 5; ++n) {
    const auto v = check_property_explicit(sys, n, never);
    if (v.status != ExplicitVerdict::Status::Violated || !v.trace)
      return fail("never_critical not violated at N=" + std::to_string(n));
    if (!replays(sys, n, *v.trace, never.formula))
      return fail("trace does not replay at N=" + std::to_string(n));
  }
  d << "states; never_critical violated with replayable traces";
  return pass(d.str());
}

Outcome trap_soundness() {
  const auto &sys = ex21();
  int traps = 0;
  long long pairs = 0;
  for (int n : {2, 3, 4}) {
    const Instance inst(sys, n);
    const CegarResult res = cegar(inst, sys.property("mutex"));
    const auto reach = reachable(inst);
    for (const auto &o : res.traps) {
      ++traps;
      for (const auto &c : reach.states) {
        ++pairs;
        if (!intersects(c, o))
          return fail("a reachable configuration at N=" + std::to_string(n) + " misses a trap");
      }
    }
  }
  return pass(std::to_string(traps) + " traps, " + std::to_string(pairs) + " (trap, state) pairs");
}

bool has_successor(const Configuration &from, const Configuration &to) {
  const auto succ = successors(ex21(), from);
  return std::any_of(succ.begin(), succ.end(), [&](const auto &p) { return p.second == to; });
}

Outcome worked_examples() {
  const auto &sys = ex21();
  // A failing inspection, then a successful last inspection.
  const auto top_l = config_of(sys, {"break true", "t_lp true", "t_lp true"}, {{1, 0, 0}, {2, 0, 1}});
  const auto top_r = config_of(sys, {"break true", "break true", "t_lp true"}, {{2, 0, 1}});
  const auto bot_l = config_of(sys, {"initial false", "t_lp true", "initial false"}, {{1, 0, 2}});
  const auto bot_r = config_of(sys, {"initial false", "critical true", "initial false"});
  if (!has_successor(top_l, top_r) || !has_successor(bot_l, bot_r))
    return fail("inspection step missing from successors");

  if (!is_trap_structural(Instance(sys, 7), fixtures::seven_agent_trap(sys)))
    return fail("seven-agent trap is not structural");

  const NormalizedTrap nt = normalize(sys, fixtures::seven_agent_trap(sys));
  const auto a = ex21_letter(sys, 2, kNoName, {}, {}, {0, 1});
  const auto p0 = ex21_letter(sys, 2, 0, {"break", "loop"}, {"false"}, {0, 1});
  const auto b = ex21_letter(sys, 2, kNoName, {}, {}, {0});
  const auto p1 = ex21_letter(sys, 2, 1, {"break", "loop"}, {"false"}, {0});
  const auto e = ex21_letter(sys, 2, kNoName, {}, {}, {});
  if (nt.names != 2 || nt.letters != std::vector<NormalizedLetter>{a, a, a, p0, b, p1, e})
    return fail("normalization differs:\n" + render_normalized(sys, nt));
  return pass("inspection steps, structural trap at N=7, normalization a a a p0 b p1 e");
}

bool qualifying_run(const NormalizedTrap &nt, int i, int run) {
  if (i + run > nt.length() || nt.letters[static_cast<std::size_t>(i)].index != kNoName)
    return false;
  for (int d = 1; d < run; ++d)
    if (nt.letters[static_cast<std::size_t>(i + d)] != nt.letters[static_cast<std::size_t>(i)])
      return false;
  return true;
}

Outcome pumping() {
  const auto &sys = ex21();
  const int run = rendezvous_degree(sys);
  int traps = 0, pumps = 0, failures = 0;
  for (int n : {4, 5}) {
    const Instance inst(sys, n);
    std::set<std::vector<std::uint64_t>> seen;
    std::vector<Powerword> found;
    auto keep = [&](const Powerword &o) {
      if (seen.insert(o.data()).second)
        found.push_back(o);
    };
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      CegarOptions opt;
      opt.solver.seed = seed;
      for (const auto &o : cegar(inst, sys.property("mutex"), opt).traps)
        keep(o);
    }
    // Further traps: non-minimized ones excluding unreachable configurations.
    std::set<std::vector<std::uint8_t>> reached;
    for (const auto &c : reachable(inst).states)
      reached.insert(c.data());
    auto all = all_configurations(inst.layout(), 10'000'000);
    std::mt19937_64 rng(3);
    std::shuffle(all.begin(), all.end(), rng);
    sat::SolverConfig sc;
    sc.seed = 7;
    TrapSearch search(inst, sc, false);
    int tried = 0;
    for (const auto &c : all) {
      if (reached.count(c.data()))
        continue;
      if (++tried > 3000)
        break;
      if (auto o = search.excluding(c))
        keep(*o);
    }

    for (const auto &o : found) {
      NormalizedTrap nt;
      try {
        nt = normalize(sys, o);
      } catch (const Error &) {
        continue; // more agent groups than names
      }
      bool counted = false;
      for (int i = 0; i < nt.length(); ++i) {
        if (!qualifying_run(nt, i, run))
          continue;
        counted = true;
        for (int k = 2; k <= 4; ++k) {
          const NormalizedTrap p = pump(nt, i, k, run);
          ++pumps;
          if (!is_trap_structural(Instance(sys, p.length()), concretize(sys, p)))
            ++failures;
        }
      }
      traps += counted;
    }
  }
  const std::string d = std::to_string(traps) + " traps with qualifying runs, " +
                        std::to_string(pumps) + " pumps, " + std::to_string(failures) + " failures";
  if (traps < kMinPumpedTraps)
    return fail(d + " (need " + std::to_string(kMinPumpedTraps) + " traps)");
  return failures == 0 ? pass(d) : fail(d);
}

Outcome language_fidelity() {
  const auto &sys = ex21();
  long long words = 0;
  for (const auto &lang : {fixtures::two_name_language(sys), fixtures::initial_language(sys)})
    for (int n = 3; n <= 7; ++n) {
      const Instance inst(sys, n);
      for (const auto &w : words_of(lang, n)) {
        ++words;
        if (!is_trap_structural(inst, concretize(sys, w)))
          return fail("word of length " + std::to_string(n) + " is not a trap:\n" +
                      render_normalized(sys, w));
      }
    }
  return pass(std::to_string(words) + " words checked");
}

std::string report_line(const VerificationReport &r) {
  std::ostringstream d;
  d.setf(std::ios::fixed);
  d.precision(1);
  d << to_string(r.verdict) << ", " << r.languages.size() << " languages, max " << r.max_names()
    << " names, max N=" << r.max_size() << ", " << r.seconds << " s";
  return d.str();
}

Outcome end_to_end(const std::optional<fo::ProverConfig> &prover) {
  const auto &sys = ex21();
  VerifyOptions opt;
  opt.prover = prover;
  const VerificationReport r = verify(sys, sys.property("mutex"), opt);
  const std::string d = report_line(r);
  if (!prover)
    return r.verdict == VerificationReport::Verdict::ProverUnavailable
               ? pass(d + " (no prover: stopped at problem emission)")
               : fail(d + " (expected prover unavailable)");
  if (r.verdict != VerificationReport::Verdict::Proved)
    return fail(d);
  if (static_cast<int>(r.languages.size()) > kMaxLanguages || r.max_names() > kMaxNames)
    return fail(d + " (too many languages or names)");
  if (r.seconds > kVerifyBudget)
    return fail(d + " (over time budget)");
  return pass(d);
}

Outcome published_languages(const std::optional<fo::ProverConfig> &prover) {
  if (!prover)
    return skip("no first-order prover found");
  const auto &sys = ex21();
  fo::ProverConfig cfg = *prover;
  cfg.timeout_seconds = static_cast<int>(kProblemBudget);
  const auto problems = fo::build_problems(
      sys, {fixtures::two_name_language(sys), fixtures::initial_language(sys)}, sys.property("mutex"));
  std::ostringstream d;
  d.setf(std::ios::fixed);
  d.precision(2);
  bool ok = true;
  for (const auto &p : problems) {
    const fo::Verdict v = fo::run_prover(fo::emit_tptp(p), cfg);
    d << p.name << "=" << fo::to_string(v.status) << "(" << v.seconds << "s) ";
    ok = ok && v.status == fo::Status::Theorem && v.seconds <= kProblemBudget;
  }
  return ok ? pass(d.str()) : fail(d.str());
}

Configuration random_config(const ParamSystem &sys, int n, std::mt19937_64 &rng) {
  const Layout l(sys, n);
  Configuration c(n, l.width());
  for (int a = 0; a < n; ++a) {
    const int loc = static_cast<int>(rng() % static_cast<unsigned>(sys.num_locations()));
    c.at(a, l.loc_slot()) = static_cast<std::uint8_t>(loc);
    for (int v = 0; v < l.num_vars(); ++v)
      c.at(a, l.var_slot(v)) =
          static_cast<std::uint8_t>(rng() % static_cast<unsigned>(l.alphabet_size(l.var_slot(v))));
    for (int t = 0; t < l.num_loops(); ++t)
      if (loc == sys.loop_location(t))
        c.at(static_cast<int>(rng() % static_cast<unsigned>(n)), l.loop_slot(a, t)) = kUp;
  }
  return c;
}

Outcome phi_correctness() {
  const auto &sys = ex21();
  std::mt19937_64 rng(17);
  std::vector<TrapLanguage> langs{fixtures::two_name_language(sys), fixtures::initial_language(sys)};
  const fo::Formula phi = fo::build_phi(sys, langs);
  int disagreements = 0, satisfied = 0;
  for (int k = 0; k < kPhiSamples; ++k) {
    const Configuration c = random_config(sys, 4, rng);
    if (!is_well_formed(Layout(sys, 4), c))
      return fail("random configuration is not well formed");
    bool want = true;
    for (const auto &lang : langs)
      for (const auto &w : words_of(lang, 4))
        want = want && intersects(c, concretize(sys, w));
    satisfied += want;
    disagreements += fo::evaluate(fo::encode(sys, c), phi) != want;
  }
  const std::string d = std::to_string(kPhiSamples) + " configurations, " +
                        std::to_string(satisfied) + " satisfy the languages, " +
                        std::to_string(disagreements) + " disagreements";
  return disagreements == 0 ? pass(d) : fail(d);
}

Outcome move_drop() {
  const auto &sys = ex21();
  const auto all = MoveSlots::all_loops(sys);
  const auto c = config_of(sys, {"break true", "t_lp true", "t_lp true"}, {{1, 0, 0}, {2, 0, 1}});
  if (move_left(sys, c, 1, all) !=
      config_of(sys, {"break true", "t_lp true", "t_lp true"}, {{1, 0, 0}, {2, 0, 0}}))
    return fail("move left example");
  if (move_right(sys, c, 1, all) !=
      config_of(sys, {"break true", "t_lp true", "t_lp true"}, {{1, 0, 0}, {2, 0, 2}}))
    return fail("move right example");
  if (drop(sys, c, 2) != config_of(sys, {"break true", "t_lp true"}, {{1, 0, 0}}))
    return fail("drop example");

  // Random (C, O, k) with C and O avoiding column k and the slots k.T_lp.
  std::mt19937_64 rng(23);
  int intersecting = 0, mismatches = 0;
  for (int rep = 0; rep < kDropSamples; ++rep) {
    const int n = 2 + rep % 4;
    const Layout l(sys, n);
    const int k = static_cast<int>(rng() % static_cast<unsigned>(n));
    Configuration cc = random_config(sys, n, rng);
    for (int t = 0; t < l.num_loops(); ++t)
      if (cc.at(k, l.loc_slot()) == sys.loop_location(t)) {
        // Agent k leaves the loop; marks pointing at k move to a neighbour.
        cc.at(k, l.loc_slot()) = static_cast<std::uint8_t>(sys.initial_state);
        for (int a = 0; a < n; ++a)
          cc.at(a, l.loop_slot(k, t)) = kBlank;
      }
    for (int j = 0; j < n; ++j)
      for (int t = 0; t < l.num_loops(); ++t)
        if (cc.at(k, l.loop_slot(j, t)) == kUp) {
          cc.at(k, l.loop_slot(j, t)) = kBlank;
          cc.at(k == 0 ? 1 : 0, l.loop_slot(j, t)) = kUp;
        }
    Powerword o(n, l.width());
    for (int a = 0; a < n; ++a)
      for (int s = 0; s < l.width(); ++s)
        for (int v = 0; v < l.alphabet_size(s); ++v)
          if (rng() % 5 == 0)
            o.insert({a, s, v});
    for (int s = 0; s < l.width(); ++s)
      o.erase({k, s, cc.at(k, s)});
    for (int a = 0; a < n; ++a)
      for (int t = 0; t < l.num_loops(); ++t)
        o.erase({a, l.loop_slot(k, t), cc.at(a, l.loop_slot(k, t))});
    const bool before = intersects(cc, o);
    intersecting += before;
    mismatches += intersects(drop(sys, cc, k), drop(sys, o, k)) != before;
  }
  const std::string d = "move/drop examples, " + std::to_string(kDropSamples) + " pairs (" +
                        std::to_string(intersecting) + " intersecting), " +
                        std::to_string(mismatches) + " mismatches";
  return mismatches == 0 ? pass(d) : fail(d);
}

} // namespace

int main() {
  const auto prover = fo::discover_prover();
  std::printf("prover: %s\n", prover ? prover->command.front().c_str() : "none");

  struct Criterion {
    int number;
    const char *title;
    std::function<Outcome()> run;
    double budget; // seconds, 0 for none
  };
  const std::vector<Criterion> criteria{
      {1, "oracle safety", oracle_safety, kOracleBudget},
      {2, "trap soundness", trap_soundness, kOracleBudget},
      {3, "worked examples", worked_examples, 0},
      {4, "pumping", pumping, 0},
      {5, "language fidelity", language_fidelity, 0},
      {6, "end-to-end verify", [&] { return end_to_end(prover); }, kVerifyBudget},
      {7, "published languages prove", [&] { return published_languages(prover); }, 0},
      {8, "phi correctness", phi_correctness, 0},
      {9, "move/drop laws", move_drop, 0},
  };

  int failed = 0;
  for (const auto &c : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception &e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (o.kind == Outcome::Kind::Pass && c.budget > 0 && secs > c.budget)
      o = fail(o.detail + " (over " + std::to_string(static_cast<int>(c.budget)) + " s)");
    const char *tag = o.kind == Outcome::Kind::Pass ? "PASS" : o.kind == Outcome::Kind::Fail ? "FAIL" : "SKIP";
    failed += o.kind == Outcome::Kind::Fail;
    std::printf("[%s] %d %s: %s [%.1f s]\n", tag, c.number, c.title, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed ? 1 : 0;
}
