#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "fixtures.hpp"
#include "paratrap/abduction.hpp"
#include "paratrap/folcheck.hpp"
#include "paratrap/semantics.hpp"
#include "paratrap/traps.hpp"

using namespace paratrap;
namespace fo = paratrap::fo;

namespace {

Configuration random_config(const ParamSystem &sys, int n, std::mt19937_64 &rng) {
  const Layout l(sys, n);
  Configuration c(n, l.width());
  for (int a = 0; a < n; ++a) {
    const int loc = static_cast<int>(rng() % static_cast<unsigned>(sys.num_locations()));
    c.at(a, l.loc_slot()) = static_cast<std::uint8_t>(loc);
    for (int v = 0; v < l.num_vars(); ++v)
      c.at(a, l.var_slot(v)) = static_cast<std::uint8_t>(rng() % static_cast<unsigned>(l.alphabet_size(l.var_slot(v))));
    for (int t = 0; t < l.num_loops(); ++t)
      if (loc == sys.loop_location(t))
        c.at(static_cast<int>(rng() % static_cast<unsigned>(n)), l.loop_slot(a, t)) = kUp;
  }
  for (int p = 0; p < l.num_pointers(); ++p)
    c.at(static_cast<int>(rng() % static_cast<unsigned>(n)), l.pointer_slot(p)) = kUp;
  REQUIRE(is_well_formed(l, c));
  return c;
}

bool phi_oracle(const ParamSystem &sys, const TrapLanguage &lang, const Configuration &c) {
  bool ok = true;
  for_each_word(lang, c.length(), [&](const NormalizedTrap &w) {
    ok = intersects(c, concretize(sys, w));
    return ok;
  });
  return ok;
}

// (transition index, is loop) of every transition.
std::vector<std::pair<int, bool>> transitions(const ParamSystem &sys) {
  std::vector<std::pair<int, bool>> out;
  for (std::size_t t = 0; t < sys.local_transitions.size(); ++t)
    out.emplace_back(static_cast<int>(t), false);
  for (std::size_t t = 0; t < sys.loop_transitions.size(); ++t)
    out.emplace_back(static_cast<int>(t), true);
  return out;
}

std::vector<Configuration> successors_via(const Instance &inst, const Configuration &c, int t,
                                          bool loop) {
  std::vector<Configuration> out;
  for (const auto &[idx, next] : inst.successors(c)) {
    const Occurrence &o = inst.occurrences()[static_cast<std::size_t>(idx)];
    if (o.transition == t && (o.kind != OccurrenceKind::Local) == loop)
      out.push_back(next);
  }
  return out;
}

bool tau_holds(const ParamSystem &sys, const fo::Formula &tau, const Configuration &c,
               const Configuration &next) {
  return fo::evaluate(fo::encode(sys, c, &next), tau);
}

std::string write_script(const std::string &name, const std::string &body) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << "#!/bin/sh\n" << body << "\n";
  std::filesystem::permissions(path, std::filesystem::perms::owner_all);
  return path.string();
}

} // namespace

TEST_CASE("formula constructors simplify") {
  using F = fo::Formula;
  const F p = F::pred("p", {});
  CHECK(F::conj({}) == F::truth());
  CHECK(F::disj({}) == F::falsity());
  CHECK(F::conj({p}) == p);
  CHECK(F::conj({p, F::falsity()}) == F::falsity());
  CHECK(F::disj({p, F::truth()}) == F::truth());
  CHECK(F::negate(F::negate(p)) == p);
  CHECK(F::implies(F::truth(), p) == p);
  CHECK(F::forall({}, p) == p);
  CHECK(F::conj({F::conj({p, p}), p}).children.size() == 3);
}

TEST_CASE("eta holds on well-formed configurations") {
  std::mt19937_64 rng(3);
  for (const auto &name : builtin_names()) {
    const ParamSystem sys = builtin(name);
    const fo::Formula eta = fo::build_eta(sys);
    for (int rep = 0; rep < 50; ++rep) {
      const Configuration c = random_config(sys, 3, rng);
      fo::Structure s = fo::encode(sys, c);
      CHECK(fo::evaluate(s, eta));
      // a second location for agent 1 breaks it
      const int other = (c.at(1, 0) + 1) % sys.num_locations();
      s.preds[fo::loc_symbol(sys, other, false)][1] = true;
      CHECK_FALSE(fo::evaluate(s, eta));
    }
  }
}

TEST_CASE("psi holds exactly on standard orders with two or more elements") {
  const fo::Formula psi = fo::build_psi();
  CHECK_FALSE(fo::evaluate(fo::Structure::standard(1), psi));
  for (int n = 2; n <= 6; ++n)
    CHECK(fo::evaluate(fo::Structure::standard(n), psi));
  fo::Structure bad = fo::Structure::standard(4);
  bad.fns["succ"][0] = 2; // skips 1
  CHECK_FALSE(fo::evaluate(bad, psi));
  bad = fo::Structure::standard(4);
  bad.preds["leq"][3 * 4 + 0] = true; // no longer antisymmetric
  CHECK_FALSE(fo::evaluate(bad, psi));
}

TEST_CASE("size floor") {
  for (int k = 1; k <= 4; ++k)
    for (int n = 1; n <= 5; ++n)
      CHECK(fo::evaluate(fo::Structure::standard(n), fo::build_size_floor(k)) == (n >= k));
}

TEST_CASE("phi agrees with the word semantics") {
  std::mt19937_64 rng(5);
  const ParamSystem sys = builtin("example21");
  std::vector<TrapLanguage> langs{fixtures::two_name_language(sys), fixtures::initial_language(sys)};
  if (auto l = abduct(sys, normalize(sys, fixtures::seven_agent_trap(sys)), {7}))
    langs.push_back(*l);
  REQUIRE(langs.size() == 3);
  int satisfied = 0, total = 0;
  for (const auto &lang : langs) {
    const fo::Formula phi = fo::build_phi(sys, {lang});
    for (int n = 1; n <= 5; ++n)
      for (int rep = 0; rep < 200; ++rep) {
        const Configuration c = random_config(sys, n, rng);
        const bool want = phi_oracle(sys, lang, c);
        satisfied += want;
        ++total;
        CHECK(fo::evaluate(fo::encode(sys, c), phi) == want);
      }
  }
  CHECK(satisfied > total / 10);
  CHECK(satisfied < total * 9 / 10);
}

TEST_CASE("phi agrees with the word semantics on abducted pointer languages") {
  std::mt19937_64 rng(9);
  int languages = 0;
  for (const char *name : {"dijkstra", "eisenberg_mcguire"}) {
    const ParamSystem sys = builtin(name);
    const Instance inst(sys, 4);
    const CegarResult res = cegar(inst, sys.property("mutex"));
    REQUIRE(res.verdict == CegarResult::Verdict::Proved);
    for (const auto &o : res.traps) {
      const auto lang = abduct(sys, normalize(sys, o), {4});
      if (!lang)
        continue;
      ++languages;
      const fo::Formula phi = fo::build_phi(sys, {*lang});
      for (int n = 2; n <= 5; ++n)
        for (int rep = 0; rep < 40; ++rep) {
          Configuration c = random_config(sys, n, rng);
          CAPTURE(name);
          CHECK(fo::evaluate(fo::encode(sys, c), phi) == phi_oracle(sys, *lang, c));
        }
    }
  }
  CHECK(languages > 0);
}

TEST_CASE("phi rejects languages it cannot encode") {
  const ParamSystem sys = builtin("example21");
  TrapLanguage lang = fixtures::initial_language(sys);
  CHECK_NOTHROW(fo::build_phi(sys, {lang}));
  // two stars with no letter between them
  TrapLanguage two = lang;
  two.tokens.insert(two.tokens.begin() + 1, two.tokens[0]);
  two.tokens[1].letter.sets[0] = 1;
  CHECK_THROWS_AS(fo::build_phi(sys, {two}), Error);
  CHECK_THROWS_AS(fo::build_phi(sys, {fixtures::two_name_language(sys)}, 1), Error);
}

TEST_CASE("abducted languages keep a letter between stars") {
  const ParamSystem sys = builtin("example21");
  for (int n : {4, 5}) {
    const Instance inst(sys, n);
    const CegarResult res = cegar(inst, sys.property("mutex"));
    for (const auto &o : res.traps)
      if (const auto lang = abduct(sys, normalize(sys, o), {n})) {
        for (std::size_t k = 1; k < lang->tokens.size(); ++k)
          CHECK_FALSE((lang->tokens[k].star && lang->tokens[k - 1].star));
        CHECK_NOTHROW(fo::build_phi(sys, {*lang}));
      }
  }
}

TEST_CASE("tau agrees with the successor relation on all pairs of two agents") {
  const ParamSystem sys = builtin("example21");
  const Instance inst(sys, 2);
  const auto all = all_configurations(inst.layout(), 10'000);
  for (const auto &[t, loop] : transitions(sys)) {
    const fo::Formula tau = fo::build_tau(sys, t, loop);
    int steps = 0;
    for (const auto &c : all) {
      const auto succ = successors_via(inst, c, t, loop);
      for (const auto &d : all) {
        const bool want = std::find(succ.begin(), succ.end(), d) != succ.end();
        steps += want;
        if (tau_holds(sys, tau, c, d) != want) {
          CAPTURE(t);
          CAPTURE(loop);
          CAPTURE(render_configuration(inst.layout(), c));
          CAPTURE(render_configuration(inst.layout(), d));
          CHECK(tau_holds(sys, tau, c, d) == want);
        }
      }
    }
    CHECK(steps > 0);
  }
}

TEST_CASE("tau agrees with the successor relation on sampled pairs") {
  std::mt19937_64 rng(13);
  for (const auto &name : builtin_names()) {
    const ParamSystem sys = builtin(name);
    for (int n : {2, 3}) {
      const Instance inst(sys, n);
      const auto reach = reachable(inst, 400).states;
      for (const auto &[t, loop] : transitions(sys)) {
        const fo::Formula tau = fo::build_tau(sys, t, loop);
        for (int rep = 0; rep < 40; ++rep) {
          const Configuration c = rep % 2 ? random_config(sys, n, rng)
                                          : reach[rng() % reach.size()];
          const auto succ = successors_via(inst, c, t, loop);
          std::vector<Configuration> candidates = succ;
          for (int k = 0; k < 4; ++k)
            candidates.push_back(random_config(sys, n, rng));
          // near misses: one changed cell of a successor
          for (const auto &d : succ) {
            Configuration e = d;
            const int a = static_cast<int>(rng() % static_cast<unsigned>(n));
            const int s = static_cast<int>(rng() % (1 + static_cast<unsigned>(inst.layout().num_vars())));
            e.at(a, s) = static_cast<std::uint8_t>((e.at(a, s) + 1) % inst.layout().alphabet_size(s));
            if (is_well_formed(inst.layout(), e))
              candidates.push_back(e);
          }
          for (const auto &d : candidates) {
            const bool want = std::find(succ.begin(), succ.end(), d) != succ.end();
            CAPTURE(name);
            CAPTURE(t);
            CAPTURE(loop);
            CHECK(tau_holds(sys, tau, c, d) == want);
          }
        }
      }
    }
  }
}

TEST_CASE("property and initial formulas agree with direct evaluation") {
  std::mt19937_64 rng(17);
  for (const auto &name : builtin_names()) {
    const ParamSystem sys = builtin(name);
    const fo::Formula init = fo::build_initial(sys);
    for (int n = 1; n <= 4; ++n) {
      CHECK(fo::evaluate(fo::encode(sys, initial_config(sys, n)), init));
      for (int rep = 0; rep < 60; ++rep) {
        const Configuration c = rep % 3 ? random_config(sys, n, rng) : reachable(sys, n, 200).states.back();
        const fo::Structure s = fo::encode(sys, c);
        for (const auto &p : sys.properties) {
          CHECK(fo::evaluate(s, fo::build_property(sys, p.formula, false)) == holds(sys, p.formula, c));
          CHECK(fo::evaluate(fo::encode(sys, c, &c), fo::build_property(sys, p.formula, true)) ==
                holds(sys, p.formula, c));
        }
        bool all_initial = true;
        const Layout l(sys, n);
        for (int a = 0; a < n; ++a) {
          all_initial = all_initial && c.at(a, 0) == sys.initial_state;
          for (int v = 0; v < l.num_vars(); ++v)
            all_initial = all_initial && c.at(a, l.var_slot(v)) == sys.vars[static_cast<std::size_t>(v)].initial;
        }
        CHECK(fo::evaluate(s, init) == all_initial);
      }
    }
  }
}

TEST_CASE("problem set layout") {
  const ParamSystem sys = builtin("example21");
  const auto probs = fo::build_problems(sys, {fixtures::two_name_language(sys)}, sys.property("mutex"),
                                        {3});
  REQUIRE(probs.size() == sys.local_transitions.size() + sys.loop_transitions.size() + 1);
  CHECK(probs.front().name == "example21_" + sys.local_transitions[0].name);
  CHECK(probs[probs.size() - 2].name == "example21_t_lp");
  CHECK(probs.back().name == "example21_initial");
  std::vector<std::string> names;
  for (const auto &a : probs[0].axioms)
    names.push_back(a.name);
  CHECK(names == std::vector<std::string>{"eta", "eta_p", "psi", "phi_1", "size_floor",
                                          "tau_" + sys.local_transitions[0].name, "prop"});
  CHECK(probs[0].conjecture.name == "prop_p");
  CHECK(probs.back().conjecture.name == "prop");
}

TEST_CASE("tptp printing") {
  using F = fo::Formula;
  using T = fo::Term;
  const F f = F::forall({"X", "Y"},
                        F::implies(F::conj({fo::leq(T::var("X"), T::var("Y")), F::pred("p", {T::var("X")})}),
                                   F::disj({F::neq(T::var("X"), fo::zero()),
                                            F::negate(F::pred("q", {fo::succ(T::var("Y"))}))})));
  CHECK(fo::to_tptp(f) == "(! [X,Y] : ((leq(X,Y) & p(X)) => (X != zero | ~ q(succ(Y)))))");
  CHECK(fo::to_tptp(fo::build_psi()) ==
        "((! [X] : leq(X,X)) & (! [X,Y] : ((leq(X,Y) & leq(Y,X)) => X = Y)) & "
        "(! [X,Y,Z] : ((leq(X,Y) & leq(Y,Z)) => leq(X,Z))) & (! [X,Y] : (leq(X,Y) | leq(Y,X))) & "
        "(! [X] : leq(zero,X)) & (! [X] : leq(X,last)) & zero != last & "
        "(! [X] : (X != last => (leq(X,succ(X)) & X != succ(X) & ~ (? [Y] : (leq(X,Y) & X != Y & "
        "leq(Y,succ(X)) & Y != succ(X)))))))");
  fo::Problem p{"tiny", {{"ax", F::pred("a", {})}}, {"goal", F::truth()}, "a comment"};
  CHECK(fo::emit_tptp(p) == "% tiny\n% a comment\nfof(ax, axiom, a).\nfof(goal, conjecture, $true).\n");
}

TEST_CASE("tptp round trip") {
  for (const auto &name : builtin_names()) {
    const ParamSystem sys = builtin(name);
    std::vector<TrapLanguage> langs;
    if (name == "example21")
      langs = {fixtures::two_name_language(sys), fixtures::initial_language(sys)};
    for (const auto &p : sys.properties)
      for (const auto &prob : fo::build_problems(sys, langs, p, {2})) {
        CAPTURE(prob.name);
        CHECK(fo::parse_tptp(fo::emit_tptp(prob)) == prob);
      }
  }
}

TEST_CASE("tptp parse errors") {
  CHECK_THROWS_AS(fo::parse_tptp("fof(a, axiom, p)."), Error);
  CHECK_THROWS_AS(fo::parse_tptp("fof(a, conjecture, (p & q | r))."), Error);
  CHECK_THROWS_AS(fo::parse_tptp("fof(a, lemma, p)."), Error);
  CHECK_THROWS_AS(fo::parse_tptp("fof(a, conjecture, X)."), Error);
  CHECK_THROWS_AS(fo::parse_tptp("cnf(a, conjecture, p)."), Error);
  const fo::Problem p = fo::parse_tptp("fof(a, conjecture, (p => q)).");
  CHECK(p.conjecture.formula.kind == fo::Formula::Kind::Implies);
}

TEST_CASE("szs status mapping") {
  CHECK(fo::status_from_szs("Theorem") == fo::Status::Theorem);
  CHECK(fo::status_from_szs("Unsatisfiable") == fo::Status::Theorem);
  CHECK(fo::status_from_szs("CounterSatisfiable") == fo::Status::CounterSatisfiable);
  CHECK(fo::status_from_szs("Satisfiable") == fo::Status::CounterSatisfiable);
  CHECK(fo::status_from_szs("Timeout") == fo::Status::Timeout);
  CHECK(fo::status_from_szs("GaveUp") == fo::Status::Error);
  CHECK(fo::to_string(fo::Status::CounterSatisfiable) == "countersatisfiable");
}

TEST_CASE("run_prover with scripted provers") {
  const std::string tptp = "fof(g, conjecture, $true).\n";
  fo::ProverConfig cfg;
  cfg.timeout_seconds = 1;

  cfg.command = {write_script("paratrap-fake-yes", "grep -q conjecture \"$2\" && echo '% SZS status Theorem'"),
                 "{timeout}"};
  fo::Verdict v = fo::run_prover(tptp, cfg);
  CHECK(v.status == fo::Status::Theorem);
  CHECK(v.szs == "Theorem");

  cfg.command = {write_script("paratrap-fake-no", "echo '# SZS status CounterSatisfiable for x'"), "{file}"};
  CHECK(fo::run_prover(tptp, cfg).status == fo::Status::CounterSatisfiable);

  cfg.command = {write_script("paratrap-fake-silent", "echo something else; exit 3")};
  v = fo::run_prover(tptp, cfg);
  CHECK(v.status == fo::Status::Error);
  CHECK(v.message == "something else");

  cfg.command = {"/nonexistent/prover"};
  CHECK(fo::run_prover(tptp, cfg).status == fo::Status::Error);

  cfg.timeout_seconds = 0;
  cfg.command = {write_script("paratrap-fake-slow", "sleep 30")};
  v = fo::run_prover(tptp, cfg);
  CHECK(v.status == fo::Status::Timeout);
  CHECK(v.seconds < 20);
}

TEST_CASE("discover_prover honours explicit paths") {
  CHECK_FALSE(fo::discover_prover("/nonexistent/prover"));
  const auto cfg = fo::discover_prover(write_script("my-vampire", "true"), 7);
  REQUIRE(cfg);
  CHECK(cfg->command.at(1) == "--mode");
  CHECK(cfg->timeout_seconds == 7);
}

TEST_CASE("inductivity with an installed prover") {
  const auto cfg = fo::discover_prover({}, 60);
  if (!cfg) {
    MESSAGE("no prover found; skipping");
    return;
  }
  const ParamSystem sys = builtin("example21");
  std::vector<TrapLanguage> langs{fixtures::two_name_language(sys), fixtures::initial_language(sys)};
  const fo::InductivityReport r = fo::check_inductivity(sys, langs, sys.property("mutex"), *cfg);
  for (const auto &e : r.entries) {
    CAPTURE(e.problem);
    CAPTURE(e.verdict.message);
    CHECK(e.verdict.status == fo::Status::Theorem);
  }
  CHECK(r.single_agent_ok);
  CHECK(r.proved);

  fo::Problem bad{"bad", {}, {"goal", fo::Formula::pred("p", {})}, ""};
  CHECK(fo::run_prover(fo::emit_tptp(bad), *cfg).status == fo::Status::CounterSatisfiable);
}
