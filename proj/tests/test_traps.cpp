#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "paratrap/traps.hpp"

using namespace paratrap;

namespace {

const ParamSystem &ex21() {
  static const ParamSystem sys = builtin("example21");
  return sys;
}

Powerword random_powerword(std::mt19937_64 &rng, const Layout &l, double density) {
  Powerword o(l.size(), l.width());
  std::bernoulli_distribution pick(density);
  for (int a = 0; a < l.size(); ++a)
    for (int s = 0; s < l.width(); ++s)
      for (int v = 0; v < l.alphabet_size(s); ++v)
        if (pick(rng))
          o.insert({a, s, v});
  return o;
}

int count_state(const ParamSystem &sys, const Configuration &c, const std::string &q) {
  int n = 0;
  for (int a = 0; a < c.length(); ++a)
    n += c.at(a, 0) == *sys.find_state(q);
  return n;
}

} // namespace

TEST_CASE("the 7-agent example trap") {
  const Instance inst(ex21(), 7);
  const Powerword o = fixtures::seven_agent_trap(ex21());
  CHECK(is_trap_structural(inst, o));
  CHECK_FALSE(find_trap_violation(inst, o));
  CHECK(intersects(inst.initial(), o));

  // As printed, agent 5's scan can advance from column 1 to 2 and leave the trap.
  const Powerword printed = fixtures::seven_agent_trap(ex21(), true);
  const auto check = check_trap_structural(inst, printed);
  REQUIRE(check.violating_occurrence);
  const auto &bad = inst.occurrences()[static_cast<std::size_t>(*check.violating_occurrence)];
  CHECK(bad.kind == OccurrenceKind::LoopAdvance);
  CHECK(bad.actor == 5);
  CHECK(bad.inspectee == 1);
  const auto witness = find_trap_violation(inst, printed);
  REQUIRE(witness);
  CHECK(intersects(witness->before, printed));
  CHECK_FALSE(intersects(witness->after, printed));
}

TEST_CASE("removing agent 3's false value breaks the example trap") {
  const Instance inst(ex21(), 7);
  Powerword o = fixtures::seven_agent_trap(ex21());
  o.erase({3, inst.layout().var_slot(0), *ex21().find_value(0, "false")});
  const auto check = check_trap_structural(inst, o);
  CHECK(check.initial_intersects);
  REQUIRE(check.violating_occurrence);
  // A genuine semantic witness exists, so this is not a trap at all.
  const auto witness = find_trap_violation(inst, o);
  REQUIRE(witness);
  CHECK(is_well_formed(inst.layout(), witness->before));
  CHECK(apply(inst.occurrences()[static_cast<std::size_t>(witness->occurrence)],
              witness->before) == witness->after);
  CHECK(intersects(witness->before, o));
  CHECK_FALSE(intersects(witness->after, o));
}

TEST_CASE("the empty powerword is not a trap") {
  for (int n = 1; n <= 3; ++n) {
    const Instance inst(ex21(), n);
    const Powerword none(n, inst.layout().width());
    CHECK_FALSE(is_trap_structural(inst, none));
    CHECK_FALSE(is_trap_exact(inst, none));
  }
  const Instance inst(ex21(), 3);
  CHECK_THROWS_AS(is_trap_structural(inst, Powerword(2, inst.layout().width())), Error);
}

TEST_CASE("exact check guards its size") {
  const Instance inst(ex21(), 4);
  const Powerword all = singleton_powerword(inst.initial());
  CHECK_THROWS_AS(is_trap_exact(inst, all, 100), Error);
}

TEST_CASE("structural implies exact, and SAT witness search matches brute force") {
  const Instance inst(ex21(), 2);
  const Layout &l = inst.layout();
  std::mt19937_64 rng(2024);
  int structural = 0, exact = 0;
  // Random powerwords plus random trap-CNF models, which are structural by
  // construction and exercise the positive side.
  TrapCnf t = encode_trap_constraints(inst);
  for (int round = 0; round < 400; ++round) {
    Powerword o(2, l.width());
    if (round % 2 == 0) {
      o = random_powerword(rng, l, 0.1 + 0.4 * (round % 7) / 7.0);
    } else {
      sat::CdclSolver::Options opt;
      opt.seed = static_cast<std::uint64_t>(round) + 1;
      sat::CdclSolver s(opt);
      s.load(t.cnf);
      std::vector<int> assume;
      std::uniform_int_distribution<int> cell(0, t.cells.count() - 1);
      for (int k = 0; k < 4; ++k)
        assume.push_back(rng() & 1 ? cell(rng) + 1 : -(cell(rng) + 1));
      if (s.solve(assume) != sat::Result::Sat)
        continue;
      o = decode_trap(l, t.cells, s);
      REQUIRE(is_trap_structural(inst, o));
    }
    const bool st = is_trap_structural(inst, o);
    const bool ex = is_trap_exact(inst, o);
    structural += st;
    exact += ex;
    if (st)
      CHECK(ex);
    const bool sat_inductive = !find_trap_violation(inst, o);
    CHECK(ex == (intersects(inst.initial(), o) && sat_inductive));
  }
  CHECK(structural > 50);
  CHECK(exact >= structural);
}

TEST_CASE("trap encoding shape") {
  const Instance inst(ex21(), 2);
  const TrapCnf t = encode_trap_constraints(inst);
  CHECK(t.constraints == inst.occurrences().size() + 1);
  std::size_t clauses = 1;
  for (const auto &o : inst.occurrences())
    clauses += o.changed_pre.size();
  CHECK(t.cnf.clauses.size() == clauses);
  CHECK(t.cnf.num_vars == t.cells.count());
  for (int k = 0; k < t.cells.count(); ++k)
    CHECK(t.cells.index(t.cells.cell(k)) == k);

  sat::CdclSolver s;
  s.load(t.cnf);
  CHECK(s.solve() == sat::Result::Sat);
  CHECK(is_trap_structural(inst, decode_trap(inst.layout(), t.cells, s)));
}

TEST_CASE("counterexample without traps") {
  const Instance inst(ex21(), 2);
  const auto &mutex = ex21().property("mutex").formula;
  const auto cx = find_counterexample(inst, {}, mutex);
  REQUIRE(cx);
  CHECK(is_well_formed(inst.layout(), cx->before));
  CHECK(holds(ex21(), mutex, cx->before));
  CHECK(count_state(ex21(), cx->after, "critical") == 2);
  CHECK(apply(inst.occurrences()[static_cast<std::size_t>(cx->occurrence)], cx->before) ==
        cx->after);

  CounterexampleOptions loose;
  loose.assume_property_before = false;
  CHECK(find_counterexample(inst, {}, mutex, loose));
}

TEST_CASE("no counterexample for a system without transitions") {
  const ParamSystem sys = parse_system("system lone\nstates: s\ninit: s\n"
                                       "property p : !atLeast(1, state=s)\n");
  const Instance inst(sys, 2);
  CHECK_FALSE(find_counterexample(inst, {}, sys.property("p").formula));
}

TEST_CASE("excluding trap") {
  const Instance inst(ex21(), 2);
  const Configuration both = fixtures::config_of(ex21(), {"critical true", "critical true"});
  const auto o = find_excluding_trap(inst, both);
  REQUIRE(o);
  CHECK(is_trap_structural(inst, *o));
  CHECK_FALSE(intersects(both, *o));
  CHECK(is_trap_exact(inst, *o));

  const auto raw = find_excluding_trap(inst, both, false);
  REQUIRE(raw);
  CHECK(is_trap_structural(inst, *raw));
  CHECK(o->cells().size() <= raw->cells().size());

  CHECK_FALSE(find_excluding_trap(inst, inst.initial()));
}

TEST_CASE("minimized traps are subset-minimal") {
  const Instance inst(ex21(), 2);
  const Configuration both = fixtures::config_of(ex21(), {"critical true", "critical true"});
  const auto o = find_excluding_trap(inst, both);
  REQUIRE(o);
  // No proper subset obtained by dropping one cell is still a trap avoiding C.
  const TrapCnf t = encode_trap_constraints(inst);
  for (const Cell &m : o->cells()) {
    sat::CdclSolver s;
    s.load(t.cnf);
    std::vector<int> assume;
    for (int a = 0; a < 2; ++a)
      for (int sl = 0; sl < both.width(); ++sl)
        assume.push_back(-(t.cells.index(a, sl, both.at(a, sl)) + 1));
    for (int k = 0; k < t.cells.count(); ++k)
      if (!o->contains(t.cells.cell(k)) || t.cells.cell(k) == m)
        assume.push_back(-(k + 1));
    CHECK(s.solve(assume) == sat::Result::Unsat);
  }
}

TEST_CASE("cegar proves mutex and every trap holds on all reachable configurations") {
  for (int n = 1; n <= 4; ++n) {
    CAPTURE(n);
    const Instance inst(ex21(), n);
    const auto res = cegar(inst, ex21().property("mutex"));
    REQUIRE(res.verdict == CegarResult::Verdict::Proved);
    if (n == 1)
      CHECK(res.traps.empty());
    else
      CHECK_FALSE(res.traps.empty());
    const auto reach = reachable(inst);
    REQUIRE_FALSE(reach.truncated);
    for (const auto &o : res.traps) {
      CHECK(is_trap_structural(inst, o));
      for (const auto &c : reach.states)
        REQUIRE(intersects(c, o));
    }
    CHECK_FALSE(find_counterexample(inst, res.traps, ex21().property("mutex").formula));
    const auto explicit_verdict = check_property_explicit(ex21(), n, ex21().property("mutex"));
    CHECK(explicit_verdict.status == ExplicitVerdict::Status::Holds);
  }
}

TEST_CASE("cegar does not prove a violated property") {
  const Instance inst(ex21(), 3);
  const auto res = cegar(inst, ex21().property("never_critical"));
  CHECK(res.verdict == CegarResult::Verdict::Unknown);
  REQUIRE(res.counterexample);
  CHECK(count_state(ex21(), res.counterexample->after, "critical") >= 1);
  CHECK(check_property_explicit(ex21(), 3, ex21().property("never_critical")).status ==
        ExplicitVerdict::Status::Violated);

  const ParamSystem bad = parse_system("system b\nstates: s\ninit: s\n"
                                       "property p : !atLeast(1, state=s)\n");
  const auto r0 = cegar(Instance(bad, 2), bad.property("p"));
  CHECK(r0.verdict == CegarResult::Verdict::Unknown);
  CHECK(r0.iterations == 0);
}

TEST_CASE("cegar with seeds and an iteration cap") {
  const Instance inst(ex21(), 3);
  const auto first = cegar(inst, ex21().property("mutex"));
  REQUIRE(first.verdict == CegarResult::Verdict::Proved);
  Powerword junk(3, inst.layout().width());
  auto seeded = first.traps;
  seeded.push_back(junk);
  const auto again = cegar(inst, ex21().property("mutex"), {}, seeded);
  CHECK(again.verdict == CegarResult::Verdict::Proved);
  CHECK(again.seeded == first.traps.size());
  CHECK(again.traps.size() == first.traps.size());
  CHECK(again.iterations == 1);

  CegarOptions capped;
  capped.max_iterations = 1;
  const auto stopped = cegar(inst, ex21().property("mutex"), capped);
  CHECK(stopped.verdict == CegarResult::Verdict::Unknown);
  CHECK(stopped.reason.find("cap") != std::string::npos);
}

TEST_CASE("adding traps only shrinks the counterexample space") {
  const Instance inst(ex21(), 3);
  const auto &mutex = ex21().property("mutex").formula;
  const auto res = cegar(inst, ex21().property("mutex"));
  REQUIRE(res.verdict == CegarResult::Verdict::Proved);
  std::vector<Powerword> prefix;
  for (const auto &o : res.traps) {
    const auto before = find_counterexample(inst, prefix, mutex);
    prefix.push_back(o);
    const auto after = find_counterexample(inst, prefix, mutex);
    if (!before)
      CHECK_FALSE(after);
    if (after) {
      REQUIRE(before);
      for (const auto &p : prefix)
        CHECK(intersects(after->before, p));
    }
  }
}

TEST_CASE("pointer systems") {
  for (const std::string name : {"dijkstra", "knuth", "eisenberg_mcguire"}) {
    CAPTURE(name);
    const ParamSystem sys = builtin(name);
    const Instance inst(sys, 2);
    const auto res = cegar(inst, sys.property("mutex"));
    if (res.verdict == CegarResult::Verdict::Proved) {
      const auto reach = reachable(inst);
      for (const auto &o : res.traps)
        for (const auto &c : reach.states)
          REQUIRE(intersects(c, o));
    }
    const std::string verdict =
        res.verdict == CegarResult::Verdict::Proved ? "proved" : "unknown";
    MESSAGE(name << " N=2: " << verdict << " with " << res.traps.size() << " traps");
  }
}

TEST_CASE("DIMACS emission") {
  const auto dir = std::filesystem::temp_directory_path() / "paratrap-test-cnf";
  std::filesystem::remove_all(dir);
  CegarOptions opt;
  opt.emit_cnf_dir = dir.string();
  const Instance inst(ex21(), 2);
  cegar(inst, ex21().property("mutex"), opt);
  for (const char *f : {"example21_n2_traps.cnf", "example21_n2_counterexample.cnf"}) {
    std::ifstream in(dir / f);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    const sat::Cnf cnf = sat::parse_dimacs(ss.str());
    CHECK(cnf.num_vars > 0);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("powerword rendering") {
  const Layout l(ex21(), 7);
  const std::string s = render_powerword(l, fixtures::seven_agent_trap(ex21()));
  std::istringstream in(s);
  std::string header, loc, var;
  std::getline(in, header);
  std::getline(in, loc);
  std::getline(in, var);
  CHECK(loc == "loc     ∅    ∅    ∅    {loop, break}  ∅    {loop, break}  ∅");
  CHECK(var == "b       ∅    ∅    ∅    {false}        ∅    {false}        ∅");
}
