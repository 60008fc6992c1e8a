#include "paratrap/model.hpp"

#include <array>
#include <utility>

namespace paratrap {
namespace {

// Reduced Dijkstra: one boolean flag, a single non-atomic scan.
constexpr std::string_view kExample21 = R"(system example21
states: initial loop break critical done
init: initial
var b : { true false } = false
local initial -> loop { b := true }
local break -> initial { b := false }
local critical -> done { }
local done -> initial { b := false }
looptrans t_lp : loop [ self | b = false ] ? critical : break
property mutex : !atLeast(2, state=critical)
property never_critical : !atLeast(1, state=critical)
)";

// Dijkstra 1965. The `k != i` / `k == i` test is not expressible with pointer
// guards, so both branches at l1 are enabled; the c-scan alone guards the
// critical section.
constexpr std::string_view kDijkstra = R"(system dijkstra
states: rem l1 l2 l4 cs
init: rem
var b : { true false } = true
var c : { true false } = true
pointer k
local rem -> l1 { b := false }
local l1 -> l2 { c := true }
local claim : l2 -> l1 { } when k.b == true set k := self
local retry : l2 -> l1 { } when k.b == false
local l1 -> l4 { c := false }
looptrans scan : l4 [ self | c = true ] ? cs : l1
local cs -> rem { c := true, b := true }
property mutex : !atLeast(2, state=cs)
)";

// Knuth 1966. The first scan starts at the turn holder in the original; here
// every scan starts at agent 0.
constexpr std::string_view kKnuth = R"(system knuth
states: rem l1 l2 l3 retry cs
init: rem
var control : { idle want inside } = idle
pointer k
local rem -> l1 { control := want }
looptrans wait : l1 [ self | control = idle ] ? l2 : l1
local l2 -> l3 { control := inside }
looptrans check : l3 [ self | !(control = inside) ] ? cs : retry
local retry -> l1 { control := want }
local leave : cs -> rem { control := idle } set k := self
local give_up : l1 -> l2 { } when k.control == idle
property mutex : !atLeast(2, state=cs)
)";

// de Bruijn 1967: Knuth's protocol with a lazier turn update on exit.
constexpr std::string_view kDeBruijn = R"(system debruijn
states: rem l1 l2 l3 retry cs ex
init: rem
var control : { idle want inside } = idle
pointer k
local rem -> l1 { control := want }
looptrans wait : l1 [ self | control = idle ] ? l2 : l1
local l2 -> l3 { control := inside }
looptrans check : l3 [ self | !(control = inside) ] ? cs : retry
local retry -> l1 { control := want }
local cs -> ex { }
local pass_turn : ex -> rem { control := idle } when k.control == idle set k := self
local keep_turn : ex -> rem { control := idle } when k.control == want
local keep_turn_inside : ex -> rem { control := idle } when k.control == inside
property mutex : !atLeast(2, state=cs)
)";

// Eisenberg & McGuire 1972. `turn = i or flags[turn] = idle` is widened to
// `flags[turn] != waiting`; the exit scan hands the turn to the first
// non-idle agent it meets.
constexpr std::string_view kEisenbergMcGuire = R"(system eisenberg_mcguire
states: rem w a chk reset t1 t2 cs ex
init: rem
var flag : { idle waiting active } = idle
pointer turn
local rem -> w { flag := waiting }
looptrans wait : w [ self | flag = idle ] ? a : w
local a -> chk { flag := active }
looptrans check : chk [ self | !(flag = active) ] ? t1 : reset
local reset -> w { flag := waiting }
local turn_idle : t1 -> t2 { } when turn.flag == idle
local turn_active : t1 -> t2 { } when turn.flag == active
local turn_busy : t1 -> reset { } when turn.flag == waiting
local enter : t2 -> cs { } set turn := self
looptrans handoff : cs [ true ] ? ex : ex capture turn when !self & !(flag = idle)
local ex -> rem { flag := idle }
property mutex : !atLeast(2, state=cs)
)";

constexpr std::array<std::pair<std::string_view, std::string_view>, 5> kBuiltins{{
    {"example21", kExample21},
    {"dijkstra", kDijkstra},
    {"knuth", kKnuth},
    {"debruijn", kDeBruijn},
    {"eisenberg_mcguire", kEisenbergMcGuire},
}};

} // namespace

std::vector<std::string> builtin_names() {
  std::vector<std::string> names;
  for (const auto &[name, _] : kBuiltins)
    names.emplace_back(name);
  return names;
}

std::string_view builtin_source(std::string_view name) {
  for (const auto &[n, src] : kBuiltins)
    if (n == name)
      return src;
  throw ModelError("unknown builtin system '" + std::string(name) + "'");
}

ParamSystem builtin(std::string_view name) { return parse_system(builtin_source(name)); }

} // namespace paratrap
