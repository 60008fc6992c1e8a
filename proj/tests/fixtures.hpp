#pragma once

#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "paratrap/model.hpp"
#include "paratrap/word.hpp"

namespace fixtures {

using namespace paratrap;

// Each letter is "loc val1 val2 ..." in variable order. `marks` lists
// (inspector, loop transition, holder); `pointers` gives the holder of each
// global pointer (default: agent 0).
inline Configuration config_of(const ParamSystem &sys, const std::vector<std::string> &letters,
                               const std::vector<std::tuple<int, int, int>> &marks = {},
                               std::vector<int> pointers = {}) {
  const Layout l(sys, static_cast<int>(letters.size()));
  Configuration c(l.size(), l.width());
  for (int a = 0; a < l.size(); ++a) {
    std::istringstream in(letters[static_cast<std::size_t>(a)]);
    std::string loc;
    in >> loc;
    int loc_index = -1;
    for (int k = 0; k < sys.num_locations(); ++k)
      if (sys.location_name(k) == loc)
        loc_index = k;
    if (loc_index < 0)
      throw Error("fixture: unknown location " + loc);
    c.at(a, 0) = static_cast<std::uint8_t>(loc_index);
    for (int v = 0; v < l.num_vars(); ++v) {
      std::string val;
      in >> val;
      c.at(a, l.var_slot(v)) = static_cast<std::uint8_t>(*sys.find_value(v, val));
    }
  }
  for (auto [i, t, j] : marks)
    c.at(j, l.loop_slot(i, t)) = kUp;
  pointers.resize(static_cast<std::size_t>(l.num_pointers()), 0);
  for (int p = 0; p < l.num_pointers(); ++p)
    c.at(pointers[static_cast<std::size_t>(p)], l.pointer_slot(p)) = kUp;
  return c;
}

} // namespace fixtures

namespace fixtures {

// The 7-agent example21 trap, with the mark of agent 5's
// scan at column 2 restored ({↑} at columns 0-3 for 5.t_lp). With
// `as_printed` the column-2 entry is left empty, which is not inductive.
inline Powerword seven_agent_trap(const ParamSystem &sys, bool as_printed = false) {
  const Layout l(sys, 7);
  Powerword o(7, l.width());
  const int brk = *sys.find_state("break"), loop = *sys.find_state("loop");
  const int f = *sys.find_value(0, "false");
  for (int a : {3, 5}) {
    o.insert({a, l.loc_slot(), brk});
    o.insert({a, l.loc_slot(), loop});
    o.insert({a, l.var_slot(0), f});
  }
  for (int a = 0; a <= 5; ++a)
    o.insert({a, l.loop_slot(3, 0), kUp});
  for (int a = 0; a <= 3; ++a)
    if (!(as_printed && a == 2))
      o.insert({a, l.loop_slot(5, 0), kUp});
  return o;
}

} // namespace fixtures

#include "paratrap/abduction.hpp"

namespace fixtures {

// A normalized example21 letter: index name (kNoName for ␣), the allowed
// locations and values of b, and the names whose t_lp entry is {↑}.
inline NormalizedLetter ex21_letter(const ParamSystem &sys, int names, int index,
                                    const std::vector<std::string> &locs,
                                    const std::vector<std::string> &bs,
                                    const std::vector<int> &marked) {
  const NormalizedLayout nl(sys, names);
  NormalizedLetter l;
  l.index = index;
  l.sets.assign(static_cast<std::size_t>(nl.width()), 0);
  for (const auto &q : locs)
    for (int k = 0; k < sys.num_locations(); ++k)
      if (sys.location_name(k) == q)
        l.sets[0] |= std::uint64_t{1} << k;
  for (const auto &b : bs)
    l.sets[static_cast<std::size_t>(nl.var_slot(0))] |= std::uint64_t{1} << *sys.find_value(0, b);
  for (int n : marked)
    l.sets[static_cast<std::size_t>(nl.loop_slot(n, 0))] |= std::uint64_t{1} << kUp;
  return l;
}

// The two-name example21 language A* P0 B* P1 E*.
inline TrapLanguage two_name_language(const ParamSystem &sys) {
  TrapLanguage lang;
  lang.names = 2;
  lang.system = sys.name;
  lang.tokens = {
      {ex21_letter(sys, 2, kNoName, {}, {}, {0, 1}), true},
      {ex21_letter(sys, 2, 0, {"break", "loop"}, {"false"}, {0, 1}), false},
      {ex21_letter(sys, 2, kNoName, {}, {}, {0}), true},
      {ex21_letter(sys, 2, 1, {"break", "loop"}, {"false"}, {0}), false},
      {ex21_letter(sys, 2, kNoName, {}, {}, {}), true},
  };
  return lang;
}

// The name-free example21 language ∅* {initial}/{true} ∅*.
inline TrapLanguage initial_language(const ParamSystem &sys) {
  TrapLanguage lang;
  lang.names = 0;
  lang.system = sys.name;
  lang.tokens = {
      {ex21_letter(sys, 0, kNoName, {}, {}, {}), true},
      {ex21_letter(sys, 0, kNoName, {"initial"}, {"true"}, {}), false},
      {ex21_letter(sys, 0, kNoName, {}, {}, {}), true},
  };
  return lang;
}

} // namespace fixtures
