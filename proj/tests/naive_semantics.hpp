#pragma once

// Direct case-by-case transcription of the step relation, used as an oracle
// for the occurrence-based successor computation.

#include <set>
#include <vector>

#include "paratrap/semantics.hpp"

namespace naive {

using namespace paratrap;

inline std::vector<int> valuation_of(const Layout &l, const Configuration &c, int a) {
  std::vector<int> v;
  for (int k = 0; k < l.num_vars(); ++k)
    v.push_back(c.at(a, l.var_slot(k)));
  return v;
}

inline int holder(const Layout &l, const Configuration &c, int slot) {
  for (int a = 0; a < l.size(); ++a)
    if (c.at(a, slot) == kUp)
      return a;
  return -1;
}

inline void move_mark(const Layout &l, Configuration &c, int slot, int to) {
  for (int a = 0; a < l.size(); ++a)
    c.at(a, slot) = kBlank;
  c.at(to, slot) = kUp;
}

inline std::vector<Configuration> successors(const ParamSystem &sys, const Configuration &c) {
  const Layout l(sys, c.length());
  const int n = l.size();
  std::vector<Configuration> out;
  for (int i = 0; i < n; ++i) {
    const int loc = c.at(i, 0);
    for (const auto &t : sys.local_transitions) {
      if (loc != t.origin)
        continue;
      if (t.pointer_guard) {
        const int h = holder(l, c, l.pointer_slot(t.pointer_guard->pointer));
        if (c.at(h, l.var_slot(t.pointer_guard->var)) != t.pointer_guard->value)
          continue;
      }
      Configuration d = c;
      for (const auto &a : t.assignments)
        d.at(i, l.var_slot(a.var)) = static_cast<std::uint8_t>(a.value);
      d.at(i, 0) = static_cast<std::uint8_t>(t.target);
      if (t.set_pointer_to_self)
        move_mark(l, d, l.pointer_slot(*t.set_pointer_to_self), i);
      out.push_back(d);
    }
    for (int ti = 0; ti < l.num_loops(); ++ti) {
      const auto &t = sys.loop_transitions[static_cast<std::size_t>(ti)];
      const int slot = l.loop_slot(i, ti);
      if (loc == t.origin) {
        Configuration d = c;
        move_mark(l, d, slot, 0);
        d.at(i, 0) = static_cast<std::uint8_t>(sys.loop_location(ti));
        out.push_back(d);
      } else if (loc == sys.loop_location(ti)) {
        const int j = holder(l, c, slot);
        const auto val = valuation_of(l, c, j);
        const bool ok = eval_guard(t.guard, val, i == j);
        Configuration d = c;
        d.at(j, slot) = kBlank;
        if (!ok)
          d.at(i, 0) = static_cast<std::uint8_t>(t.target_fail);
        else if (j == n - 1)
          d.at(i, 0) = static_cast<std::uint8_t>(t.target_succ);
        else
          d.at(j + 1, slot) = kUp;
        if (t.capture && eval_guard(t.capture->when, val, i == j))
          move_mark(l, d, l.pointer_slot(t.capture->pointer), j);
        out.push_back(d);
      }
    }
  }
  return out;
}

} // namespace naive
