#include "paratrap/semantics.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <unordered_map>

#include "text_util.hpp"

namespace paratrap {

std::string to_string(OccurrenceKind k) {
  switch (k) {
  case OccurrenceKind::Local:
    return "local";
  case OccurrenceKind::LoopStart:
    return "loop_start";
  case OccurrenceKind::LoopAdvance:
    return "loop_advance";
  case OccurrenceKind::LoopFail:
    return "loop_fail";
  case OccurrenceKind::LoopSucceed:
    return "loop_succeed";
  }
  return "?";
}

Configuration initial_config(const ParamSystem &sys, int size) {
  const Layout layout(sys, size);
  Configuration c(size, layout.width());
  for (int a = 0; a < size; ++a) {
    c.at(a, layout.loc_slot()) = static_cast<std::uint8_t>(sys.initial_state);
    for (int v = 0; v < layout.num_vars(); ++v)
      c.at(a, layout.var_slot(v)) =
          static_cast<std::uint8_t>(sys.vars[static_cast<std::size_t>(v)].initial);
  }
  for (int p = 0; p < layout.num_pointers(); ++p)
    c.at(0, layout.pointer_slot(p)) = kUp;
  return c;
}

namespace {

// Collects per-(agent, slot) requirements; a conflicting pair of demands
// marks the candidate occurrence as impossible.
class OccurrenceBuilder {
public:
  void require(int agent, int slot, int value) {
    auto [it, fresh] = cells_.try_emplace({agent, slot}, Entry{value, value});
    if (!fresh && it->second.from != value)
      ok_ = false;
  }

  void change(int agent, int slot, int from, int to) {
    auto [it, fresh] = cells_.try_emplace({agent, slot}, Entry{from, to, true});
    if (fresh)
      return;
    Entry &e = it->second;
    if (e.from != from || (e.written && e.to != to))
      ok_ = false;
    e.to = to;
    e.written = true;
  }

  bool ok() const { return ok_; }

  Occurrence finish(OccurrenceKind kind, int transition, int actor, int inspectee) const {
    Occurrence o;
    o.kind = kind;
    o.transition = transition;
    o.actor = actor;
    o.inspectee = inspectee;
    for (const auto &[key, e] : cells_) {
      if (e.from == e.to) {
        o.guard.push_back({key.first, key.second, e.from});
      } else {
        o.changed_pre.push_back({key.first, key.second, e.from});
        o.changed_post.push_back({key.first, key.second, e.to});
      }
    }
    return o;
  }

private:
  struct Entry {
    int from;
    int to;
    bool written = false;
  };
  std::map<std::pair<int, int>, Entry> cells_;
  bool ok_ = true;
};

// Calls f(values) for every tuple in the product of [0, sizes[k]).
template <class F> void for_each_tuple(const std::vector<int> &sizes, F &&f) {
  std::vector<int> cur(sizes.size(), 0);
  for (;;) {
    f(cur);
    std::size_t k = sizes.size();
    while (k > 0) {
      --k;
      if (++cur[k] < sizes[k])
        goto next;
      cur[k] = 0;
    }
    return;
  next:;
  }
}

void local_occurrences(const ParamSystem &sys, const Layout &l, std::vector<Occurrence> &out) {
  const int n = l.size();
  for (int ti = 0; ti < static_cast<int>(sys.local_transitions.size()); ++ti) {
    const auto &t = sys.local_transitions[static_cast<std::size_t>(ti)];
    std::vector<int> old_sizes;
    for (const auto &a : t.assignments)
      old_sizes.push_back(
          static_cast<int>(sys.vars[static_cast<std::size_t>(a.var)].values.size()));
    const int guard_holders = t.pointer_guard ? n : 1;
    const bool same_pointer = t.pointer_guard && t.set_pointer_to_self &&
                              t.pointer_guard->pointer == *t.set_pointer_to_self;
    const int effect_holders = (t.set_pointer_to_self && !same_pointer) ? n : 1;

    for (int i = 0; i < n; ++i)
      for (int h1 = 0; h1 < guard_holders; ++h1)
        for (int h2 = 0; h2 < effect_holders; ++h2)
          for_each_tuple(old_sizes, [&](const std::vector<int> &olds) {
            OccurrenceBuilder b;
            b.change(i, l.loc_slot(), t.origin, t.target);
            for (std::size_t k = 0; k < t.assignments.size(); ++k)
              b.change(i, l.var_slot(t.assignments[k].var), olds[k], t.assignments[k].value);
            if (t.pointer_guard) {
              b.require(h1, l.pointer_slot(t.pointer_guard->pointer), kUp);
              b.require(h1, l.var_slot(t.pointer_guard->var), t.pointer_guard->value);
            }
            if (t.set_pointer_to_self) {
              const int holder = same_pointer ? h1 : h2;
              const int slot = l.pointer_slot(*t.set_pointer_to_self);
              if (holder == i) {
                b.require(i, slot, kUp);
              } else {
                b.change(holder, slot, kUp, kBlank);
                b.change(i, slot, kBlank, kUp);
              }
            }
            if (b.ok())
              out.push_back(b.finish(OccurrenceKind::Local, ti, i, -1));
          });
  }
}

void loop_occurrences(const ParamSystem &sys, const Layout &l, std::vector<Occurrence> &start,
                      std::vector<Occurrence> &advance, std::vector<Occurrence> &fail,
                      std::vector<Occurrence> &succeed) {
  const int n = l.size();
  for (int ti = 0; ti < static_cast<int>(sys.loop_transitions.size()); ++ti) {
    const auto &t = sys.loop_transitions[static_cast<std::size_t>(ti)];
    const int at_t = sys.loop_location(ti);
    for (int i = 0; i < n; ++i) {
      OccurrenceBuilder b;
      b.change(i, l.loc_slot(), t.origin, at_t);
      b.change(0, l.loop_slot(i, ti), kBlank, kUp);
      start.push_back(b.finish(OccurrenceKind::LoopStart, ti, i, -1));
    }

    std::set<int> used;
    for (int v : guard_variables(t.guard))
      used.insert(v);
    if (t.capture)
      for (int v : guard_variables(t.capture->when))
        used.insert(v);
    const std::vector<int> vars(used.begin(), used.end());
    std::vector<int> sizes;
    for (int v : vars)
      sizes.push_back(static_cast<int>(sys.vars[static_cast<std::size_t>(v)].values.size()));

    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for_each_tuple(sizes, [&](const std::vector<int> &vals) {
          std::vector<int> valuation(sys.vars.size(), 0);
          for (std::size_t k = 0; k < vars.size(); ++k)
            valuation[static_cast<std::size_t>(vars[k])] = vals[k];
          const bool self = i == j;
          const bool pass = eval_guard(t.guard, valuation, self);
          const bool captured = t.capture && eval_guard(t.capture->when, valuation, self);

          OccurrenceKind kind;
          if (!pass)
            kind = OccurrenceKind::LoopFail;
          else if (j < n - 1)
            kind = OccurrenceKind::LoopAdvance;
          else
            kind = OccurrenceKind::LoopSucceed;

          const int holders = captured ? n : 1;
          for (int h = 0; h < holders; ++h) {
            OccurrenceBuilder b;
            b.change(j, l.loop_slot(i, ti), kUp, kBlank);
            for (std::size_t k = 0; k < vars.size(); ++k)
              b.require(j, l.var_slot(vars[k]), vals[k]);
            switch (kind) {
            case OccurrenceKind::LoopFail:
              b.change(i, l.loc_slot(), at_t, t.target_fail);
              break;
            case OccurrenceKind::LoopSucceed:
              b.change(i, l.loc_slot(), at_t, t.target_succ);
              break;
            default:
              b.require(i, l.loc_slot(), at_t);
              b.change(j + 1, l.loop_slot(i, ti), kBlank, kUp);
            }
            if (captured) {
              const int slot = l.pointer_slot(t.capture->pointer);
              if (h == j) {
                b.require(j, slot, kUp);
              } else {
                b.change(h, slot, kUp, kBlank);
                b.change(j, slot, kBlank, kUp);
              }
            }
            if (!b.ok())
              continue;
            auto o = b.finish(kind, ti, i, j);
            (kind == OccurrenceKind::LoopFail      ? fail
             : kind == OccurrenceKind::LoopSucceed ? succeed
                                                   : advance)
                .push_back(std::move(o));
          }
        });
  }
}

} // namespace

std::vector<Occurrence> enumerate_occurrences(const ParamSystem &sys, int size) {
  const Layout l(sys, size);
  std::vector<Occurrence> out, start, advance, fail, succeed;
  local_occurrences(sys, l, out);
  loop_occurrences(sys, l, start, advance, fail, succeed);
  for (auto *part : {&start, &advance, &fail, &succeed})
    std::move(part->begin(), part->end(), std::back_inserter(out));
  return out;
}

bool is_enabled(const Occurrence &o, const Configuration &c) {
  return std::all_of(o.changed_pre.begin(), o.changed_pre.end(),
                     [&](const Cell &x) { return c.holds(x); }) &&
         std::all_of(o.guard.begin(), o.guard.end(), [&](const Cell &x) { return c.holds(x); });
}

Configuration apply(const Occurrence &o, const Configuration &c) {
  if (!is_enabled(o, c))
    throw Error("occurrence of kind " + to_string(o.kind) + " is not enabled");
  Configuration next = c;
  for (const auto &x : o.changed_post)
    next.at(x.agent, x.slot) = static_cast<std::uint8_t>(x.value);
  return next;
}

namespace {

int actor_location(const ParamSystem &sys, const Occurrence &o) {
  switch (o.kind) {
  case OccurrenceKind::Local:
    return sys.local_transitions[static_cast<std::size_t>(o.transition)].origin;
  case OccurrenceKind::LoopStart:
    return sys.loop_transitions[static_cast<std::size_t>(o.transition)].origin;
  default:
    return sys.loop_location(o.transition);
  }
}

} // namespace

Instance::Instance(const ParamSystem &sys, int size)
    : layout_(sys, size), occurrences_(enumerate_occurrences(sys, size)),
      initial_(initial_config(sys, size)) {
  const int locs = sys.num_locations();
  by_actor_loc_.resize(static_cast<std::size_t>(size * locs));
  for (int k = 0; k < static_cast<int>(occurrences_.size()); ++k) {
    const auto &o = occurrences_[static_cast<std::size_t>(k)];
    by_actor_loc_[static_cast<std::size_t>(o.actor * locs + actor_location(sys, o))].push_back(k);
  }
}

std::vector<std::pair<int, Configuration>> Instance::successors(const Configuration &c) const {
  const int locs = system().num_locations();
  std::vector<int> candidates;
  for (int a = 0; a < size(); ++a) {
    const auto &bucket =
        by_actor_loc_[static_cast<std::size_t>(a * locs + c.at(a, layout_.loc_slot()))];
    for (int k : bucket)
      if (is_enabled(occurrences_[static_cast<std::size_t>(k)], c))
        candidates.push_back(k);
  }
  std::sort(candidates.begin(), candidates.end());
  std::vector<std::pair<int, Configuration>> out;
  out.reserve(candidates.size());
  for (int k : candidates)
    out.emplace_back(k, apply(occurrences_[static_cast<std::size_t>(k)], c));
  return out;
}

std::vector<std::pair<Occurrence, Configuration>> successors(const ParamSystem &sys,
                                                             const Configuration &c) {
  const Instance inst(sys, c.length());
  std::vector<std::pair<Occurrence, Configuration>> out;
  for (auto &[k, next] : inst.successors(c))
    out.emplace_back(inst.occurrences()[static_cast<std::size_t>(k)], std::move(next));
  return out;
}

std::vector<int> ReachabilityResult::path_to(int index) const {
  std::vector<int> path;
  for (int k = index; k >= 0; k = parent[static_cast<std::size_t>(k)])
    path.push_back(k);
  std::reverse(path.begin(), path.end());
  return path;
}

namespace {

// BFS that stops early when `stop(config)` returns true for a new state.
template <class Stop>
ReachabilityResult explore(const Instance &inst, std::optional<std::size_t> bound, Stop &&stop,
                           int &hit) {
  ReachabilityResult r;
  std::unordered_map<Configuration, int, ConfigurationHash> seen;
  auto add = [&](Configuration c, int parent, int via) {
    auto [it, fresh] = seen.try_emplace(c, static_cast<int>(r.states.size()));
    if (!fresh)
      return false;
    r.states.push_back(std::move(c));
    r.parent.push_back(parent);
    r.via.push_back(via);
    return true;
  };
  hit = -1;
  add(inst.initial(), -1, -1);
  if (stop(r.states[0])) {
    hit = 0;
    return r;
  }
  for (std::size_t head = 0; head < r.states.size(); ++head) {
    const auto succ = inst.successors(r.states[head]);
    for (const auto &[k, next] : succ) {
      if (bound && r.states.size() >= *bound && !seen.count(next)) {
        r.truncated = true;
        return r;
      }
      if (add(next, static_cast<int>(head), k) && stop(r.states.back())) {
        hit = static_cast<int>(r.states.size()) - 1;
        return r;
      }
    }
  }
  return r;
}

} // namespace

ReachabilityResult reachable(const Instance &inst, std::optional<std::size_t> bound) {
  int hit;
  return explore(inst, bound, [](const Configuration &) { return false; }, hit);
}

ReachabilityResult reachable(const ParamSystem &sys, int size, std::optional<std::size_t> bound) {
  return reachable(Instance(sys, size), bound);
}

bool holds(const ParamSystem &sys, const PropertyFormula &p, const Configuration &c) {
  const int vars = static_cast<int>(sys.vars.size());
  auto count_state = [&](int q) {
    int n = 0;
    for (int a = 0; a < c.length(); ++a)
      n += c.at(a, 0) == q;
    return n;
  };
  auto count_var = [&](int var, int value) {
    if (var < 0 || var >= vars)
      return 0;
    int n = 0;
    for (int a = 0; a < c.length(); ++a)
      n += c.at(a, 1 + var) == value;
    return n;
  };
  return eval_property(p, count_state, count_var);
}

ExplicitVerdict check_property_explicit(const ParamSystem &sys, int size,
                                        const SafetyProperty &p,
                                        std::optional<std::size_t> bound) {
  const Instance inst(sys, size);
  int hit;
  const ReachabilityResult r = explore(
      inst, bound, [&](const Configuration &c) { return !holds(sys, p.formula, c); }, hit);
  ExplicitVerdict v;
  v.explored = r.states.size();
  if (hit >= 0) {
    v.status = ExplicitVerdict::Status::Violated;
    Trace t;
    for (int k : r.path_to(hit)) {
      t.configurations.push_back(r.states[static_cast<std::size_t>(k)]);
      if (r.via[static_cast<std::size_t>(k)] >= 0)
        t.steps.push_back(inst.occurrences()[static_cast<std::size_t>(r.via[static_cast<std::size_t>(k)])]);
    }
    v.trace = std::move(t);
  } else if (r.truncated) {
    v.status = ExplicitVerdict::Status::Truncated;
  }
  return v;
}

namespace {

std::string format_cells(const Layout &l, const std::vector<Cell> &cells) {
  std::string s = "{";
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k)
      s += ", ";
    s += "(" + std::to_string(cells[k].agent) + ", " + l.slot_label(cells[k].slot) + ", " +
         l.value_label(cells[k].slot, cells[k].value) + ")";
  }
  return s + "}";
}

} // namespace

std::string format_occurrence(const Layout &l, const Occurrence &o) {
  const auto &sys = l.system();
  std::string s = to_string(o.kind) + " ";
  s += o.kind == OccurrenceKind::Local
           ? sys.local_transitions[static_cast<std::size_t>(o.transition)].name
           : sys.loop_transitions[static_cast<std::size_t>(o.transition)].name;
  s += " by " + std::to_string(o.actor);
  if (o.inspectee >= 0)
    s += " inspecting " + std::to_string(o.inspectee);
  s += ": " + format_cells(l, o.changed_pre) + " -> " + format_cells(l, o.changed_post);
  if (!o.guard.empty())
    s += " if " + format_cells(l, o.guard);
  return s;
}

std::string render_configuration(const Layout &l, const Configuration &c) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{""};
  for (int a = 0; a < c.length(); ++a)
    header.push_back(std::to_string(a));
  rows.push_back(std::move(header));
  for (int s = 0; s < c.width(); ++s) {
    std::vector<std::string> row{l.slot_label(s)};
    const bool pointer = l.info(s).kind == SlotKind::LoopPointer ||
                         l.info(s).kind == SlotKind::GlobalPointer;
    for (int a = 0; a < c.length(); ++a)
      row.push_back(pointer && c.at(a, s) == kBlank ? "" : l.value_label(s, c.at(a, s)));
    rows.push_back(std::move(row));
  }
  return detail::format_table(rows);
}

std::string render_trace(const Layout &l, const Trace &t) {
  std::string out;
  for (std::size_t k = 0; k < t.configurations.size(); ++k) {
    if (k > 0)
      out += "  -- " + format_occurrence(l, t.steps[k - 1]) + "\n";
    out += render_configuration(l, t.configurations[k]);
  }
  return out;
}

} // namespace paratrap
