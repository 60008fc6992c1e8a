#include "paratrap/word.hpp"

#include <bit>

namespace paratrap {

Layout::Layout(const ParamSystem &sys, int size)
    : sys_(&sys), size_(size), num_vars_(static_cast<int>(sys.vars.size())),
      num_loops_(static_cast<int>(sys.loop_transitions.size())),
      num_pointers_(static_cast<int>(sys.pointers.size())) {
  if (size < 1)
    throw Error("instance size must be at least 1");
  width_ = 1 + num_vars_ + size_ * num_loops_ + num_pointers_;
}

SlotInfo Layout::info(int slot) const {
  SlotInfo s;
  if (slot == 0) {
    s.kind = SlotKind::Loc;
    return s;
  }
  int r = slot - 1;
  if (r < num_vars_) {
    s.kind = SlotKind::Var;
    s.var = r;
    return s;
  }
  r -= num_vars_;
  if (r < size_ * num_loops_) {
    s.kind = SlotKind::LoopPointer;
    s.agent = r / num_loops_;
    s.transition = r % num_loops_;
    return s;
  }
  r -= size_ * num_loops_;
  if (r < num_pointers_) {
    s.kind = SlotKind::GlobalPointer;
    s.pointer = r;
    return s;
  }
  throw Error("slot index out of range: " + std::to_string(slot));
}

int Layout::alphabet_size(int slot) const {
  const SlotInfo s = info(slot);
  switch (s.kind) {
  case SlotKind::Loc:
    return sys_->num_locations();
  case SlotKind::Var:
    return static_cast<int>(sys_->vars[static_cast<std::size_t>(s.var)].values.size());
  default:
    return 2;
  }
}

std::string Layout::slot_label(int slot) const {
  const SlotInfo s = info(slot);
  switch (s.kind) {
  case SlotKind::Loc:
    return "loc";
  case SlotKind::Var:
    return sys_->vars[static_cast<std::size_t>(s.var)].name;
  case SlotKind::LoopPointer:
    return std::to_string(s.agent) + "." +
           sys_->loop_transitions[static_cast<std::size_t>(s.transition)].name;
  case SlotKind::GlobalPointer:
    return sys_->pointers[static_cast<std::size_t>(s.pointer)].name;
  }
  return {};
}

std::string Layout::value_label(int slot, int value) const {
  const SlotInfo s = info(slot);
  switch (s.kind) {
  case SlotKind::Loc:
    return sys_->location_name(value);
  case SlotKind::Var:
    return sys_->vars[static_cast<std::size_t>(s.var)].values.at(static_cast<std::size_t>(value));
  default:
    return value == kUp ? "↑" : "␣";
  }
}

bool Powerword::empty() const {
  for (auto m : data())
    if (m)
      return false;
  return true;
}

std::vector<Cell> Powerword::cells() const {
  std::vector<Cell> out;
  for (int a = 0; a < length(); ++a)
    for (int s = 0; s < width(); ++s)
      for (std::uint64_t m = at(a, s); m; m &= m - 1)
        out.push_back({a, s, std::countr_zero(m)});
  return out;
}

std::size_t ConfigurationHash::operator()(const Configuration &c) const noexcept {
  // FNV-1a
  std::size_t h = 1469598103934665603ull;
  for (auto v : c.data()) {
    h ^= v;
    h *= 1099511628211ull;
  }
  return h ^ static_cast<std::size_t>(c.length());
}

bool is_well_formed(const Layout &layout, const Configuration &c) {
  const int n = layout.size();
  if (c.length() != n || c.width() != layout.width())
    return false;
  for (int a = 0; a < n; ++a)
    for (int s = 0; s < layout.width(); ++s)
      if (c.at(a, s) >= layout.alphabet_size(s))
        return false;
  const auto &sys = layout.system();
  for (int i = 0; i < n; ++i)
    for (int t = 0; t < layout.num_loops(); ++t) {
      int marks = 0;
      for (int j = 0; j < n; ++j)
        marks += c.at(j, layout.loop_slot(i, t)) == kUp;
      const bool executing = c.at(i, layout.loc_slot()) == sys.loop_location(t);
      if (marks != (executing ? 1 : 0))
        return false;
    }
  for (int p = 0; p < layout.num_pointers(); ++p) {
    int marks = 0;
    for (int j = 0; j < n; ++j)
      marks += c.at(j, layout.pointer_slot(p)) == kUp;
    if (marks != 1)
      return false;
  }
  return true;
}

bool intersects(const Configuration &c, const Powerword &o) {
  if (c.length() != o.length() || c.width() != o.width())
    throw Error("configuration and powerword are not compatible");
  for (int a = 0; a < c.length(); ++a)
    for (int s = 0; s < c.width(); ++s)
      if (o.contains(a, s, c.at(a, s)))
        return true;
  return false;
}

namespace {

// Enumerates the free part of a configuration (loc + vars per agent) in
// lexicographic order, then pointer placements consistent with the locs.
class ConfigEnumerator {
public:
  ConfigEnumerator(const Layout &l, std::size_t limit, std::vector<Configuration> &out)
      : l_(l), limit_(limit), out_(out), cur_(l.size(), l.width()) {}

  void run() { letters(0, 0); }

private:
  void letters(int agent, int slot) {
    if (agent == l_.size()) {
      loops(0, 0);
      return;
    }
    if (slot > l_.num_vars()) {
      letters(agent + 1, 0);
      return;
    }
    for (int v = 0; v < l_.alphabet_size(slot); ++v) {
      cur_.at(agent, slot) = static_cast<std::uint8_t>(v);
      letters(agent, slot + 1);
    }
  }

  void loops(int i, int t) {
    if (i == l_.size()) {
      pointers(0);
      return;
    }
    if (t == l_.num_loops()) {
      loops(i + 1, 0);
      return;
    }
    const int slot = l_.loop_slot(i, t);
    for (int j = 0; j < l_.size(); ++j)
      cur_.at(j, slot) = kBlank;
    if (cur_.at(i, 0) != l_.system().loop_location(t)) {
      loops(i, t + 1);
      return;
    }
    for (int j = 0; j < l_.size(); ++j) {
      cur_.at(j, slot) = kUp;
      loops(i, t + 1);
      cur_.at(j, slot) = kBlank;
    }
  }

  void pointers(int p) {
    if (p == l_.num_pointers()) {
      if (out_.size() >= limit_)
        throw Error("more than " + std::to_string(limit_) + " configurations");
      out_.push_back(cur_);
      return;
    }
    const int slot = l_.pointer_slot(p);
    for (int j = 0; j < l_.size(); ++j) {
      cur_.at(j, slot) = kUp;
      pointers(p + 1);
      cur_.at(j, slot) = kBlank;
    }
  }

  const Layout &l_;
  std::size_t limit_;
  std::vector<Configuration> &out_;
  Configuration cur_;
};

} // namespace

std::vector<Configuration> all_configurations(const Layout &layout, std::size_t limit) {
  std::vector<Configuration> out;
  ConfigEnumerator(layout, limit, out).run();
  return out;
}

Powerword singleton_powerword(const Configuration &c) {
  Powerword o(c.length(), c.width());
  for (int a = 0; a < c.length(); ++a)
    for (int s = 0; s < c.width(); ++s)
      o.insert({a, s, c.at(a, s)});
  return o;
}

} // namespace paratrap
