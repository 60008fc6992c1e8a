#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "paratrap/model.hpp"

namespace paratrap {

// Values of the pointer slots i.t and of global pointer slots.
inline constexpr int kBlank = 0;
inline constexpr int kUp = 1;

enum class SlotKind { Loc, Var, LoopPointer, GlobalPointer };

struct SlotInfo {
  SlotKind kind = SlotKind::Loc;
  int var = -1;        // Var
  int agent = -1;      // LoopPointer: the inspector i of slot i.t
  int transition = -1; // LoopPointer
  int pointer = -1;    // GlobalPointer
};

/// Slot structure of the instance of `sys` with `size` agents. Every letter
/// carries, in order: loc, one slot per variable, the loop pointer slots
/// 0.T_lp ... (size-1).T_lp, and one slot per global pointer.
///
/// A Layout refers to its system; the system must outlive it.
class Layout {
public:
  Layout(const ParamSystem &sys, int size);

  const ParamSystem &system() const { return *sys_; }
  int size() const { return size_; }
  int width() const { return width_; }
  int num_vars() const { return num_vars_; }
  int num_loops() const { return num_loops_; }
  int num_pointers() const { return num_pointers_; }

  int loc_slot() const { return 0; }
  int var_slot(int var) const { return 1 + var; }
  int loop_slot(int agent, int transition) const {
    return 1 + num_vars_ + agent * num_loops_ + transition;
  }
  int pointer_slot(int pointer) const {
    return 1 + num_vars_ + size_ * num_loops_ + pointer;
  }

  SlotInfo info(int slot) const;
  int alphabet_size(int slot) const;
  std::string slot_label(int slot) const;
  std::string value_label(int slot, int value) const;

  bool operator==(const Layout &o) const {
    return sys_ == o.sys_ && size_ == o.size_;
  }

private:
  const ParamSystem *sys_;
  int size_;
  int num_vars_;
  int num_loops_;
  int num_pointers_;
  int width_;
};

/// One (agent, slot, value) triple.
struct Cell {
  int agent = 0;
  int slot = 0;
  int value = 0;

  auto operator<=>(const Cell &) const = default;
};

/// A word of `length` letters with `width` slots each; `T` is the per-slot
/// payload (a value for configurations, a value-set bitmask for powerwords).
template <class T> class SlottedWord {
public:
  using value_type = T;

  SlottedWord() = default;
  SlottedWord(int length, int width, T fill = T{})
      : length_(length), width_(width),
        data_(static_cast<std::size_t>(length) * static_cast<std::size_t>(width), fill) {}

  int length() const { return length_; }
  int width() const { return width_; }

  T &at(int agent, int slot) { return data_[index(agent, slot)]; }
  const T &at(int agent, int slot) const { return data_[index(agent, slot)]; }

  std::span<const T> letter(int agent) const {
    return {data_.data() + index(agent, 0), static_cast<std::size_t>(width_)};
  }
  const std::vector<T> &data() const { return data_; }

  bool operator==(const SlottedWord &) const = default;

private:
  std::size_t index(int agent, int slot) const {
    return static_cast<std::size_t>(agent) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(slot);
  }

  int length_ = 0;
  int width_ = 0;
  std::vector<T> data_;
};

/// A global configuration: exactly one value per (agent, slot).
class Configuration : public SlottedWord<std::uint8_t> {
public:
  using SlottedWord::SlottedWord;

  bool holds(const Cell &c) const { return at(c.agent, c.slot) == c.value; }
};

/// A powerword: a set of values per (agent, slot), stored as a bitmask.
class Powerword : public SlottedWord<std::uint64_t> {
public:
  using SlottedWord::SlottedWord;

  bool contains(int agent, int slot, int value) const {
    return (at(agent, slot) >> value) & 1u;
  }
  bool contains(const Cell &c) const { return contains(c.agent, c.slot, c.value); }
  void insert(const Cell &c) { at(c.agent, c.slot) |= std::uint64_t{1} << c.value; }
  void erase(const Cell &c) { at(c.agent, c.slot) &= ~(std::uint64_t{1} << c.value); }

  bool empty() const;
  std::vector<Cell> cells() const;
};

struct ConfigurationHash {
  std::size_t operator()(const Configuration &c) const noexcept;
};

/// True iff the word satisfies the pointer-slot conditions of a configuration
/// and every value lies in its slot alphabet.
bool is_well_formed(const Layout &layout, const Configuration &c);

/// w ⊓ O. Throws Error if the two are not compatible.
bool intersects(const Configuration &c, const Powerword &o);

/// Every well-formed configuration of the instance. Throws Error if there are
/// more than `limit` of them.
std::vector<Configuration> all_configurations(const Layout &layout, std::size_t limit);

/// The powerword that contains exactly the cells of `c`.
Powerword singleton_powerword(const Configuration &c);

} // namespace paratrap
