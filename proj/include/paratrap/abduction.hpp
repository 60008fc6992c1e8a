#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "paratrap/model.hpp"
#include "paratrap/word.hpp"

namespace paratrap {

// Index-slot value of a letter that carries no agent name.
inline constexpr int kNoName = -1;

inline constexpr int kDefaultNameBudget = 4;

/// Slot structure of normalized words over `names` agent names: loc, one slot
/// per variable, p_0.T_lp ... p_{names-1}.T_lp, one slot per global pointer.
/// The index slot is kept outside the slot vector (NormalizedLetter::index).
class NormalizedLayout {
public:
  NormalizedLayout(const ParamSystem &sys, int names);

  const ParamSystem &system() const { return *sys_; }
  int names() const { return names_; }
  int width() const { return width_; }

  int loc_slot() const { return 0; }
  int var_slot(int var) const { return 1 + var; }
  int loop_slot(int name, int transition) const {
    return 1 + num_vars_ + name * num_loops_ + transition;
  }
  int pointer_slot(int pointer) const { return 1 + num_vars_ + names_ * num_loops_ + pointer; }

  // Reuses the slot kinds of concrete words; SlotInfo::agent is the name.
  SlotInfo info(int slot) const;
  int alphabet_size(int slot) const;
  std::string slot_label(int slot) const;
  std::string value_label(int slot, int value) const;

private:
  const ParamSystem *sys_;
  int names_;
  int num_vars_;
  int num_loops_;
  int num_pointers_;
  int width_;
};

std::string name_label(int name); // "p0", "p1", ...

struct NormalizedLetter {
  int index = kNoName;
  std::vector<std::uint64_t> sets; // value masks, NormalizedLayout order

  auto operator<=>(const NormalizedLetter &) const = default;
};

struct NormalizedTrap {
  int names = 0;
  std::vector<NormalizedLetter> letters;

  int length() const { return static_cast<int>(letters.size()); }
  bool operator==(const NormalizedTrap &) const = default;
};

/// Shape conditions of a normalized word: every name labels exactly one
/// letter, and every name has ↑ in at least one position for at least one of
/// its loop slots. Returns a description of the first violation.
std::optional<std::string> check_normalized(const ParamSystem &sys, const NormalizedTrap &nt);

/// The stricter reading of the second condition: ↑ at some position for every
/// name and every loop transition.
bool satisfies_strict_coverage(const ParamSystem &sys, const NormalizedTrap &nt);

/// Drops the loop slot groups that are empty everywhere and names the
/// remaining agents p_0 < p_1 < ... Throws Error if more than `name_budget`
/// groups survive or if `o` does not fit the system.
NormalizedTrap normalize(const ParamSystem &sys, const Powerword &o,
                         int name_budget = kDefaultNameBudget);

/// Inverse of normalize, placing each name at the letter it labels.
/// Throws Error if a name does not label exactly one letter.
Powerword concretize(const ParamSystem &sys, const NormalizedTrap &nt);

/// As above; `placement[name]` must be the position of that name's letter.
Powerword concretize(const ParamSystem &sys, const NormalizedTrap &nt,
                     const std::vector<int> &placement);

struct Token {
  NormalizedLetter letter;
  bool star = false;

  bool operator==(const Token &) const = default;
};

/// r_0 ... r_{l-1} with each r_i a letter or a starred letter.
struct TrapLanguage {
  int names = 0;
  std::vector<Token> tokens;

  // Where the language came from.
  std::string system;
  int source_size = 0;
  int threshold = 0;
  std::vector<int> sizes_checked;

  int min_length() const;
  bool operator==(const TrapLanguage &) const = default;
};

/// Names occur exactly once, on non-starred letters; starred letters carry
/// no name.
std::optional<std::string> check_language(const ParamSystem &sys, const TrapLanguage &lang);

/// Calls `visit` for every way of expanding the stars so that the word has
/// `length` letters (one call per distribution, duplicates included). Stops
/// early when `visit` returns false.
void for_each_word(const TrapLanguage &lang, int length,
                   const std::function<bool(const NormalizedTrap &)> &visit);
std::vector<NormalizedTrap> words_of(const TrapLanguage &lang, int length);

/// Loop transitions and global pointers whose marks move.
struct MoveSlots {
  std::vector<int> loops;
  std::vector<int> pointers;

  static MoveSlots all_loops(const ParamSystem &sys);
  static MoveSlots everything(const ParamSystem &sys);
};

/// Marks pointing at column k move to k-1 (k >= 1), resp. k+1
/// (k <= length-2). Throws Error outside these bounds.
Configuration move_left(const ParamSystem &sys, const Configuration &c, int k,
                        const MoveSlots &slots);
Configuration move_right(const ParamSystem &sys, const Configuration &c, int k,
                         const MoveSlots &slots);

/// Removes column k and the loop slot group k.T_lp. For configurations,
/// throws Error if column k holds ↑ in a loop or pointer slot (the result
/// would lose a mark).
Configuration drop(const ParamSystem &sys, const Configuration &c, int k);
Powerword drop(const ParamSystem &sys, const Powerword &o, int k);

/// Replaces letter i by k copies of itself. Requires letter i to be unnamed
/// and letters i .. i+run-1 to be equal; throws Error otherwise.
NormalizedTrap pump(const NormalizedTrap &nt, int i, int k, int run = 3);

/// Number of equal consecutive letters needed before a run can be repeated
/// freely: 3, plus one per global pointer.
int rendezvous_degree(const ParamSystem &sys);

struct AbductionOptions {
  int threshold = 0; // 0: rendezvous_degree(sys)
};

/// True if at every length 1..max_length each word of `weaker` contains,
/// slot by slot, some word of `stronger` of the same length. Then every
/// configuration satisfying the invariant of `stronger` satisfies that of
/// `weaker` at those lengths, and `weaker` adds nothing there.
bool subsumes(const ParamSystem &sys, const TrapLanguage &stronger, const TrapLanguage &weaker,
              int max_length);

/// Generalizes the runs of equal unnamed letters of `nt`. A run becomes
/// a^m0 a* if every multiplicity in [m0, threshold] yields a trap (checked
/// structurally, jointly with the runs generalized before it); other runs
/// stay literal. Returns none if no run generalizes.
std::optional<TrapLanguage> abduct(const ParamSystem &sys, const NormalizedTrap &nt,
                                   const std::vector<int> &sizes_checked = {},
                                   const AbductionOptions &options = {});

std::string render_normalized(const ParamSystem &sys, const NormalizedTrap &nt);

/// One column per token; starred tokens are marked with "*" above.
std::string render_language(const ParamSystem &sys, const TrapLanguage &lang);

} // namespace paratrap
