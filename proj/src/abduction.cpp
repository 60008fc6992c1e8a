#include "paratrap/abduction.hpp"

#include <algorithm>
#include <map>
#include <memory>

#include "paratrap/semantics.hpp"
#include "paratrap/traps.hpp"
#include "text_util.hpp"

namespace paratrap {

NormalizedLayout::NormalizedLayout(const ParamSystem &sys, int names)
    : sys_(&sys), names_(names), num_vars_(static_cast<int>(sys.vars.size())),
      num_loops_(static_cast<int>(sys.loop_transitions.size())),
      num_pointers_(static_cast<int>(sys.pointers.size())) {
  if (names < 0)
    throw Error("negative name count");
  width_ = 1 + num_vars_ + names_ * num_loops_ + num_pointers_;
}

SlotInfo NormalizedLayout::info(int slot) const {
  SlotInfo s;
  if (slot == 0)
    return s;
  int r = slot - 1;
  if (r < num_vars_) {
    s.kind = SlotKind::Var;
    s.var = r;
    return s;
  }
  r -= num_vars_;
  if (r < names_ * num_loops_) {
    s.kind = SlotKind::LoopPointer;
    s.agent = r / num_loops_;
    s.transition = r % num_loops_;
    return s;
  }
  r -= names_ * num_loops_;
  if (r < num_pointers_) {
    s.kind = SlotKind::GlobalPointer;
    s.pointer = r;
    return s;
  }
  throw Error("slot index out of range: " + std::to_string(slot));
}

int NormalizedLayout::alphabet_size(int slot) const {
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

std::string NormalizedLayout::slot_label(int slot) const {
  const SlotInfo s = info(slot);
  switch (s.kind) {
  case SlotKind::Loc:
    return "loc";
  case SlotKind::Var:
    return sys_->vars[static_cast<std::size_t>(s.var)].name;
  case SlotKind::LoopPointer:
    return name_label(s.agent) + "." +
           sys_->loop_transitions[static_cast<std::size_t>(s.transition)].name;
  case SlotKind::GlobalPointer:
    return sys_->pointers[static_cast<std::size_t>(s.pointer)].name;
  }
  return {};
}

std::string NormalizedLayout::value_label(int slot, int value) const {
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

std::string name_label(int name) { return "p" + std::to_string(name); }

namespace {

constexpr std::uint64_t kUpBit = std::uint64_t{1} << kUp;

// Position of each name's letter, -1 if missing; throws on duplicates.
std::vector<int> name_positions(const NormalizedTrap &nt) {
  std::vector<int> pos(static_cast<std::size_t>(nt.names), -1);
  for (int k = 0; k < nt.length(); ++k) {
    const int n = nt.letters[static_cast<std::size_t>(k)].index;
    if (n == kNoName)
      continue;
    if (n < 0 || n >= nt.names)
      throw Error("letter " + std::to_string(k) + " carries unknown name " + std::to_string(n));
    auto &p = pos[static_cast<std::size_t>(n)];
    if (p >= 0)
      throw Error("name " + name_label(n) + " labels more than one letter");
    p = k;
  }
  return pos;
}

bool name_has_mark(const NormalizedLayout &nl, const NormalizedTrap &nt, int name, int t) {
  for (const auto &l : nt.letters)
    if (l.sets[static_cast<std::size_t>(nl.loop_slot(name, t))] & kUpBit)
      return true;
  return false;
}

void check_width(const NormalizedLayout &nl, const NormalizedTrap &nt) {
  for (const auto &l : nt.letters)
    if (static_cast<int>(l.sets.size()) != nl.width())
      throw Error("normalized letter has the wrong number of slots");
}

} // namespace

std::optional<std::string> check_normalized(const ParamSystem &sys, const NormalizedTrap &nt) {
  const NormalizedLayout nl(sys, nt.names);
  check_width(nl, nt);
  std::vector<int> pos;
  try {
    pos = name_positions(nt);
  } catch (const Error &e) {
    return e.what();
  }
  for (int n = 0; n < nt.names; ++n) {
    if (pos[static_cast<std::size_t>(n)] < 0)
      return "name " + name_label(n) + " labels no letter";
    bool marked = false;
    for (std::size_t t = 0; t < sys.loop_transitions.size(); ++t)
      marked = marked || name_has_mark(nl, nt, n, static_cast<int>(t));
    if (!marked)
      return "name " + name_label(n) + " has no ↑ in any of its loop slots";
  }
  return std::nullopt;
}

bool satisfies_strict_coverage(const ParamSystem &sys, const NormalizedTrap &nt) {
  const NormalizedLayout nl(sys, nt.names);
  for (int n = 0; n < nt.names; ++n)
    for (std::size_t t = 0; t < sys.loop_transitions.size(); ++t)
      if (!name_has_mark(nl, nt, n, static_cast<int>(t)))
        return false;
  return true;
}

NormalizedTrap normalize(const ParamSystem &sys, const Powerword &o, int name_budget) {
  const int n = o.length();
  if (n < 1)
    throw Error("cannot normalize an empty powerword");
  const Layout l(sys, n);
  if (o.width() != l.width())
    throw Error("powerword does not fit an instance of " + sys.name + " with " +
                std::to_string(n) + " agents");

  std::vector<int> survivors;
  for (int i = 0; i < n; ++i) {
    bool used = false;
    for (int t = 0; t < l.num_loops() && !used; ++t)
      for (int k = 0; k < n && !used; ++k)
        used = o.at(k, l.loop_slot(i, t)) != 0;
    if (used)
      survivors.push_back(i);
  }
  if (static_cast<int>(survivors.size()) > name_budget)
    throw Error(std::to_string(survivors.size()) + " agent groups survive normalization, budget is " +
                std::to_string(name_budget));

  NormalizedTrap nt;
  nt.names = static_cast<int>(survivors.size());
  const NormalizedLayout nl(sys, nt.names);
  for (int k = 0; k < n; ++k) {
    NormalizedLetter letter;
    letter.sets.assign(static_cast<std::size_t>(nl.width()), 0);
    letter.sets[0] = o.at(k, l.loc_slot());
    for (int v = 0; v < l.num_vars(); ++v)
      letter.sets[static_cast<std::size_t>(nl.var_slot(v))] = o.at(k, l.var_slot(v));
    for (int m = 0; m < nt.names; ++m) {
      const int agent = survivors[static_cast<std::size_t>(m)];
      if (agent == k)
        letter.index = m;
      for (int t = 0; t < l.num_loops(); ++t)
        letter.sets[static_cast<std::size_t>(nl.loop_slot(m, t))] = o.at(k, l.loop_slot(agent, t));
    }
    for (int p = 0; p < l.num_pointers(); ++p)
      letter.sets[static_cast<std::size_t>(nl.pointer_slot(p))] = o.at(k, l.pointer_slot(p));
    nt.letters.push_back(std::move(letter));
  }
  return nt;
}

Powerword concretize(const ParamSystem &sys, const NormalizedTrap &nt) {
  const auto pos = name_positions(nt);
  for (int n = 0; n < nt.names; ++n)
    if (pos[static_cast<std::size_t>(n)] < 0)
      throw Error("name " + name_label(n) + " labels no letter");
  return concretize(sys, nt, pos);
}

Powerword concretize(const ParamSystem &sys, const NormalizedTrap &nt,
                     const std::vector<int> &placement) {
  if (static_cast<int>(placement.size()) != nt.names)
    throw Error("placement has " + std::to_string(placement.size()) + " entries for " +
                std::to_string(nt.names) + " names");
  const auto pos = name_positions(nt);
  if (pos != placement)
    throw Error("placement does not match the index slots of the word");
  const NormalizedLayout nl(sys, nt.names);
  check_width(nl, nt);
  const int n = nt.length();
  const Layout l(sys, n);
  Powerword o(n, l.width());
  for (int k = 0; k < n; ++k) {
    const auto &s = nt.letters[static_cast<std::size_t>(k)].sets;
    o.at(k, l.loc_slot()) = s[0];
    for (int v = 0; v < l.num_vars(); ++v)
      o.at(k, l.var_slot(v)) = s[static_cast<std::size_t>(nl.var_slot(v))];
    for (int m = 0; m < nt.names; ++m)
      for (int t = 0; t < l.num_loops(); ++t)
        o.at(k, l.loop_slot(placement[static_cast<std::size_t>(m)], t)) =
            s[static_cast<std::size_t>(nl.loop_slot(m, t))];
    for (int p = 0; p < l.num_pointers(); ++p)
      o.at(k, l.pointer_slot(p)) = s[static_cast<std::size_t>(nl.pointer_slot(p))];
  }
  return o;
}

int TrapLanguage::min_length() const {
  int n = 0;
  for (const auto &t : tokens)
    n += !t.star;
  return n;
}

std::optional<std::string> check_language(const ParamSystem &sys, const TrapLanguage &lang) {
  const NormalizedLayout nl(sys, lang.names);
  std::vector<int> seen(static_cast<std::size_t>(lang.names), 0);
  for (std::size_t k = 0; k < lang.tokens.size(); ++k) {
    const auto &tok = lang.tokens[k];
    if (static_cast<int>(tok.letter.sets.size()) != nl.width())
      return "token " + std::to_string(k) + " has the wrong number of slots";
    const int n = tok.letter.index;
    if (n == kNoName)
      continue;
    if (n < 0 || n >= lang.names)
      return "token " + std::to_string(k) + " carries an unknown name";
    if (tok.star)
      return "starred token " + std::to_string(k) + " carries name " + name_label(n);
    ++seen[static_cast<std::size_t>(n)];
  }
  for (int n = 0; n < lang.names; ++n)
    if (seen[static_cast<std::size_t>(n)] != 1)
      return "name " + name_label(n) + " occurs " + std::to_string(seen[static_cast<std::size_t>(n)]) +
             " times";
  return std::nullopt;
}

void for_each_word(const TrapLanguage &lang, int length,
                   const std::function<bool(const NormalizedTrap &)> &visit) {
  const int free = length - lang.min_length();
  if (free < 0 || length < 1)
    return;
  std::vector<int> stars;
  for (std::size_t k = 0; k < lang.tokens.size(); ++k)
    if (lang.tokens[k].star)
      stars.push_back(static_cast<int>(k));
  if (stars.empty() && free > 0)
    return;

  std::vector<int> count(lang.tokens.size(), 1);
  auto emit = [&] {
    NormalizedTrap w;
    w.names = lang.names;
    for (std::size_t k = 0; k < lang.tokens.size(); ++k)
      for (int c = 0; c < count[k]; ++c)
        w.letters.push_back(lang.tokens[k].letter);
    return visit(w);
  };
  // Distribute `left` letters over stars[from..].
  std::function<bool(std::size_t, int)> rec = [&](std::size_t from, int left) {
    if (from + 1 >= stars.size()) {
      if (!stars.empty())
        count[static_cast<std::size_t>(stars.back())] = left;
      return emit();
    }
    for (int c = 0; c <= left; ++c) {
      count[static_cast<std::size_t>(stars[from])] = c;
      if (!rec(from + 1, left - c))
        return false;
    }
    return true;
  };
  rec(0, free);
}

std::vector<NormalizedTrap> words_of(const TrapLanguage &lang, int length) {
  std::vector<NormalizedTrap> out;
  for_each_word(lang, length, [&](const NormalizedTrap &w) {
    out.push_back(w);
    return true;
  });
  return out;
}

bool subsumes(const ParamSystem &sys, const TrapLanguage &stronger, const TrapLanguage &weaker,
              int max_length) {
  auto contained = [](const Powerword &small, const Powerword &big) {
    for (std::size_t k = 0; k < small.data().size(); ++k)
      if (small.data()[k] & ~big.data()[k])
        return false;
    return true;
  };
  for (int n = 1; n <= max_length; ++n) {
    std::vector<Powerword> strong;
    for_each_word(stronger, n, [&](const NormalizedTrap &w) {
      strong.push_back(concretize(sys, w));
      return true;
    });
    bool ok = true;
    for_each_word(weaker, n, [&](const NormalizedTrap &w) {
      const Powerword o = concretize(sys, w);
      ok = std::any_of(strong.begin(), strong.end(), [&](const Powerword &s) { return contained(s, o); });
      return ok;
    });
    if (!ok)
      return false;
  }
  return true;
}

MoveSlots MoveSlots::all_loops(const ParamSystem &sys) {
  MoveSlots m;
  for (std::size_t t = 0; t < sys.loop_transitions.size(); ++t)
    m.loops.push_back(static_cast<int>(t));
  return m;
}

MoveSlots MoveSlots::everything(const ParamSystem &sys) {
  MoveSlots m = all_loops(sys);
  for (std::size_t p = 0; p < sys.pointers.size(); ++p)
    m.pointers.push_back(static_cast<int>(p));
  return m;
}

namespace {

Configuration move(const ParamSystem &sys, const Configuration &c, int from, int to,
                   const MoveSlots &slots) {
  const Layout l(sys, c.length());
  if (c.width() != l.width())
    throw Error("configuration does not fit the system");
  Configuration out = c;
  auto shift = [&](int slot) {
    if (c.at(from, slot) == kUp)
      out.at(to, slot) = kUp;
    out.at(from, slot) = kBlank;
  };
  for (int t : slots.loops)
    for (int i = 0; i < l.size(); ++i)
      shift(l.loop_slot(i, t));
  for (int p : slots.pointers)
    shift(l.pointer_slot(p));
  return out;
}

template <class W> W drop_word(const ParamSystem &sys, const W &w, int k) {
  const int n = w.length();
  if (k < 0 || k >= n)
    throw Error("drop index " + std::to_string(k) + " outside a word of length " + std::to_string(n));
  const int nv = static_cast<int>(sys.vars.size());
  const int nl = static_cast<int>(sys.loop_transitions.size());
  const int np = static_cast<int>(sys.pointers.size());
  auto width = [&](int size) { return 1 + nv + size * nl + np; };
  if (w.width() != width(n))
    throw Error("word does not fit the system");
  W out(n - 1, width(n - 1));
  auto old_of = [k](int x) { return x < k ? x : x + 1; };
  for (int a = 0; a < n - 1; ++a) {
    const int src = old_of(a);
    for (int s = 0; s < 1 + nv; ++s)
      out.at(a, s) = w.at(src, s);
    for (int g = 0; g < n - 1; ++g)
      for (int t = 0; t < nl; ++t)
        out.at(a, 1 + nv + g * nl + t) = w.at(src, 1 + nv + old_of(g) * nl + t);
    for (int p = 0; p < np; ++p)
      out.at(a, width(n - 1) - np + p) = w.at(src, width(n) - np + p);
  }
  return out;
}

} // namespace

Configuration move_left(const ParamSystem &sys, const Configuration &c, int k,
                        const MoveSlots &slots) {
  if (k < 1 || k >= c.length())
    throw Error("move_left needs 1 <= k < length");
  return move(sys, c, k, k - 1, slots);
}

Configuration move_right(const ParamSystem &sys, const Configuration &c, int k,
                         const MoveSlots &slots) {
  if (k < 0 || k > c.length() - 2)
    throw Error("move_right needs 0 <= k <= length - 2");
  return move(sys, c, k, k + 1, slots);
}

Configuration drop(const ParamSystem &sys, const Configuration &c, int k) {
  if (k >= 0 && k < c.length()) {
    const int first_mark = 1 + static_cast<int>(sys.vars.size());
    for (int s = first_mark; s < c.width(); ++s)
      if (c.at(k, s) == kUp)
        throw Error("column " + std::to_string(k) + " holds a mark; dropping it loses a pointer");
  }
  return drop_word(sys, c, k);
}

Powerword drop(const ParamSystem &sys, const Powerword &o, int k) { return drop_word(sys, o, k); }

NormalizedTrap pump(const NormalizedTrap &nt, int i, int k, int run) {
  if (k < 1)
    throw Error("pump needs k >= 1");
  if (run < 1 || i < 0 || i + run > nt.length())
    throw Error("pump position " + std::to_string(i) + " has no run of " + std::to_string(run) +
                " letters");
  const auto &a = nt.letters[static_cast<std::size_t>(i)];
  if (a.index != kNoName)
    throw Error("pump position " + std::to_string(i) + " carries a name");
  for (int d = 1; d < run; ++d)
    if (nt.letters[static_cast<std::size_t>(i + d)] != a)
      throw Error("letters " + std::to_string(i) + ".." + std::to_string(i + run - 1) +
                  " are not equal");
  NormalizedTrap out = nt;
  out.letters.insert(out.letters.begin() + i, static_cast<std::size_t>(k - 1), a);
  return out;
}

int rendezvous_degree(const ParamSystem &sys) { return 3 + static_cast<int>(sys.pointers.size()); }

namespace {

struct Segment {
  NormalizedLetter letter;
  int count = 1;
  bool generalizable = false; // maximal run of an unnamed letter
};

// Structural trap checks of candidate words, one instance per size.
class Checker {
public:
  explicit Checker(const ParamSystem &sys) : sys_(sys) {}

  bool is_trap(const NormalizedTrap &w) {
    if (w.letters.empty())
      return true; // no instance of size 0
    if (check_normalized(sys_, w))
      return false;
    auto [it, fresh] = memo_.try_emplace(w.letters, false);
    if (!fresh)
      return it->second;
    auto &inst = instances_[w.length()];
    if (!inst)
      inst = std::make_unique<Instance>(sys_, w.length());
    it->second = is_trap_structural(*inst, concretize(sys_, w));
    return it->second;
  }

private:
  const ParamSystem &sys_;
  std::map<int, std::unique_ptr<Instance>> instances_;
  std::map<std::vector<NormalizedLetter>, bool> memo_;
};

NormalizedTrap assemble(int names, const std::vector<Segment> &segs, const std::vector<int> &counts) {
  NormalizedTrap w;
  w.names = names;
  for (std::size_t s = 0; s < segs.size(); ++s)
    for (int c = 0; c < counts[s]; ++c)
      w.letters.push_back(segs[s].letter);
  return w;
}

} // namespace

std::optional<TrapLanguage> abduct(const ParamSystem &sys, const NormalizedTrap &nt,
                                   const std::vector<int> &sizes_checked,
                                   const AbductionOptions &options) {
  if (auto err = check_normalized(sys, nt))
    throw Error("abduct: not a normalized word: " + *err);
  const int r = options.threshold > 0 ? options.threshold : rendezvous_degree(sys);

  std::vector<Segment> segs;
  for (const auto &l : nt.letters) {
    if (!segs.empty() && l.index == kNoName && segs.back().generalizable &&
        segs.back().letter == l) {
      ++segs.back().count;
      continue;
    }
    segs.push_back({l, 1, l.index == kNoName});
  }

  Checker checker(sys);
  std::vector<int> counts;
  for (const auto &s : segs)
    counts.push_back(s.count);
  // Starred segments and the lowest multiplicity verified for them.
  std::vector<int> low(segs.size(), -1);

  for (std::size_t j = 0; j < segs.size(); ++j) {
    if (!segs[j].generalizable)
      continue;
    // passes[m]: every combination of the earlier starred runs within their
    // ranges, with run j at m, is a trap.
    std::vector<bool> passes(static_cast<std::size_t>(r + 1), true);
    for (int m = 0; m <= r; ++m) {
      std::vector<int> cur = counts;
      cur[j] = m;
      std::vector<std::size_t> starred;
      for (std::size_t s = 0; s < j; ++s)
        if (low[s] >= 0)
          starred.push_back(s);
      std::function<bool(std::size_t)> all = [&](std::size_t idx) {
        if (idx == starred.size())
          return checker.is_trap(assemble(nt.names, segs, cur));
        const std::size_t s = starred[idx];
        for (int c = low[s]; c <= r; ++c) {
          cur[s] = c;
          if (!all(idx + 1))
            return false;
        }
        return true;
      };
      passes[static_cast<std::size_t>(m)] = all(0);
    }
    if (!passes[static_cast<std::size_t>(r)])
      continue;
    int m0 = r;
    while (m0 > 0 && passes[static_cast<std::size_t>(m0 - 1)])
      --m0;
    // keep a literal copy between two adjacent stars
    if (j > 0 && low[j - 1] >= 0)
      m0 = std::max(m0, 1);
    low[j] = m0;
  }

  bool any = false;
  TrapLanguage lang;
  lang.names = nt.names;
  lang.system = sys.name;
  lang.source_size = nt.length();
  lang.threshold = r;
  lang.sizes_checked = sizes_checked;
  for (std::size_t s = 0; s < segs.size(); ++s) {
    const int explicit_copies = low[s] >= 0 ? low[s] : segs[s].count;
    for (int c = 0; c < explicit_copies; ++c)
      lang.tokens.push_back({segs[s].letter, false});
    if (low[s] >= 0) {
      lang.tokens.push_back({segs[s].letter, true});
      any = true;
    }
  }
  if (!any)
    return std::nullopt;
  return lang;
}

namespace {

std::string set_label(const NormalizedLayout &nl, int slot, std::uint64_t mask) {
  std::string entry;
  for (int v = 0; v < nl.alphabet_size(slot); ++v)
    if ((mask >> v) & 1u)
      entry += (entry.empty() ? "{" : ", ") + nl.value_label(slot, v);
  return entry.empty() ? "∅" : entry + "}";
}

std::string render_columns(const ParamSystem &sys, int names,
                           const std::vector<const NormalizedLetter *> &letters,
                           const std::vector<std::string> &header) {
  const NormalizedLayout nl(sys, names);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> top{""};
  top.insert(top.end(), header.begin(), header.end());
  rows.push_back(std::move(top));
  std::vector<std::string> index{"index"};
  for (const auto *l : letters)
    index.push_back(l->index == kNoName ? "␣" : name_label(l->index));
  rows.push_back(std::move(index));
  for (int s = 0; s < nl.width(); ++s) {
    std::vector<std::string> row{nl.slot_label(s)};
    for (const auto *l : letters)
      row.push_back(set_label(nl, s, l->sets.at(static_cast<std::size_t>(s))));
    rows.push_back(std::move(row));
  }
  return detail::format_table(rows);
}

} // namespace

std::string render_normalized(const ParamSystem &sys, const NormalizedTrap &nt) {
  std::vector<const NormalizedLetter *> letters;
  std::vector<std::string> header;
  for (int k = 0; k < nt.length(); ++k) {
    letters.push_back(&nt.letters[static_cast<std::size_t>(k)]);
    header.push_back(std::to_string(k));
  }
  return render_columns(sys, nt.names, letters, header);
}

std::string render_language(const ParamSystem &sys, const TrapLanguage &lang) {
  std::vector<const NormalizedLetter *> letters;
  std::vector<std::string> header;
  for (const auto &t : lang.tokens) {
    letters.push_back(&t.letter);
    header.push_back(t.star ? "*" : "");
  }
  return render_columns(sys, lang.names, letters, header);
}

} // namespace paratrap
