#include "paratrap/io.hpp"

#include <map>

namespace paratrap::io {

namespace {

bool pointer_kind(SlotKind k) { return k == SlotKind::LoopPointer || k == SlotKind::GlobalPointer; }

std::string out_label(SlotKind kind, const std::string &label, int value) {
  if (pointer_kind(kind))
    return value == kUp ? "^" : "_";
  return label;
}

// Slot and value lookup by label for either kind of layout.
template <class L> struct Labels {
  const L &layout;
  std::map<std::string, int> slots;

  explicit Labels(const L &l) : layout(l) {
    for (int s = 0; s < l.width(); ++s)
      slots[l.slot_label(s)] = s;
  }

  int slot(const std::string &label) const {
    const auto it = slots.find(label);
    if (it == slots.end())
      throw Error("unknown slot \"" + label + "\"");
    return it->second;
  }

  int value(int slot, const json &j) const {
    if (!j.is_string())
      throw Error("slot \"" + layout.slot_label(slot) + "\": value must be a string");
    const std::string v = j.get<std::string>();
    if (pointer_kind(layout.info(slot).kind)) {
      if (v == "^" || v == "↑")
        return kUp;
      if (v == "_" || v == "␣")
        return kBlank;
    } else {
      for (int k = 0; k < layout.alphabet_size(slot); ++k)
        if (layout.value_label(slot, k) == v)
          return k;
    }
    throw Error("slot \"" + layout.slot_label(slot) + "\": unknown value \"" + v + "\"");
  }

  json sets_to_json(const std::uint64_t *masks) const {
    json out = json::object();
    for (int s = 0; s < layout.width(); ++s) {
      if (!masks[s])
        continue;
      json vals = json::array();
      for (int v = 0; v < layout.alphabet_size(s); ++v)
        if ((masks[s] >> v) & 1u)
          vals.push_back(out_label(layout.info(s).kind, layout.value_label(s, v), v));
      out[layout.slot_label(s)] = vals;
    }
    return out;
  }

  std::vector<std::uint64_t> sets_from_json(const json &j) const {
    if (!j.is_object())
      throw Error("letter must be an object of slot -> values");
    std::vector<std::uint64_t> masks(static_cast<std::size_t>(layout.width()), 0);
    for (const auto &[label, vals] : j.items()) {
      const int s = slot(label);
      if (!vals.is_array())
        throw Error("slot \"" + label + "\": expected a list of values");
      for (const auto &v : vals)
        masks[static_cast<std::size_t>(s)] |= std::uint64_t{1} << value(s, v);
    }
    return masks;
  }
};

int read_size(const json &j) {
  if (!j.is_object() || !j.contains("letters") || !j["letters"].is_array())
    throw Error("expected an object with a \"letters\" array");
  const int n = static_cast<int>(j["letters"].size());
  if (j.contains("size") && j["size"].get<int>() != n)
    throw Error("\"size\" does not match the number of letters");
  if (n < 1)
    throw Error("a word needs at least one letter");
  return n;
}

} // namespace

json to_json(const Layout &layout, const Configuration &c) {
  json letters = json::array();
  for (int a = 0; a < c.length(); ++a) {
    json letter = json::object();
    for (int s = 0; s < layout.width(); ++s) {
      const SlotKind kind = layout.info(s).kind;
      if (pointer_kind(kind) && c.at(a, s) == kBlank)
        continue;
      letter[layout.slot_label(s)] = out_label(kind, layout.value_label(s, c.at(a, s)), c.at(a, s));
    }
    letters.push_back(letter);
  }
  return {{"size", c.length()}, {"letters", letters}};
}

Configuration configuration_from_json(const ParamSystem &sys, const json &j) {
  const int n = read_size(j);
  const Layout layout(sys, n);
  const Labels<Layout> labels(layout);
  Configuration c(n, layout.width());
  for (int a = 0; a < n; ++a) {
    const json &letter = j["letters"][static_cast<std::size_t>(a)];
    std::vector<bool> seen(static_cast<std::size_t>(layout.width()), false);
    for (const auto &[label, v] : letter.items()) {
      const int s = labels.slot(label);
      c.at(a, s) = static_cast<std::uint8_t>(labels.value(s, v));
      seen[static_cast<std::size_t>(s)] = true;
    }
    for (int s = 0; s <= layout.num_vars(); ++s)
      if (!seen[static_cast<std::size_t>(s)])
        throw Error("letter " + std::to_string(a) + " has no value for \"" + layout.slot_label(s) + "\"");
  }
  if (!is_well_formed(layout, c))
    throw Error("configuration is not well formed (check the pointer marks)");
  return c;
}

json to_json(const Layout &layout, const Powerword &o) {
  const Labels<Layout> labels(layout);
  json letters = json::array();
  for (int a = 0; a < o.length(); ++a)
    letters.push_back(labels.sets_to_json(&o.at(a, 0)));
  return {{"size", o.length()}, {"letters", letters}};
}

Powerword powerword_from_json(const ParamSystem &sys, const json &j) {
  const int n = read_size(j);
  const Layout layout(sys, n);
  const Labels<Layout> labels(layout);
  Powerword o(n, layout.width());
  for (int a = 0; a < n; ++a) {
    const auto masks = labels.sets_from_json(j["letters"][static_cast<std::size_t>(a)]);
    for (int s = 0; s < layout.width(); ++s)
      o.at(a, s) = masks[static_cast<std::size_t>(s)];
  }
  return o;
}

json to_json(const ParamSystem &sys, const TrapLanguage &lang) {
  const NormalizedLayout nl(sys, lang.names);
  const Labels<NormalizedLayout> labels(nl);
  json names = json::array();
  for (int k = 0; k < lang.names; ++k)
    names.push_back(name_label(k));
  json tokens = json::array();
  for (const auto &t : lang.tokens) {
    json letter = {{"index", t.letter.index == kNoName ? json(nullptr) : json(name_label(t.letter.index))},
                   {"sets", labels.sets_to_json(t.letter.sets.data())}};
    tokens.push_back({{"letter", letter}, {"star", t.star}});
  }
  return {{"version", kSchemaVersion},      {"system", lang.system},
          {"names", names},                 {"threshold", lang.threshold},
          {"source_size", lang.source_size}, {"sizes_checked", lang.sizes_checked},
          {"tokens", tokens}};
}

TrapLanguage language_from_json(const ParamSystem &sys, const json &j) {
  if (!j.is_object() || !j.contains("tokens") || !j["tokens"].is_array())
    throw Error("language: expected an object with a \"tokens\" array");
  TrapLanguage lang;
  lang.system = j.value("system", sys.name);
  if (lang.system != sys.name)
    throw Error("language belongs to system \"" + lang.system + "\", not \"" + sys.name + "\"");
  lang.names = j.contains("names") ? static_cast<int>(j["names"].size()) : 0;
  lang.threshold = j.value("threshold", 0);
  lang.source_size = j.value("source_size", 0);
  lang.sizes_checked = j.value("sizes_checked", std::vector<int>{});
  const NormalizedLayout nl(sys, lang.names);
  const Labels<NormalizedLayout> labels(nl);
  for (const auto &t : j["tokens"]) {
    Token tok;
    tok.star = t.value("star", false);
    const json &letter = t.at("letter");
    const json &index = letter.contains("index") ? letter["index"] : json(nullptr);
    if (!index.is_null()) {
      const std::string label = index.get<std::string>();
      tok.letter.index = -1;
      for (int k = 0; k < lang.names; ++k)
        if (name_label(k) == label)
          tok.letter.index = k;
      if (tok.letter.index < 0)
        throw Error("language: unknown name \"" + label + "\"");
    }
    tok.letter.sets = labels.sets_from_json(letter.value("sets", json::object()));
    lang.tokens.push_back(std::move(tok));
  }
  if (auto err = check_language(sys, lang))
    throw Error("language: " + *err);
  return lang;
}

std::vector<TrapLanguage> languages_from_json(const ParamSystem &sys, const json &j) {
  const json *list = &j;
  if (j.is_object() && j.contains("languages"))
    list = &j["languages"];
  std::vector<TrapLanguage> out;
  if (list->is_array()) {
    for (const auto &l : *list)
      out.push_back(language_from_json(sys, l));
  } else {
    out.push_back(language_from_json(sys, *list));
  }
  return out;
}

json to_json(const Layout &layout, const Trace &t) {
  json configs = json::array();
  for (const auto &c : t.configurations)
    configs.push_back(to_json(layout, c));
  json steps = json::array();
  for (const auto &o : t.steps)
    steps.push_back(format_occurrence(layout, o));
  return {{"configurations", configs}, {"steps", steps}};
}

} // namespace paratrap::io
