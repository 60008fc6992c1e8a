#pragma once

#include <json.hpp>

#include "paratrap/abduction.hpp"
#include "paratrap/semantics.hpp"
#include "paratrap/word.hpp"

// JSON forms of words and languages. Letters are objects mapping slot labels
// ("loc", variable names, "3.t_lp", pointer names) to value labels; pointer
// values are written "^" (↑) and "_" (␣), and "↑"/"␣" are accepted on input.
namespace paratrap::io {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// {"size": N, "letters": [{slot: value}]}; blank pointer slots are omitted.
json to_json(const Layout &layout, const Configuration &c);
Configuration configuration_from_json(const ParamSystem &sys, const json &j);

/// {"size": N, "letters": [{slot: [values]}]}; empty entries are omitted.
json to_json(const Layout &layout, const Powerword &o);
Powerword powerword_from_json(const ParamSystem &sys, const json &j);

/// {"version", "system", "names": ["p0", ...], "threshold", "source_size",
///  "sizes_checked", "tokens": [{"letter": {"index": "p0"|null, "sets": {...}},
///  "star": bool}]}
json to_json(const ParamSystem &sys, const TrapLanguage &lang);
TrapLanguage language_from_json(const ParamSystem &sys, const json &j);

/// Accepts a single language, an array of languages, or {"languages": [...]}.
std::vector<TrapLanguage> languages_from_json(const ParamSystem &sys, const json &j);

json to_json(const Layout &layout, const Trace &t);

} // namespace paratrap::io
