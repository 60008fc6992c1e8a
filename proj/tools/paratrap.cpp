// Command-line front end: verify, explore, emit-tptp, check-trap, abduct.
//
// Exit codes: 0 proved / holds / is a trap / language found, 1 the negative
// outcome, 2 usage or input error, 3 environment error (no prover, I/O).

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "paratrap/abduction.hpp"
#include "paratrap/folcheck.hpp"
#include "paratrap/io.hpp"
#include "paratrap/pipeline.hpp"
#include "paratrap/semantics.hpp"
#include "paratrap/traps.hpp"

using namespace paratrap;
using io::json;

namespace {

constexpr int kOk = 0, kNegative = 1, kUsage = 2, kEnvironment = 3;

struct EnvironmentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw EnvironmentError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string &path, const std::string &text) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty())
    std::filesystem::create_directories(parent);
  std::ofstream out(path);
  if (!out || !(out << text))
    throw EnvironmentError("cannot write " + path);
}

json read_json(const std::string &path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error &e) {
    throw Error(path + ": " + e.what());
  }
}

// A path to a .psys file, or the name of a bundled model.
ParamSystem load_model(const std::string &spec) {
  if (std::filesystem::is_regular_file(spec))
    return parse_system(read_file(spec));
  const auto names = builtin_names();
  if (std::find(names.begin(), names.end(), spec) == names.end()) {
    std::string all;
    for (const auto &n : names)
      all += (all.empty() ? "" : ", ") + n;
    throw Error("no model file or bundled model named \"" + spec + "\" (bundled: " + all + ")");
  }
  return builtin(spec);
}

const SafetyProperty &pick_property(const ParamSystem &sys, const std::string &name) {
  if (!name.empty())
    return sys.property(name);
  if (sys.properties.empty())
    throw Error("model \"" + sys.name + "\" declares no property");
  return sys.properties.front();
}

std::pair<int, int> parse_sizes(const std::string &s) {
  const auto dots = s.find("..");
  try {
    if (dots == std::string::npos) {
      const int n = std::stoi(s);
      return {n, n};
    }
    return {std::stoi(s.substr(0, dots)), std::stoi(s.substr(dots + 2))};
  } catch (const std::exception &) {
    throw Error("--sizes expects N or A..B, got \"" + s + "\"");
  }
}

std::optional<fo::ProverConfig> find_prover(const std::string &path, int timeout) {
  auto cfg = fo::discover_prover(path, timeout);
  if (!cfg && !path.empty())
    throw EnvironmentError("prover \"" + path + "\" is not executable");
  return cfg;
}

struct Common {
  bool json_out = false;
};

int cmd_verify(const Common &common, const std::string &model, const std::string &property,
               const std::string &sizes, int max_iterations, const std::string &prover_path,
               int timeout, bool emit_only, const std::string &out_dir, bool include_p,
               bool size_floor, const std::string &cnf_dir, std::uint64_t seed,
               const std::string &report_path, bool quiet) {
  const ParamSystem sys = load_model(model);
  const SafetyProperty &p = pick_property(sys, property);
  VerifyOptions opt;
  std::tie(opt.min_size, opt.max_size) = parse_sizes(sizes);
  opt.max_iterations = max_iterations;
  opt.assume_property_before = include_p;
  opt.size_floor = size_floor;
  opt.emit_cnf_dir = cnf_dir;
  opt.seed = seed;
  opt.tptp_dir = out_dir;
  if (!emit_only)
    opt.prover = find_prover(prover_path, timeout);
  if (!quiet)
    opt.log = [](const std::string &line) { std::cerr << line << "\n"; };

  const VerificationReport r = verify(sys, p, opt);
  const json j = to_json(sys, r);
  if (!report_path.empty())
    write_file(report_path, j.dump(2) + "\n");
  std::cout << (common.json_out ? j.dump(2) + "\n" : render_report(sys, r));
  switch (r.verdict) {
  case VerificationReport::Verdict::Proved:
    return kOk;
  case VerificationReport::Verdict::NotProved:
    return kNegative;
  case VerificationReport::Verdict::ProverUnavailable:
    return emit_only ? kOk : kEnvironment;
  }
  return kNegative;
}

int cmd_explore(const Common &common, const std::string &model, const std::string &property, int n,
                std::size_t bound) {
  const ParamSystem sys = load_model(model);
  const SafetyProperty &p = pick_property(sys, property);
  const ExplicitVerdict v = check_property_explicit(sys, n, p, bound ? std::optional(bound) : std::nullopt);
  const Layout l(sys, n);
  const char *status = v.status == ExplicitVerdict::Status::Holds      ? "holds"
                       : v.status == ExplicitVerdict::Status::Violated ? "violated"
                                                                       : "truncated";
  if (common.json_out) {
    json j = {{"version", io::kSchemaVersion}, {"system", sys.name}, {"property", p.name},
              {"size", n},                     {"status", status},   {"explored", v.explored}};
    if (v.trace)
      j["trace"] = io::to_json(l, *v.trace);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << p.name << " at N=" << n << ": " << status << " (" << v.explored << " configurations)\n";
    if (v.trace)
      std::cout << render_trace(l, *v.trace);
  }
  return v.status == ExplicitVerdict::Status::Holds ? kOk : kNegative;
}

int cmd_emit_tptp(const Common &common, const std::string &model, const std::string &property,
                  const std::string &lang_path, const std::string &out_dir, int size_floor) {
  const ParamSystem sys = load_model(model);
  const SafetyProperty &p = pick_property(sys, property);
  std::vector<TrapLanguage> langs;
  if (!lang_path.empty())
    langs = io::languages_from_json(sys, read_json(lang_path));
  fo::ProblemOptions opt;
  opt.size_floor = size_floor;
  json files = json::array();
  for (const auto &prob : fo::build_problems(sys, langs, p, opt)) {
    const std::string path = (std::filesystem::path(out_dir) / (prob.name + ".p")).string();
    write_file(path, fo::emit_tptp(prob));
    files.push_back(path);
  }
  if (common.json_out)
    std::cout << json{{"files", files}}.dump(2) << "\n";
  else
    for (const auto &f : files)
      std::cout << f.get<std::string>() << "\n";
  return kOk;
}

int cmd_check_trap(const Common &common, const std::string &model, const std::string &trap_path,
                   bool exact) {
  const ParamSystem sys = load_model(model);
  const Powerword o = io::powerword_from_json(sys, read_json(trap_path));
  const Instance inst(sys, o.length());
  const StructuralCheck sc = check_trap_structural(inst, o);
  const auto violation = find_trap_violation(inst, o);
  std::optional<bool> exact_result;
  if (exact)
    exact_result = is_trap_exact(inst, o);
  const bool ok = sc.ok();
  if (common.json_out) {
    json j = {{"size", o.length()},
              {"initial_intersects", sc.initial_intersects},
              {"structural", ok},
              {"inductive", !violation}};
    if (sc.violating_occurrence)
      j["structural_witness"] =
          format_occurrence(inst.layout(), inst.occurrences()[static_cast<std::size_t>(*sc.violating_occurrence)]);
    if (violation)
      j["step"] = {{"before", io::to_json(inst.layout(), violation->before)},
                   {"occurrence", format_occurrence(inst.layout(), inst.occurrences()[static_cast<std::size_t>(violation->occurrence)])},
                   {"after", io::to_json(inst.layout(), violation->after)}};
    if (exact_result)
      j["exact"] = *exact_result;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << render_powerword(inst.layout(), o);
    std::cout << "initial configuration intersects: " << (sc.initial_intersects ? "yes" : "no") << "\n";
    std::cout << "structural trap: " << (ok ? "yes" : "no") << "\n";
    if (sc.violating_occurrence)
      std::cout << "  witness: "
                << format_occurrence(inst.layout(), inst.occurrences()[static_cast<std::size_t>(*sc.violating_occurrence)])
                << "\n";
    std::cout << "inductive: " << (violation ? "no" : "yes") << "\n";
    if (violation) {
      std::cout << "  step leaving the trap: "
                << format_occurrence(inst.layout(), inst.occurrences()[static_cast<std::size_t>(violation->occurrence)])
                << "\n"
                << render_configuration(inst.layout(), violation->before) << "  ->\n"
                << render_configuration(inst.layout(), violation->after);
    }
    if (exact_result)
      std::cout << "trap (exhaustive): " << (*exact_result ? "yes" : "no") << "\n";
  }
  return ok ? kOk : kNegative;
}

int cmd_abduct(const Common &common, const std::string &model, const std::string &trap_path,
               const std::string &out_path, int threshold) {
  const ParamSystem sys = load_model(model);
  const Powerword o = io::powerword_from_json(sys, read_json(trap_path));
  const NormalizedTrap nt = normalize(sys, o);
  AbductionOptions opt;
  opt.threshold = threshold;
  const auto lang = abduct(sys, nt, {o.length()}, opt);
  if (common.json_out) {
    std::cout << (lang ? io::to_json(sys, *lang) : json(nullptr)).dump(2) << "\n";
  } else {
    std::cout << "normalized:\n" << render_normalized(sys, nt);
    if (lang)
      std::cout << "language:\n" << render_language(sys, *lang);
    else
      std::cout << "no generalizable run\n";
  }
  if (lang && !out_path.empty())
    write_file(out_path, io::to_json(sys, *lang).dump(2) + "\n");
  return lang ? kOk : kNegative;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Parameterized safety verification with trap languages"};
  app.require_subcommand(1);
  Common common;
  app.add_flag("--json", common.json_out, "Print JSON instead of text");

  std::string model, property, sizes = "2..8", prover_path, out_dir, cnf_dir, report_path;
  std::string lang_path, trap_path;
  int max_iterations = 100000, timeout = 60, n = 3, size_floor = 0, threshold = 0;
  bool emit_only = false, no_include_p = false, floor_flag = false, quiet = false, exact = false;
  std::uint64_t seed = 0;
  std::size_t bound = 0;

  auto add_model = [&](CLI::App *c, bool with_property) {
    c->add_option("model", model, "Model file (.psys) or bundled model name")->required();
    if (with_property)
      c->add_option("property", property, "Property name (default: the first one)");
  };

  auto *verify_cmd = app.add_subcommand("verify", "CEGAR per size, abduction, first-order check");
  add_model(verify_cmd, true);
  verify_cmd->add_option("--sizes", sizes, "Instance sizes, N or A..B")->capture_default_str();
  verify_cmd->add_option("--max-iterations", max_iterations, "CEGAR iterations per size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  verify_cmd->add_option("--prover", prover_path, "Prover executable (default: $PARATRAP_PROVER, then search)");
  verify_cmd->add_option("--timeout", timeout, "Seconds per prover call")->capture_default_str();
  verify_cmd->add_flag("--emit-tptp-only", emit_only, "Do not call a prover; write the problems and stop");
  verify_cmd->add_option("--out", out_dir, "Directory for the TPTP problems");
  verify_cmd->add_flag("--no-assume-property", no_include_p,
                       "Counterexample steps need not start in a configuration satisfying the property");
  verify_cmd->add_flag("--size-floor", floor_flag, "Add an axiom: at least max analysed N agents");
  verify_cmd->add_option("--emit-cnf", cnf_dir, "Directory for DIMACS files of the SAT queries");
  verify_cmd->add_option("--seed", seed, "Solver seed")->capture_default_str();
  verify_cmd->add_option("--report", report_path, "Write the JSON report to this file");
  verify_cmd->add_flag("-q,--quiet", quiet, "No progress lines on stderr");

  auto *explore_cmd = app.add_subcommand("explore", "Exhaustive reachability at one size");
  add_model(explore_cmd, true);
  explore_cmd->add_option("-N,--size", n, "Number of agents")->check(CLI::PositiveNumber)->capture_default_str();
  explore_cmd->add_option("--bound", bound, "Stop after this many configurations (0: none)");

  auto *emit_cmd = app.add_subcommand("emit-tptp", "Write the first-order inductivity problems");
  add_model(emit_cmd, true);
  emit_cmd->add_option("--languages", lang_path, "JSON file with trap languages");
  emit_cmd->add_option("--out", out_dir, "Output directory")->required();
  emit_cmd->add_option("--size-floor", size_floor, "Add an axiom: at least this many agents");

  auto *check_cmd = app.add_subcommand("check-trap", "Check a powerword given as JSON");
  add_model(check_cmd, false);
  check_cmd->add_option("--trap", trap_path, "JSON powerword")->required();
  check_cmd->add_flag("--exact", exact, "Also check by enumerating all configurations");

  auto *abduct_cmd = app.add_subcommand("abduct", "Normalize a trap and generalize it to a language");
  add_model(abduct_cmd, false);
  abduct_cmd->add_option("--trap", trap_path, "JSON powerword")->required();
  abduct_cmd->add_option("--out", out_dir, "Write the language JSON to this file");
  abduct_cmd->add_option("--threshold", threshold, "Repetition threshold (default: rendezvous degree)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*verify_cmd)
      return cmd_verify(common, model, property, sizes, max_iterations, prover_path, timeout, emit_only,
                        out_dir, !no_include_p, floor_flag, cnf_dir, seed, report_path, quiet);
    if (*explore_cmd)
      return cmd_explore(common, model, property, n, bound);
    if (*emit_cmd)
      return cmd_emit_tptp(common, model, property, lang_path, out_dir, size_floor);
    if (*check_cmd)
      return cmd_check_trap(common, model, trap_path, exact);
    if (*abduct_cmd)
      return cmd_abduct(common, model, trap_path, out_dir, threshold);
  } catch (const EnvironmentError &e) {
    std::cerr << "paratrap: " << e.what() << "\n";
    return kEnvironment;
  } catch (const std::filesystem::filesystem_error &e) {
    std::cerr << "paratrap: " << e.what() << "\n";
    return kEnvironment;
  } catch (const ModelError &e) {
    std::cerr << "paratrap: " << e.what() << "\n";
    return kUsage;
  } catch (const Error &e) {
    std::cerr << "paratrap: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
