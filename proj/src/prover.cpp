#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <regex>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include "paratrap/folcheck.hpp"
#include "paratrap/semantics.hpp"

namespace paratrap::fo {

namespace fs = std::filesystem;

std::string to_string(Status s) {
  switch (s) {
  case Status::Theorem:
    return "theorem";
  case Status::CounterSatisfiable:
    return "countersatisfiable";
  case Status::Timeout:
    return "timeout";
  case Status::Error:
    return "error";
  }
  return "error";
}

Status status_from_szs(const std::string &word) {
  if (word == "Theorem" || word == "Unsatisfiable" || word == "ContradictoryAxioms")
    return Status::Theorem;
  if (word == "CounterSatisfiable" || word == "Satisfiable")
    return Status::CounterSatisfiable;
  if (word == "Timeout" || word == "ResourceOut")
    return Status::Timeout;
  return Status::Error;
}

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string &content) {
    std::string tmpl = (fs::temp_directory_path() / "paratrap-XXXXXX.p").string();
    const int fd = mkstemps(tmpl.data(), 2);
    if (fd < 0)
      throw Error("cannot create temporary file");
    close(fd);
    path = tmpl;
    std::ofstream(path) << content;
  }
  ~TempFile() {
    std::error_code ec;
    fs::remove(path, ec);
  }
};

std::string substitute(std::string arg, const std::string &key, const std::string &value) {
  for (std::size_t at = arg.find(key); at != std::string::npos; at = arg.find(key, at + value.size()))
    arg.replace(at, key.size(), value);
  return arg;
}

struct RunResult {
  std::string output;
  bool timed_out = false;
  int exit_status = -1;
  std::string spawn_error;
};

RunResult run_command(const std::vector<std::string> &argv, double limit_seconds) {
  RunResult r;
  int fds[2];
  if (pipe(fds) != 0) {
    r.spawn_error = "pipe failed";
    return r;
  }
  const pid_t pid = fork();
  if (pid < 0) {
    close(fds[0]);
    close(fds[1]);
    r.spawn_error = "fork failed";
    return r;
  }
  if (pid == 0) {
    setpgid(0, 0);
    dup2(fds[1], STDOUT_FILENO);
    dup2(fds[1], STDERR_FILENO);
    close(fds[0]);
    close(fds[1]);
    std::vector<char *> args;
    for (const auto &a : argv)
      args.push_back(const_cast<char *>(a.c_str()));
    args.push_back(nullptr);
    execvp(args[0], args.data());
    _exit(127);
  }
  setpgid(pid, pid);
  close(fds[1]);
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::milliseconds(static_cast<long>(limit_seconds * 1000));
  char buf[4096];
  for (;;) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                          deadline - std::chrono::steady_clock::now())
                          .count();
    if (left <= 0) {
      r.timed_out = true;
      break;
    }
    pollfd p{fds[0], POLLIN, 0};
    const int ready = poll(&p, 1, static_cast<int>(std::min<long>(left, 1000)));
    if (ready < 0 && errno != EINTR)
      break;
    if (ready <= 0)
      continue;
    const ssize_t n = read(fds[0], buf, sizeof buf);
    if (n <= 0)
      break;
    r.output.append(buf, static_cast<std::size_t>(n));
  }
  close(fds[0]);
  if (r.timed_out)
    kill(-pid, SIGKILL);
  int status = 0;
  waitpid(pid, &status, 0);
  if (WIFEXITED(status))
    r.exit_status = WEXITSTATUS(status);
  return r;
}

std::string last_line(const std::string &s) {
  std::size_t end = s.find_last_not_of("\r\n");
  if (end == std::string::npos)
    return {};
  const std::size_t start = s.rfind('\n', end);
  return s.substr(start == std::string::npos ? 0 : start + 1,
                  end - (start == std::string::npos ? 0 : start + 1) + 1);
}

bool executable(const fs::path &p) {
  return !p.empty() && fs::is_regular_file(p) && access(p.c_str(), X_OK) == 0;
}

std::optional<fs::path> on_path(const std::string &name) {
  const char *path = std::getenv("PATH");
  if (!path)
    return std::nullopt;
  std::string all = path;
  std::size_t start = 0;
  for (;;) {
    const std::size_t end = all.find(':', start);
    const fs::path cand = fs::path(all.substr(start, end - start)) / name;
    if (executable(cand))
      return cand;
    if (end == std::string::npos)
      return std::nullopt;
    start = end + 1;
  }
}

// argv conventions of the known provers; anything else is assumed to take
// the adapter's "--timeout S file" form.
ProverConfig config_for(const fs::path &exe, int timeout) {
  const std::string base = exe.filename().string();
  ProverConfig cfg;
  cfg.timeout_seconds = timeout;
  if (base.find("vampire") != std::string::npos)
    cfg.command = {exe.string(), "--mode", "casc", "-t", "{timeout}", "{file}"};
  else if (base.find("eprover") != std::string::npos)
    cfg.command = {exe.string(), "--auto", "--tptp3-format", "-s", "--cpu-limit={timeout}", "{file}"};
  else
    cfg.command = {exe.string(), "--timeout", "{timeout}", "{file}"};
  return cfg;
}

bool adapter_usable(const fs::path &exe) {
  if (!executable(exe))
    return false;
  const RunResult r = run_command({exe.string(), "--check"}, 30);
  return !r.timed_out && r.exit_status == 0;
}

} // namespace

Verdict run_prover(const std::string &tptp, const ProverConfig &cfg) {
  Verdict v;
  if (cfg.command.empty()) {
    v.message = "no prover command";
    return v;
  }
  TempFile file(tptp);
  const std::string timeout = std::to_string(cfg.timeout_seconds);
  std::vector<std::string> argv;
  bool has_file = false;
  for (const auto &a : cfg.command) {
    has_file = has_file || a.find("{file}") != std::string::npos;
    argv.push_back(substitute(substitute(a, "{file}", file.path), "{timeout}", timeout));
  }
  if (!has_file)
    argv.push_back(file.path);

  const auto start = std::chrono::steady_clock::now();
  // grace period on top of the prover's own limit
  const RunResult r = run_command(argv, cfg.timeout_seconds + 5.0);
  v.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!r.spawn_error.empty()) {
    v.message = r.spawn_error;
    return v;
  }
  static const std::regex szs(R"(SZS status (\w+))");
  std::smatch m;
  std::string::const_iterator from = r.output.begin();
  while (std::regex_search(from, r.output.end(), m, szs)) {
    v.szs = m[1];
    from = m.suffix().first;
  }
  if (!v.szs.empty()) {
    v.status = status_from_szs(v.szs);
  } else if (r.timed_out) {
    v.status = Status::Timeout;
  } else {
    v.status = Status::Error;
  }
  if (r.exit_status == 127 && v.szs.empty())
    v.message = "cannot execute " + argv[0];
  else
    v.message = last_line(r.output);
  return v;
}

std::optional<ProverConfig> discover_prover(const std::string &explicit_path, int timeout_seconds) {
  auto from_path = [&](const std::string &p) -> std::optional<ProverConfig> {
    fs::path exe = p;
    if (exe.filename() == exe && !fs::exists(exe)) {
      auto found = on_path(p);
      if (!found)
        return std::nullopt;
      exe = *found;
    }
    if (!executable(exe))
      return std::nullopt;
    return config_for(exe, timeout_seconds);
  };
  if (!explicit_path.empty())
    return from_path(explicit_path);
  if (const char *env = std::getenv("PARATRAP_PROVER"); env && *env)
    return from_path(env);

  std::vector<fs::path> adapters;
#ifdef PARATRAP_TOOLS_DIR
  adapters.emplace_back(fs::path(PARATRAP_TOOLS_DIR) / "paratrap-cvc5");
#endif
  if (auto p = on_path("paratrap-cvc5"))
    adapters.push_back(*p);
  for (const auto &a : adapters)
    if (adapter_usable(a))
      return config_for(a, timeout_seconds);
  for (const char *name : {"vampire", "eprover"})
    if (auto p = on_path(name))
      return config_for(*p, timeout_seconds);
  return std::nullopt;
}

InductivityReport check_inductivity(const ParamSystem &sys, const std::vector<TrapLanguage> &langs,
                                    const SafetyProperty &p, const ProverConfig &cfg,
                                    const ProblemOptions &options) {
  InductivityReport report;
  // psi forces two distinct agents, so the one-agent instance is decided
  // by exhaustive search instead.
  report.single_agent_ok =
      check_property_explicit(sys, 1, p).status == ExplicitVerdict::Status::Holds;

  const auto problems = build_problems(sys, langs, p, options);
  std::vector<std::future<Verdict>> jobs;
  for (const auto &prob : problems)
    jobs.push_back(std::async(std::launch::async,
                              [&cfg, text = emit_tptp(prob)] { return run_prover(text, cfg); }));
  bool all = true;
  for (std::size_t k = 0; k < problems.size(); ++k) {
    report.entries.push_back({problems[k].name, jobs[k].get()});
    all = all && report.entries.back().verdict.status == Status::Theorem;
  }
  report.proved = report.single_agent_ok && all;
  return report;
}

} // namespace paratrap::fo
