#include "paratrap/sat.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <unistd.h>

#include "paratrap/model.hpp"

namespace paratrap::sat {

std::string to_string(Result r) {
  switch (r) {
  case Result::Sat:
    return "sat";
  case Result::Unsat:
    return "unsat";
  case Result::Unknown:
    return "unknown";
  }
  return "?";
}

std::string to_dimacs(const Cnf &cnf, const std::string &comment) {
  std::ostringstream out;
  if (!comment.empty()) {
    std::istringstream lines(comment);
    for (std::string line; std::getline(lines, line);)
      out << "c " << line << "\n";
  }
  out << "p cnf " << cnf.num_vars << " " << cnf.clauses.size() << "\n";
  for (const auto &c : cnf.clauses) {
    for (int l : c)
      out << l << " ";
    out << "0\n";
  }
  return out.str();
}

Cnf parse_dimacs(const std::string &text) {
  std::istringstream in(text);
  Cnf cnf;
  bool header = false;
  std::size_t expected = 0;
  std::vector<int> cur;
  std::string tok;
  while (in >> tok) {
    if (tok == "c") {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    if (tok == "p") {
      std::string fmt;
      long long vars = 0, clauses = 0;
      if (!(in >> fmt >> vars >> clauses) || fmt != "cnf" || vars < 0 || clauses < 0)
        throw Error("malformed DIMACS header");
      cnf.num_vars = static_cast<int>(vars);
      expected = static_cast<std::size_t>(clauses);
      header = true;
      continue;
    }
    if (!header)
      throw Error("DIMACS clause before header");
    long long lit = 0;
    try {
      std::size_t used = 0;
      lit = std::stoll(tok, &used);
      if (used != tok.size())
        throw Error("");
    } catch (...) {
      throw Error("malformed DIMACS literal '" + tok + "'");
    }
    if (lit == 0) {
      cnf.clauses.push_back(std::move(cur));
      cur.clear();
    } else {
      if (std::llabs(lit) > cnf.num_vars)
        throw Error("DIMACS literal out of range: " + tok);
      cur.push_back(static_cast<int>(lit));
    }
  }
  if (!cur.empty())
    throw Error("unterminated DIMACS clause");
  if (!header)
    throw Error("missing DIMACS header");
  if (cnf.clauses.size() != expected)
    throw Error("DIMACS clause count mismatch");
  return cnf;
}

void Backend::load(const Cnf &cnf) {
  ensure_vars(cnf.num_vars);
  for (const auto &c : cnf.clauses)
    add_clause(std::span<const int>(c));
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::uint8_t kFalse = 0, kTrue = 1, kUndef = 2;

inline int lit_of(int dimacs) { return 2 * (std::abs(dimacs) - 1) + (dimacs < 0 ? 1 : 0); }
inline int var_of(int lit) { return lit >> 1; }

double luby(double y, int x) {
  int size = 1, seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  double r = 1;
  for (int k = 0; k < seq; ++k)
    r *= y;
  return r;
}

} // namespace

struct CdclSolver::Impl {
  struct Clause {
    std::vector<int> lits;
    bool learnt = false;
    bool deleted = false;
    double activity = 0;
  };
  struct Watch {
    int cref;
    int blocker;
  };

  Options opt;
  bool ok = true;
  std::vector<Clause> clauses;
  std::vector<int> learnt_refs;
  std::vector<std::vector<Watch>> watches; // by literal
  std::vector<std::uint8_t> assigns;
  std::vector<std::uint8_t> phase;
  std::vector<int> level;
  std::vector<int> reason;
  std::vector<double> activity;
  std::vector<char> seen;
  std::vector<int> trail;
  std::vector<int> trail_lim;
  std::size_t qhead = 0;
  std::vector<bool> model;

  // binary max-heap on activity
  std::vector<int> heap;
  std::vector<int> heap_pos;

  double var_inc = 1, var_decay = 0.95;
  double cla_inc = 1, cla_decay = 0.999;
  double max_learnts = 0;
  long long total_conflicts = 0;
  std::mt19937_64 rng;

  explicit Impl(Options o) : opt(o), rng(o.seed) {}

  int nvars() const { return static_cast<int>(assigns.size()); }
  int decision_level() const { return static_cast<int>(trail_lim.size()); }

  std::uint8_t lit_value(int l) const {
    const std::uint8_t a = assigns[static_cast<std::size_t>(var_of(l))];
    return a == kUndef ? kUndef : static_cast<std::uint8_t>(a ^ (l & 1));
  }

  // heap ------------------------------------------------------------------
  bool heap_less(int a, int b) const {
    return activity[static_cast<std::size_t>(a)] > activity[static_cast<std::size_t>(b)];
  }
  void heap_up(std::size_t i) {
    const int v = heap[i];
    while (i > 0) {
      const std::size_t p = (i - 1) / 2;
      if (!heap_less(v, heap[p]))
        break;
      heap[i] = heap[p];
      heap_pos[static_cast<std::size_t>(heap[i])] = static_cast<int>(i);
      i = p;
    }
    heap[i] = v;
    heap_pos[static_cast<std::size_t>(v)] = static_cast<int>(i);
  }
  void heap_down(std::size_t i) {
    const int v = heap[i];
    for (;;) {
      std::size_t c = 2 * i + 1;
      if (c >= heap.size())
        break;
      if (c + 1 < heap.size() && heap_less(heap[c + 1], heap[c]))
        ++c;
      if (!heap_less(heap[c], v))
        break;
      heap[i] = heap[c];
      heap_pos[static_cast<std::size_t>(heap[i])] = static_cast<int>(i);
      i = c;
    }
    heap[i] = v;
    heap_pos[static_cast<std::size_t>(v)] = static_cast<int>(i);
  }
  void heap_insert(int v) {
    if (heap_pos[static_cast<std::size_t>(v)] >= 0)
      return;
    heap.push_back(v);
    heap_up(heap.size() - 1);
  }
  int heap_pop() {
    const int top = heap.front();
    heap_pos[static_cast<std::size_t>(top)] = -1;
    heap.front() = heap.back();
    heap.pop_back();
    if (!heap.empty()) {
      heap_pos[static_cast<std::size_t>(heap.front())] = 0;
      heap_down(0);
    }
    return top;
  }

  // -----------------------------------------------------------------------
  int new_var() {
    const int v = nvars();
    assigns.push_back(kUndef);
    phase.push_back(0);
    level.push_back(0);
    reason.push_back(-1);
    activity.push_back(opt.seed ? std::uniform_real_distribution<double>(0, 1e-5)(rng) : 0.0);
    seen.push_back(0);
    heap_pos.push_back(-1);
    watches.emplace_back();
    watches.emplace_back();
    heap_insert(v);
    return v + 1;
  }

  void enqueue(int l, int from) {
    const auto v = static_cast<std::size_t>(var_of(l));
    assigns[v] = static_cast<std::uint8_t>((l & 1) ? kFalse : kTrue);
    level[v] = decision_level();
    reason[v] = from;
    trail.push_back(l);
  }

  void attach(int cref) {
    const auto &c = clauses[static_cast<std::size_t>(cref)];
    watches[static_cast<std::size_t>(c.lits[0])].push_back({cref, c.lits[1]});
    watches[static_cast<std::size_t>(c.lits[1])].push_back({cref, c.lits[0]});
  }

  void cancel_until(int lvl) {
    if (decision_level() <= lvl)
      return;
    for (std::size_t k = trail.size(); k > static_cast<std::size_t>(trail_lim[static_cast<std::size_t>(lvl)]);) {
      --k;
      const auto v = static_cast<std::size_t>(var_of(trail[k]));
      phase[v] = assigns[v];
      assigns[v] = kUndef;
      reason[v] = -1;
      heap_insert(static_cast<int>(v));
    }
    trail.resize(static_cast<std::size_t>(trail_lim[static_cast<std::size_t>(lvl)]));
    trail_lim.resize(static_cast<std::size_t>(lvl));
    qhead = trail.size();
  }

  int propagate() {
    int confl = -1;
    while (qhead < trail.size()) {
      const int falsified = trail[qhead++] ^ 1;
      auto &ws = watches[static_cast<std::size_t>(falsified)];
      std::size_t i = 0, j = 0;
      while (i < ws.size()) {
        const Watch w = ws[i++];
        if (lit_value(w.blocker) == kTrue) {
          ws[j++] = w;
          continue;
        }
        Clause &c = clauses[static_cast<std::size_t>(w.cref)];
        if (c.deleted)
          continue;
        if (c.lits[0] == falsified)
          std::swap(c.lits[0], c.lits[1]);
        const int first = c.lits[0];
        if (first != w.blocker && lit_value(first) == kTrue) {
          ws[j++] = {w.cref, first};
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.lits.size(); ++k)
          if (lit_value(c.lits[k]) != kFalse) {
            std::swap(c.lits[1], c.lits[k]);
            watches[static_cast<std::size_t>(c.lits[1])].push_back({w.cref, first});
            moved = true;
            break;
          }
        if (moved)
          continue;
        ws[j++] = {w.cref, first};
        if (lit_value(first) == kFalse) {
          confl = w.cref;
          qhead = trail.size();
          while (i < ws.size())
            ws[j++] = ws[i++];
        } else {
          enqueue(first, w.cref);
        }
      }
      ws.resize(j);
      if (confl >= 0)
        break;
    }
    return confl;
  }

  void bump_var(int v) {
    auto &a = activity[static_cast<std::size_t>(v)];
    if ((a += var_inc) > 1e100) {
      for (auto &x : activity)
        x *= 1e-100;
      var_inc *= 1e-100;
    }
    if (heap_pos[static_cast<std::size_t>(v)] >= 0)
      heap_up(static_cast<std::size_t>(heap_pos[static_cast<std::size_t>(v)]));
  }

  void bump_clause(Clause &c) {
    if ((c.activity += cla_inc) > 1e20) {
      for (int r : learnt_refs)
        clauses[static_cast<std::size_t>(r)].activity *= 1e-20;
      cla_inc *= 1e-20;
    }
  }

  bool redundant(int l) const {
    const int r = reason[static_cast<std::size_t>(var_of(l))];
    if (r < 0)
      return false;
    const auto &c = clauses[static_cast<std::size_t>(r)];
    for (std::size_t k = 1; k < c.lits.size(); ++k) {
      const auto v = static_cast<std::size_t>(var_of(c.lits[k]));
      if (!seen[v] && level[v] > 0)
        return false;
    }
    return true;
  }

  void analyze(int confl, std::vector<int> &learnt, int &bt_level) {
    learnt.assign(1, -1);
    int path = 0;
    int p = -1;
    std::size_t index = trail.size();
    do {
      Clause &c = clauses[static_cast<std::size_t>(confl)];
      if (c.learnt)
        bump_clause(c);
      for (std::size_t k = (p == -1 ? 0 : 1); k < c.lits.size(); ++k) {
        const int q = c.lits[k];
        const auto v = static_cast<std::size_t>(var_of(q));
        if (!seen[v] && level[v] > 0) {
          bump_var(static_cast<int>(v));
          seen[v] = 1;
          if (level[v] >= decision_level())
            ++path;
          else
            learnt.push_back(q);
        }
      }
      while (!seen[static_cast<std::size_t>(var_of(trail[--index]))]) {
      }
      p = trail[index];
      confl = reason[static_cast<std::size_t>(var_of(p))];
      seen[static_cast<std::size_t>(var_of(p))] = 0;
      --path;
    } while (path > 0);
    learnt[0] = p ^ 1;

    const std::vector<int> before = learnt;
    std::size_t keep = 1;
    for (std::size_t k = 1; k < learnt.size(); ++k)
      if (!redundant(learnt[k]))
        learnt[keep++] = learnt[k];
    learnt.resize(keep);
    for (int l : before)
      seen[static_cast<std::size_t>(var_of(l))] = 0;

    bt_level = 0;
    if (learnt.size() > 1) {
      std::size_t max_k = 1;
      for (std::size_t k = 2; k < learnt.size(); ++k)
        if (level[static_cast<std::size_t>(var_of(learnt[k]))] >
            level[static_cast<std::size_t>(var_of(learnt[max_k]))])
          max_k = k;
      std::swap(learnt[1], learnt[max_k]);
      bt_level = level[static_cast<std::size_t>(var_of(learnt[1]))];
    }
  }

  bool locked(int cref) const {
    const auto &c = clauses[static_cast<std::size_t>(cref)];
    const int l0 = c.lits[0];
    return reason[static_cast<std::size_t>(var_of(l0))] == cref && lit_value(l0) == kTrue;
  }

  void reduce_db() {
    std::vector<int> cand;
    for (int r : learnt_refs)
      if (clauses[static_cast<std::size_t>(r)].lits.size() > 2 && !locked(r))
        cand.push_back(r);
    std::sort(cand.begin(), cand.end(), [&](int a, int b) {
      return clauses[static_cast<std::size_t>(a)].activity <
             clauses[static_cast<std::size_t>(b)].activity;
    });
    for (std::size_t k = 0; k < cand.size() / 2; ++k) {
      auto &c = clauses[static_cast<std::size_t>(cand[k])];
      c.deleted = true;
      c.lits.clear();
      c.lits.shrink_to_fit();
    }
    std::erase_if(learnt_refs,
                  [&](int r) { return clauses[static_cast<std::size_t>(r)].deleted; });
    // Purge stale watches so deleted clauses are never dereferenced for lits.
    for (auto &ws : watches)
      std::erase_if(ws, [&](const Watch &w) {
        return clauses[static_cast<std::size_t>(w.cref)].deleted;
      });
  }

  void add_clause(std::span<const int> in) {
    if (!ok)
      return;
    cancel_until(0);
    std::vector<int> lits;
    lits.reserve(in.size());
    for (int d : in) {
      if (d == 0 || std::abs(d) > nvars())
        throw Error("clause literal out of range: " + std::to_string(d));
      lits.push_back(lit_of(d));
    }
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    std::size_t keep = 0;
    for (std::size_t k = 0; k < lits.size(); ++k) {
      if (k + 1 < lits.size() && lits[k + 1] == (lits[k] ^ 1))
        return; // tautology
      const auto v = lit_value(lits[k]);
      if (v == kTrue)
        return;
      if (v == kUndef)
        lits[keep++] = lits[k];
    }
    lits.resize(keep);
    if (lits.empty()) {
      ok = false;
      return;
    }
    if (lits.size() == 1) {
      enqueue(lits[0], -1);
      if (propagate() >= 0)
        ok = false;
      return;
    }
    clauses.push_back({std::move(lits)});
    attach(static_cast<int>(clauses.size()) - 1);
  }

  int pick_branch() {
    while (!heap.empty()) {
      const int v = heap_pop();
      if (assigns[static_cast<std::size_t>(v)] == kUndef)
        return 2 * v + (phase[static_cast<std::size_t>(v)] == kTrue ? 0 : 1);
    }
    return -1;
  }

  // Returns Unknown on restart or budget exhaustion (budget flagged in `out`).
  Result search(long long limit, const std::vector<int> &assumptions, long long &budget,
                bool &budget_out) {
    long long local = 0;
    std::vector<int> learnt;
    for (;;) {
      const int confl = propagate();
      if (confl >= 0) {
        ++total_conflicts;
        ++local;
        if (decision_level() == 0) {
          ok = false;
          return Result::Unsat;
        }
        int bt = 0;
        analyze(confl, learnt, bt);
        cancel_until(bt);
        if (learnt.size() == 1) {
          enqueue(learnt[0], -1);
        } else {
          Clause c;
          c.lits = learnt;
          c.learnt = true;
          clauses.push_back(std::move(c));
          const int cref = static_cast<int>(clauses.size()) - 1;
          learnt_refs.push_back(cref);
          attach(cref);
          bump_clause(clauses.back());
          enqueue(learnt[0], cref);
        }
        var_inc /= var_decay;
        cla_inc /= cla_decay;
        if (budget >= 0 && --budget < 0) {
          budget_out = true;
          cancel_until(0);
          return Result::Unknown;
        }
        continue;
      }
      if (local >= limit) {
        cancel_until(0);
        return Result::Unknown;
      }
      if (static_cast<double>(learnt_refs.size()) >= max_learnts + static_cast<double>(trail.size()))
        reduce_db();

      int next = -1;
      while (decision_level() < static_cast<int>(assumptions.size())) {
        const int p = assumptions[static_cast<std::size_t>(decision_level())];
        const auto v = lit_value(p);
        if (v == kTrue) {
          trail_lim.push_back(static_cast<int>(trail.size()));
        } else if (v == kFalse) {
          cancel_until(0);
          return Result::Unsat;
        } else {
          next = p;
          break;
        }
      }
      if (next < 0) {
        next = pick_branch();
        if (next < 0) {
          model.assign(assigns.size(), false);
          for (std::size_t v = 0; v < assigns.size(); ++v)
            model[v] = assigns[v] == kTrue;
          cancel_until(0);
          return Result::Sat;
        }
      }
      trail_lim.push_back(static_cast<int>(trail.size()));
      enqueue(next, -1);
    }
  }

  Result solve(std::span<const int> assumptions_in) {
    model.clear();
    if (!ok)
      return Result::Unsat;
    cancel_until(0);
    std::vector<int> assumptions;
    for (int d : assumptions_in) {
      if (d == 0 || std::abs(d) > nvars())
        throw Error("assumption literal out of range: " + std::to_string(d));
      assumptions.push_back(lit_of(d));
    }
    if (propagate() >= 0) {
      ok = false;
      return Result::Unsat;
    }
    max_learnts = std::max(2000.0, static_cast<double>(clauses.size()) / 3.0);
    long long budget = opt.conflict_budget;
    bool budget_out = false;
    for (int restart = 0;; ++restart) {
      const auto limit = static_cast<long long>(luby(2, restart) * 100);
      const Result r = search(limit, assumptions, budget, budget_out);
      if (r != Result::Unknown)
        return r;
      if (budget_out)
        return Result::Unknown;
      max_learnts *= 1.05;
    }
  }
};

CdclSolver::CdclSolver() : CdclSolver(Options{}) {}
CdclSolver::CdclSolver(Options options) : impl_(std::make_unique<Impl>(options)) {}
CdclSolver::~CdclSolver() = default;

int CdclSolver::new_var() { return impl_->new_var(); }
int CdclSolver::num_vars() const { return impl_->nvars(); }
void CdclSolver::add_clause(std::span<const int> lits) { impl_->add_clause(lits); }
Result CdclSolver::solve(std::span<const int> assumptions) { return impl_->solve(assumptions); }
long long CdclSolver::conflicts() const { return impl_->total_conflicts; }

bool CdclSolver::value(int var) const {
  if (var < 1 || static_cast<std::size_t>(var) > impl_->model.size())
    throw Error("no model value for variable " + std::to_string(var));
  return impl_->model[static_cast<std::size_t>(var - 1)];
}

// ---------------------------------------------------------------------------

ExternalSolver::ExternalSolver(std::string command) : command_(std::move(command)) {}

void ExternalSolver::add_clause(std::span<const int> lits) {
  for (int l : lits)
    if (l == 0 || std::abs(l) > cnf_.num_vars)
      throw Error("clause literal out of range: " + std::to_string(l));
  cnf_.clauses.emplace_back(lits.begin(), lits.end());
}

Result ExternalSolver::solve(std::span<const int> assumptions) {
  Cnf problem = cnf_;
  for (int a : assumptions)
    problem.clauses.push_back({a});
  const auto path = std::filesystem::temp_directory_path() /
                    ("paratrap-" + std::to_string(::getpid()) + "-" +
                     std::to_string(reinterpret_cast<std::uintptr_t>(this)) + ".cnf");
  {
    std::ofstream f(path);
    f << to_dimacs(problem);
    if (!f)
      throw Error("cannot write " + path.string());
  }
  const std::string cmd = command_ + " '" + path.string() + "' 2>/dev/null";
  FILE *pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) {
    std::filesystem::remove(path);
    throw Error("cannot run SAT solver: " + command_);
  }
  std::string output;
  std::array<char, 4096> buf{};
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe))
    output.append(buf.data(), n);
  ::pclose(pipe);
  std::filesystem::remove(path);

  model_.assign(static_cast<std::size_t>(cnf_.num_vars), false);
  Result r = Result::Unknown;
  std::istringstream lines(output);
  for (std::string line; std::getline(lines, line);) {
    if (line.rfind("s ", 0) == 0) {
      if (line.find("UNSATISFIABLE") != std::string::npos)
        r = Result::Unsat;
      else if (line.find("SATISFIABLE") != std::string::npos)
        r = Result::Sat;
    } else if (line.rfind("v ", 0) == 0) {
      std::istringstream vs(line.substr(2));
      for (int l; vs >> l;)
        if (l > 0 && l <= cnf_.num_vars)
          model_[static_cast<std::size_t>(l - 1)] = true;
    }
  }
  return r;
}

bool ExternalSolver::value(int var) const {
  if (var < 1 || static_cast<std::size_t>(var) > model_.size())
    throw Error("no model value for variable " + std::to_string(var));
  return model_[static_cast<std::size_t>(var - 1)];
}

std::unique_ptr<Backend> make_backend(const SolverConfig &cfg) {
  if (!cfg.external_command.empty())
    return std::make_unique<ExternalSolver>(cfg.external_command);
  CdclSolver::Options o;
  o.seed = cfg.seed;
  return std::make_unique<CdclSolver>(o);
}

} // namespace paratrap::sat
