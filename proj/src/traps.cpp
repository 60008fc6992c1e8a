#include "paratrap/traps.hpp"

#include <filesystem>
#include <fstream>
#include <functional>

#include "encode_util.hpp"
#include "text_util.hpp"

namespace paratrap {

CellIndex::CellIndex(const Layout &layout) {
  for (int s = 0; s < layout.width(); ++s) {
    offset_.push_back(per_agent_);
    for (int v = 0; v < layout.alphabet_size(s); ++v)
      slot_of_offset_.push_back(s);
    per_agent_ += layout.alphabet_size(s);
  }
  count_ = per_agent_ * layout.size();
}

Cell CellIndex::cell(int index) const {
  if (index < 0 || index >= count_)
    throw Error("cell index out of range");
  const int agent = index / per_agent_;
  const int rest = index % per_agent_;
  const int slot = slot_of_offset_[static_cast<std::size_t>(rest)];
  return {agent, slot, rest - offset_[static_cast<std::size_t>(slot)]};
}

namespace {

void check_compatible(const Instance &inst, const Powerword &o) {
  if (o.length() != inst.size() || o.width() != inst.layout().width())
    throw Error("powerword is not compatible with the instance of size " +
                std::to_string(inst.size()));
}

bool any_in(const std::vector<Cell> &cells, const Powerword &o) {
  for (const auto &c : cells)
    if (o.contains(c))
      return true;
  return false;
}

} // namespace

StructuralCheck check_trap_structural(const Instance &inst, const Powerword &o) {
  check_compatible(inst, o);
  StructuralCheck r;
  r.initial_intersects = intersects(inst.initial(), o);
  const auto &occs = inst.occurrences();
  for (std::size_t k = 0; k < occs.size(); ++k) {
    const auto &oc = occs[k];
    if (any_in(oc.changed_pre, o) && !any_in(oc.changed_post, o) && !any_in(oc.guard, o)) {
      r.violating_occurrence = static_cast<int>(k);
      break;
    }
  }
  return r;
}

bool is_trap_structural(const Instance &inst, const Powerword &o) {
  return check_trap_structural(inst, o).ok();
}

bool is_trap_exact(const Instance &inst, const Powerword &o, std::size_t limit) {
  check_compatible(inst, o);
  if (!intersects(inst.initial(), o))
    return false;
  for (const auto &c : all_configurations(inst.layout(), limit)) {
    if (!intersects(c, o))
      continue;
    for (const auto &[k, next] : inst.successors(c))
      if (!intersects(next, o))
        return false;
  }
  return true;
}

TrapCnf encode_trap_constraints(const Instance &inst) {
  TrapCnf t{CellIndex(inst.layout()), {}, 0};
  t.cnf.num_vars = t.cells.count();
  auto var = [&](const Cell &c) { return t.cells.index(c) + 1; };

  std::vector<int> init;
  const auto &c0 = inst.initial();
  for (int a = 0; a < c0.length(); ++a)
    for (int s = 0; s < c0.width(); ++s)
      init.push_back(var({a, s, c0.at(a, s)}));
  t.cnf.add(init);
  ++t.constraints;

  for (const auto &oc : inst.occurrences()) {
    std::vector<int> rhs;
    for (const auto &c : oc.changed_post)
      rhs.push_back(var(c));
    for (const auto &c : oc.guard)
      rhs.push_back(var(c));
    for (const auto &c : oc.changed_pre) {
      std::vector<int> clause{-var(c)};
      clause.insert(clause.end(), rhs.begin(), rhs.end());
      t.cnf.add(std::move(clause));
    }
    ++t.constraints;
  }
  return t;
}

Powerword decode_trap(const Layout &layout, const CellIndex &cells, const sat::Backend &solver) {
  Powerword o(layout.size(), layout.width());
  for (int k = 0; k < cells.count(); ++k)
    if (solver.value(k + 1))
      o.insert(cells.cell(k));
  return o;
}

namespace {

// Literal equivalent to the property over the configuration whose cell
// variables are given by `cell_var`.
int encode_property(detail::Encoder &enc, const PropertyFormula &p, const Layout &l,
                    const std::function<int(int, int, int)> &cell_var) {
  using K = PropertyFormula::Kind;
  auto count_lits = [&](int slot, int value) {
    std::vector<int> lits;
    for (int a = 0; a < l.size(); ++a)
      lits.push_back(cell_var(a, slot, value));
    return lits;
  };
  std::vector<int> parts;
  switch (p.kind) {
  case K::True:
    return enc.top();
  case K::False:
    return enc.bottom();
  case K::AtLeastState:
    return enc.at_least(count_lits(l.loc_slot(), p.state), p.k);
  case K::AtLeastVar:
    return enc.at_least(count_lits(l.var_slot(p.var), p.value), p.k);
  case K::Not:
    return -encode_property(enc, p.children.at(0), l, cell_var);
  case K::And:
  case K::Or:
    for (const auto &c : p.children)
      parts.push_back(encode_property(enc, c, l, cell_var));
    return p.kind == K::And ? enc.and_all(parts) : enc.or_all(parts);
  case K::Implies:
    return enc.or2(-encode_property(enc, p.children.at(0), l, cell_var),
                   encode_property(enc, p.children.at(1), l, cell_var));
  }
  return enc.bottom();
}

} // namespace

namespace {

// Propositional image of one step C ⊢ C' between well-formed configurations:
// cell variables for C and C', one selector per occurrence, frame clauses.
class StepEncoding {
public:
  StepEncoding(const Instance &i, const sat::SolverConfig &sc)
      : inst_(i), cells_(i.layout()), enc_(cnf_), solver_(sat::make_backend(sc)) {
    const Layout &l = inst_.layout();
    const auto &sys = inst_.system();
    const int n = l.size();
    x_base_ = cnf_.num_vars;
    cnf_.num_vars += cells_.count();
    y_base_ = cnf_.num_vars;
    cnf_.num_vars += cells_.count();
    e_base_ = cnf_.num_vars;
    const auto &occs = inst_.occurrences();
    cnf_.num_vars += static_cast<int>(occs.size());

    for (int a = 0; a < n; ++a)
      for (int s = 0; s < l.width(); ++s) {
        std::vector<int> xs, ys;
        for (int v = 0; v < l.alphabet_size(s); ++v) {
          xs.push_back(x(a, s, v));
          ys.push_back(y(a, s, v));
        }
        enc_.exactly_one(xs);
        enc_.exactly_one(ys);
      }

    // pointer-slot conditions on the source configuration
    for (int i = 0; i < n; ++i)
      for (int t = 0; t < l.num_loops(); ++t) {
        const int executing = x(i, l.loc_slot(), sys.loop_location(t));
        std::vector<int> marks;
        for (int j = 0; j < n; ++j) {
          const int m = x(j, l.loop_slot(i, t), kUp);
          marks.push_back(m);
          cnf_.add({-m, executing});
        }
        std::vector<int> alo{-executing};
        alo.insert(alo.end(), marks.begin(), marks.end());
        cnf_.add(alo);
        enc_.at_most_one(marks);
      }
    for (int p = 0; p < l.num_pointers(); ++p) {
      std::vector<int> marks;
      for (int j = 0; j < n; ++j)
        marks.push_back(x(j, l.pointer_slot(p), kUp));
      enc_.exactly_one(marks);
    }

    if (occs.empty()) {
      cnf_.add({});
    } else {
      std::vector<int> es;
      for (std::size_t k = 0; k < occs.size(); ++k)
        es.push_back(e(k));
      enc_.exactly_one(es);
    }

    std::vector<std::vector<int>> changers(static_cast<std::size_t>(n * l.width()));
    for (std::size_t k = 0; k < occs.size(); ++k) {
      const auto &oc = occs[k];
      for (const auto &c : oc.changed_pre) {
        cnf_.add({-e(k), x(c.agent, c.slot, c.value)});
        changers[static_cast<std::size_t>(c.agent * l.width() + c.slot)].push_back(e(k));
      }
      for (const auto &c : oc.guard)
        cnf_.add({-e(k), x(c.agent, c.slot, c.value)});
      for (const auto &c : oc.changed_post)
        cnf_.add({-e(k), y(c.agent, c.slot, c.value)});
    }
    for (int a = 0; a < n; ++a)
      for (int s = 0; s < l.width(); ++s) {
        const auto &ch = changers[static_cast<std::size_t>(a * l.width() + s)];
        int changed = 0;
        if (!ch.empty()) {
          changed = enc_.fresh();
          std::vector<int> back{-changed};
          for (int ek : ch) {
            cnf_.add({-ek, changed});
            back.push_back(ek);
          }
          cnf_.add(back);
        }
        for (int v = 0; v < l.alphabet_size(s); ++v) {
          std::vector<int> clause{-x(a, s, v), y(a, s, v)};
          if (changed)
            clause.push_back(changed);
          cnf_.add(clause);
        }
      }
  }

  int x(int a, int s, int v) const { return x_base_ + cells_.index(a, s, v) + 1; }
  int y(int a, int s, int v) const { return y_base_ + cells_.index(a, s, v) + 1; }
  int x(const Cell &c) const { return x_base_ + cells_.index(c) + 1; }
  int y(const Cell &c) const { return y_base_ + cells_.index(c) + 1; }
  int e(std::size_t k) const { return e_base_ + static_cast<int>(k) + 1; }

  const Instance &instance() const { return inst_; }
  sat::Cnf &cnf() { return cnf_; }
  detail::Encoder &encoder() { return enc_; }

  std::optional<Counterexample> solve() {
    solver_->ensure_vars(cnf_.num_vars);
    for (; loaded_ < cnf_.clauses.size(); ++loaded_)
      solver_->add_clause(std::span<const int>(cnf_.clauses[loaded_]));
    const auto r = solver_->solve();
    if (r == sat::Result::Unsat)
      return std::nullopt;
    if (r != sat::Result::Sat)
      throw Error("SAT backend gave no answer for a step query");
    const Layout &l = inst_.layout();
    Counterexample cx;
    cx.before = Configuration(l.size(), l.width());
    for (int k = 0; k < cells_.count(); ++k)
      if (solver_->value(x_base_ + k + 1)) {
        const Cell c = cells_.cell(k);
        cx.before.at(c.agent, c.slot) = static_cast<std::uint8_t>(c.value);
      }
    const auto &occs = inst_.occurrences();
    for (std::size_t k = 0; k < occs.size(); ++k)
      if (solver_->value(e(k)))
        cx.occurrence = static_cast<int>(k);
    cx.after = apply(occs[static_cast<std::size_t>(cx.occurrence)], cx.before);
    for (int k = 0; k < cells_.count(); ++k) {
      const Cell c = cells_.cell(k);
      if (solver_->value(y_base_ + k + 1) != (cx.after.at(c.agent, c.slot) == c.value))
        throw Error("internal error: decoded successor disagrees with the step relation");
    }
    return cx;
  }

private:
  const Instance &inst_;
  CellIndex cells_;
  sat::Cnf cnf_;
  detail::Encoder enc_;
  std::unique_ptr<sat::Backend> solver_;
  std::size_t loaded_ = 0;
  int x_base_ = 0, y_base_ = 0, e_base_ = 0;
};

} // namespace

struct CounterexampleSearch::Impl {
  StepEncoding step;

  Impl(const Instance &i, const PropertyFormula &p, CounterexampleOptions opt,
       const sat::SolverConfig &sc)
      : step(i, sc) {
    const Layout &l = i.layout();
    auto &enc = step.encoder();
    const int after =
        encode_property(enc, p, l, [&](int a, int s, int v) { return step.y(a, s, v); });
    step.cnf().add({-after});
    if (opt.assume_property_before)
      step.cnf().add(
          {encode_property(enc, p, l, [&](int a, int s, int v) { return step.x(a, s, v); })});
  }

  void add_trap(const Powerword &o) {
    check_compatible(step.instance(), o);
    std::vector<int> clause;
    for (const auto &c : o.cells())
      clause.push_back(step.x(c));
    step.cnf().add(std::move(clause));
  }
};

CounterexampleSearch::CounterexampleSearch(const Instance &inst, const PropertyFormula &p,
                                           CounterexampleOptions options,
                                           const sat::SolverConfig &solver)
    : impl_(std::make_unique<Impl>(inst, p, options, solver)) {}
CounterexampleSearch::~CounterexampleSearch() = default;
void CounterexampleSearch::add_trap(const Powerword &o) { impl_->add_trap(o); }
std::optional<Counterexample> CounterexampleSearch::next() { return impl_->step.solve(); }
const sat::Cnf &CounterexampleSearch::cnf() const { return impl_->step.cnf(); }

std::optional<Counterexample> find_counterexample(const Instance &inst,
                                                  const std::vector<Powerword> &traps,
                                                  const PropertyFormula &p,
                                                  CounterexampleOptions options) {
  CounterexampleSearch search(inst, p, options);
  for (const auto &o : traps)
    search.add_trap(o);
  return search.next();
}

std::optional<Counterexample> find_trap_violation(const Instance &inst, const Powerword &o) {
  check_compatible(inst, o);
  StepEncoding step(inst, {});
  std::vector<int> hit;
  for (const auto &c : o.cells()) {
    hit.push_back(step.x(c));
    step.cnf().add({-step.y(c)});
  }
  step.cnf().add(std::move(hit));
  return step.solve();
}

struct TrapSearch::Impl {
  const Instance &inst;
  TrapCnf enc;
  std::unique_ptr<sat::Backend> solver;
  bool minimize;

  Impl(const Instance &i, const sat::SolverConfig &sc, bool m)
      : inst(i), enc(encode_trap_constraints(i)), solver(sat::make_backend(sc)), minimize(m) {
    solver->load(enc.cnf);
  }

  std::optional<Powerword> excluding(const Configuration &c) {
    const Layout &l = inst.layout();
    if (c.length() != l.size() || c.width() != l.width())
      throw Error("configuration is not compatible with the instance");
    std::vector<int> exclude;
    for (int a = 0; a < c.length(); ++a)
      for (int s = 0; s < c.width(); ++s)
        exclude.push_back(-(enc.cells.index(a, s, c.at(a, s)) + 1));
    auto r = solver->solve(exclude);
    if (r == sat::Result::Unsat)
      return std::nullopt;
    if (r != sat::Result::Sat)
      throw Error("SAT backend gave no answer for the trap query");
    Powerword o = decode_trap(l, enc.cells, *solver);
    if (!minimize)
      return o;

    // Greedy shrinking: drop one member at a time, staying inside the
    // current trap.
    for (const Cell &m : o.cells()) {
      if (!o.contains(m))
        continue;
      std::vector<int> assume = exclude;
      for (int k = 0; k < enc.cells.count(); ++k)
        if (!o.contains(enc.cells.cell(k)))
          assume.push_back(-(k + 1));
      assume.push_back(-(enc.cells.index(m) + 1));
      r = solver->solve(assume);
      if (r == sat::Result::Sat)
        o = decode_trap(l, enc.cells, *solver);
      else if (r != sat::Result::Unsat)
        throw Error("SAT backend gave no answer while minimizing a trap");
    }
    return o;
  }
};

TrapSearch::TrapSearch(const Instance &inst, const sat::SolverConfig &solver, bool minimize)
    : impl_(std::make_unique<Impl>(inst, solver, minimize)) {}
TrapSearch::~TrapSearch() = default;
std::optional<Powerword> TrapSearch::excluding(const Configuration &c) {
  return impl_->excluding(c);
}
const TrapCnf &TrapSearch::encoding() const { return impl_->enc; }

std::optional<Powerword> find_excluding_trap(const Instance &inst, const Configuration &c,
                                             bool minimize) {
  return TrapSearch(inst, {}, minimize).excluding(c);
}

namespace {

void write_file(const std::filesystem::path &path, const std::string &text) {
  std::ofstream f(path);
  f << text;
  if (!f)
    throw Error("cannot write " + path.string());
}

} // namespace

CegarResult cegar(const Instance &inst, const SafetyProperty &p, const CegarOptions &options,
                  const std::vector<Powerword> &seeds) {
  CegarResult res;
  if (!holds(inst.system(), p.formula, inst.initial())) {
    res.reason = "the initial configuration violates '" + p.name + "'";
    return res;
  }
  CounterexampleSearch cs(inst, p.formula, options.counterexample, options.solver);
  TrapSearch ts(inst, options.solver, options.minimize);
  for (const auto &o : seeds)
    if (o.length() == inst.size() && o.width() == inst.layout().width() &&
        is_trap_structural(inst, o)) {
      res.traps.push_back(o);
      cs.add_trap(o);
    }
  res.seeded = res.traps.size();

  for (;;) {
    if (res.iterations >= options.max_iterations) {
      res.reason = "iteration cap of " + std::to_string(options.max_iterations) + " reached";
      break;
    }
    ++res.iterations;
    auto cx = cs.next();
    if (!cx) {
      res.verdict = CegarResult::Verdict::Proved;
      break;
    }
    auto o = ts.excluding(cx->before);
    if (!o) {
      res.reason = "no trap excludes the source configuration of a violating step";
      res.counterexample = std::move(cx);
      break;
    }
    cs.add_trap(*o);
    res.traps.push_back(std::move(*o));
  }

  if (!options.emit_cnf_dir.empty()) {
    const std::filesystem::path dir(options.emit_cnf_dir);
    std::filesystem::create_directories(dir);
    const std::string stem = inst.system().name + "_n" + std::to_string(inst.size());
    write_file(dir / (stem + "_traps.cnf"),
               sat::to_dimacs(ts.encoding().cnf, "trap constraints of " + stem));
    write_file(dir / (stem + "_counterexample.cnf"),
               sat::to_dimacs(cs.cnf(), "violating steps of " + stem + " for " + p.name));
  }
  return res;
}

std::string render_powerword(const Layout &l, const Powerword &o) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{""};
  for (int a = 0; a < o.length(); ++a)
    header.push_back(std::to_string(a));
  rows.push_back(std::move(header));
  for (int s = 0; s < o.width(); ++s) {
    std::vector<std::string> row{l.slot_label(s)};
    for (int a = 0; a < o.length(); ++a) {
      std::string entry;
      for (int v = 0; v < l.alphabet_size(s); ++v)
        if (o.contains(a, s, v))
          entry += (entry.empty() ? "{" : ", ") + l.value_label(s, v);
      row.push_back(entry.empty() ? "∅" : entry + "}");
    }
    rows.push_back(std::move(row));
  }
  return detail::format_table(rows);
}

} // namespace paratrap
