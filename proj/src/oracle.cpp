#include "palm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <thread>

#include "palm/lp.hpp"

namespace palm {

std::vector<double> GridSpec::points(const GridRange& range) {
  const long count = static_cast<long>(std::floor((range.hi - range.lo) / range.step + 1e-9)) + 1;
  std::vector<double> out(static_cast<std::size_t>(count));
  for (long k = 0; k < count; ++k) out[static_cast<std::size_t>(k)] = range.lo + static_cast<double>(k) * range.step;
  return out;
}

const char* to_string(OracleStatus s) {
  return s == OracleStatus::Optimal ? "Optimal" : "NoFeasiblePoint";
}

void check_grid(const BilevelInstance& inst, const GridSpec& grid) {
  if (static_cast<Index>(grid.axes.size()) != inst.r)
    throw std::invalid_argument("grid has " + std::to_string(grid.axes.size()) +
                                " axes, instance has r=" + std::to_string(inst.r));
  for (Index q = 0; q < inst.r; ++q) {
    const auto& axis = grid.axes[static_cast<std::size_t>(q)];
    const std::string name = "u" + std::to_string(q);
    if (const auto* rg = std::get_if<GridRange>(&axis)) {
      if (!std::isfinite(rg->lo) || !std::isfinite(rg->hi) || !std::isfinite(rg->step))
        throw std::invalid_argument(name + ": range bounds must be finite");
      if (!(rg->step > 0.0)) throw std::invalid_argument(name + ": step must be > 0");
      if (rg->lo > rg->hi) throw std::invalid_argument(name + ": lo > hi");
    } else if (const auto* fx = std::get_if<GridFixed>(&axis)) {
      if (!std::isfinite(fx->value)) throw std::invalid_argument(name + ": fixed value must be finite");
    } else if (inst.P.rows() > 0 && inst.P.col(q).cwiseAbs().maxCoeff() != 0.0) {
      throw std::invalid_argument(name + " is free but its column of P is nonzero");
    }
  }
}

namespace {

struct Candidate {
  double objective = std::numeric_limits<double>::infinity();
  long index = -1;
  Vector u;
  Vector y;

  bool better_than(const Candidate& other) const {
    if (index < 0) return false;
    if (other.index < 0) return true;
    if (objective != other.objective) return objective < other.objective;
    return index < other.index;
  }
};

class Enumerator {
 public:
  Enumerator(const BilevelInstance& inst, const GridSpec& grid, double tol_lex)
      : inst_(inst), tol_lex_(tol_lex) {
    base_ = Vector::Zero(inst.r);
    for (Index q = 0; q < inst.r; ++q) {
      const auto& axis = grid.axes[static_cast<std::size_t>(q)];
      if (const auto* rg = std::get_if<GridRange>(&axis)) {
        gridded_.push_back(q);
        values_.push_back(GridSpec::points(*rg));
      } else if (const auto* fx = std::get_if<GridFixed>(&axis)) {
        base_(q) = fx->value;
      } else {
        free_.push_back(q);
      }
    }
    total_ = 1;
    for (const auto& v : values_) total_ *= static_cast<long>(v.size());
  }

  long total() const { return total_; }

  // First gridded axis varies slowest, so increasing index is increasing
  // lexicographic order of the gridded coordinates.
  Vector point(long index) const {
    Vector u = base_;
    for (std::size_t a = gridded_.size(); a-- > 0;) {
      const long size = static_cast<long>(values_[a].size());
      u(gridded_[a]) = values_[a][static_cast<std::size_t>(index % size)];
      index /= size;
    }
    return u;
  }

  std::optional<Candidate> evaluate(long index) const {
    const Index n = inst_.n, m = inst_.m;
    Vector u = point(index);
    const Matrix CX = inst_.C + materialize_X(inst_, u);

    LpProblem lower = LpProblem::free_vars(n);
    lower.cost = inst_.e;
    for (Index i = 0; i < m; ++i) lower.add_ineq(CX.row(i).transpose(), inst_.b(i));
    const LpSolution ls = solve_lp(lower);
    if (ls.status == LpStatus::Infeasible) return std::nullopt;
    if (ls.status == LpStatus::Unbounded)
      throw OracleError("lower level unbounded at grid point " + std::to_string(index));

    const Index nf = static_cast<Index>(free_.size());
    LpProblem opt = LpProblem::free_vars(n + nf);
    opt.cost.head(n) = inst_.d;
    for (Index f = 0; f < nf; ++f) opt.cost(n + f) = inst_.cu(free_[f]);
    const Vector fixed_part = inst_.Au * u;  // free coordinates of u are zero here
    for (Index i = 0; i < inst_.p; ++i) {
      Vector row = Vector::Zero(n + nf);
      row.head(n) = inst_.B.row(i).transpose();
      for (Index f = 0; f < nf; ++f) row(n + f) = inst_.Au(i, free_[f]);
      opt.add_ineq(row, inst_.a(i) - fixed_part(i));
    }
    for (Index i = 0; i < m; ++i) {
      Vector row = Vector::Zero(n + nf);
      row.head(n) = CX.row(i).transpose();
      opt.add_ineq(row, inst_.b(i));
    }
    {
      Vector row = Vector::Zero(n + nf);
      row.head(n) = -inst_.e;
      opt.add_ineq(row, -(ls.objective + tol_lex_));
    }
    const LpSolution os = solve_lp(opt);
    if (os.status == LpStatus::Infeasible) return std::nullopt;
    if (os.status == LpStatus::Unbounded)
      throw OracleError("optimistic response unbounded at grid point " + std::to_string(index));

    Candidate c;
    for (Index f = 0; f < nf; ++f) u(free_[f]) = os.w(n + f);
    c.u = u;
    c.y = os.w.head(n);
    c.objective = inst_.cu.dot(u) + inst_.d.dot(c.y);
    c.index = index;
    return c;
  }

 private:
  const BilevelInstance& inst_;
  double tol_lex_;
  Vector base_;
  std::vector<Index> gridded_;
  std::vector<Index> free_;
  std::vector<std::vector<double>> values_;
  long total_ = 1;
};

struct WorkerResult {
  Candidate best;
  long feasible = 0;
  long evaluated = 0;
  long error_index = -1;
  std::exception_ptr error;
};

void scan(const Enumerator& en, long begin, long end, WorkerResult& out) {
  for (long k = begin; k < end; ++k) {
    try {
      ++out.evaluated;
      auto c = en.evaluate(k);
      if (!c) continue;
      ++out.feasible;
      if (c->better_than(out.best)) out.best = std::move(*c);
    } catch (...) {
      out.error_index = k;
      out.error = std::current_exception();
      return;
    }
  }
}

}  // namespace

OracleResult run_oracle(const BilevelInstance& inst, const GridSpec& grid, double tol_lex, int threads) {
  require_valid(inst);
  check_grid(inst, grid);
  if (!(tol_lex >= 0.0)) throw std::invalid_argument("run_oracle: tol_lex must be >= 0");

  const Enumerator en(inst, grid, tol_lex);
  const long total = en.total();
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = static_cast<int>(std::min<long>(threads, std::max<long>(1, total)));

  std::vector<WorkerResult> parts(static_cast<std::size_t>(threads));
  if (threads == 1) {
    scan(en, 0, total, parts[0]);
  } else {
    std::vector<std::jthread> pool;
    const long chunk = (total + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const long begin = std::min(total, t * chunk);
      const long end = std::min(total, begin + chunk);
      pool.emplace_back(scan, std::cref(en), begin, end, std::ref(parts[static_cast<std::size_t>(t)]));
    }
  }

  // Report the error at the smallest failing index so the outcome does not
  // depend on the thread count.
  const WorkerResult* failed = nullptr;
  for (const auto& p : parts)
    if (p.error && (!failed || p.error_index < failed->error_index)) failed = &p;
  if (failed) std::rethrow_exception(failed->error);

  OracleResult res;
  Candidate best;
  for (auto& p : parts) {
    res.feasible_points += p.feasible;
    res.evaluated_points += p.evaluated;
    if (p.best.better_than(best)) best = p.best;
  }
  if (best.index < 0) {
    res.status = OracleStatus::NoFeasiblePoint;
    return res;
  }
  res.status = OracleStatus::Optimal;
  res.best_u = best.u;
  res.best_y = best.y;
  res.best_objective = best.objective;
  return res;
}

}  // namespace palm
