#include "palm/lp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace palm {

LpProblem LpProblem::free_vars(Index nvars) {
  LpProblem lp;
  lp.nvars = nvars;
  lp.cost = Vector::Zero(nvars);
  lp.G.resize(0, nvars);
  lp.h.resize(0);
  lp.H.resize(0, nvars);
  lp.k.resize(0);
  lp.lower_bounds = Vector::Constant(nvars, kFree);
  return lp;
}

void LpProblem::add_ineq(const Eigen::Ref<const Vector>& row, double rhs) {
  if (row.size() != nvars) throw DimensionError("add_ineq: row length != nvars");
  G.conservativeResize(G.rows() + 1, nvars);
  G.row(G.rows() - 1) = row.transpose();
  h.conservativeResize(h.size() + 1);
  h(h.size() - 1) = rhs;
}

void LpProblem::add_eq(const Eigen::Ref<const Vector>& row, double rhs) {
  if (row.size() != nvars) throw DimensionError("add_eq: row length != nvars");
  H.conservativeResize(H.rows() + 1, nvars);
  H.row(H.rows() - 1) = row.transpose();
  k.conservativeResize(k.size() + 1);
  k(k.size() - 1) = rhs;
}

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal:
      return "Optimal";
    case LpStatus::Infeasible:
      return "Infeasible";
    case LpStatus::Unbounded:
      return "Unbounded";
  }
  return "?";
}

void validate_lp(const LpProblem& lp) {
  std::ostringstream os;
  if (lp.cost.size() != lp.nvars) os << " cost length " << lp.cost.size() << ";";
  if (lp.lower_bounds.size() != lp.nvars) os << " lower_bounds length " << lp.lower_bounds.size() << ";";
  if (lp.G.cols() != lp.nvars && lp.G.rows() > 0) os << " G has " << lp.G.cols() << " columns;";
  if (lp.H.cols() != lp.nvars && lp.H.rows() > 0) os << " H has " << lp.H.cols() << " columns;";
  if (lp.h.size() != lp.G.rows()) os << " h length " << lp.h.size() << " vs G rows " << lp.G.rows() << ";";
  if (lp.k.size() != lp.H.rows()) os << " k length " << lp.k.size() << " vs H rows " << lp.H.rows() << ";";
  if (!os.str().empty()) throw DimensionError("invalid LpProblem (nvars=" + std::to_string(lp.nvars) + "):" + os.str());

  if (!lp.cost.allFinite() || !lp.G.allFinite() || !lp.h.allFinite() || !lp.H.allFinite() ||
      !lp.k.allFinite())
    throw DimensionError("invalid LpProblem: non-finite coefficient");
  for (Index j = 0; j < lp.nvars; ++j) {
    const double lb = lp.lower_bounds(j);
    if (!(lb == 0.0 || lb == kFree))
      throw DimensionError("invalid LpProblem: lower bound of variable " + std::to_string(j) +
                           " is neither 0 nor -inf");
  }
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kTinyPivot = 1e-11;
constexpr double kDegenerateStep = 1e-12;

// Simplex over  A x = b, x >= 0, b >= 0, started from an all-artificial basis.
class Tableau {
 public:
  Tableau(const Matrix& A, const Vector& b, const Vector& c)
      : rows_(A.rows()), structural_(A.cols()), total_(A.cols() + A.rows()) {
    T_ = Matrix::Zero(rows_, total_ + 1);
    T_.leftCols(structural_) = A;
    T_.block(0, structural_, rows_, rows_).setIdentity();
    T_.col(total_) = b;

    z1_ = Vector::Zero(total_ + 1);
    for (Index j = 0; j < structural_; ++j) z1_(j) = -A.col(j).sum();
    z1_(total_) = -b.sum();

    z2_ = Vector::Zero(total_ + 1);
    z2_.head(structural_) = c;

    basis_.resize(rows_);
    is_basic_.assign(total_, false);
    for (Index i = 0; i < rows_; ++i) {
      basis_[i] = structural_ + i;
      is_basic_[structural_ + i] = true;
    }
    cost_scale_ = std::max(1.0, c.size() ? c.cwiseAbs().maxCoeff() : 0.0);
    iteration_cap_ = 50 * static_cast<int>(rows_ + total_) + 1000;
  }

  enum class Outcome { Optimal, Unbounded };

  Outcome run(int phase) {
    Vector& z = phase == 1 ? z1_ : z2_;
    const double rc_tol = phase == 1 ? 1e-9 : 1e-9 * cost_scale_;
    bool bland = false;
    for (;;) {
      if (++iterations_ > iteration_cap_)
        throw NumericalFailure("simplex iteration cap exceeded (" + std::to_string(iteration_cap_) + ")");

      Index enter = -1;
      double best = -rc_tol;
      for (Index j = 0; j < structural_; ++j) {
        if (is_basic_[j] || z(j) >= -rc_tol) continue;
        if (bland) {
          enter = j;
          break;
        }
        if (z(j) < best) {
          best = z(j);
          enter = j;
        }
      }
      if (enter < 0) return Outcome::Optimal;

      Index leave = -1;
      double best_ratio = 0.0;
      bool tiny_only = false;
      for (Index i = 0; i < rows_; ++i) {
        const double a = T_(i, enter);
        if (a <= kPivotTol) {
          if (a > kTinyPivot) tiny_only = true;
          continue;
        }
        const double ratio = std::max(0.0, T_(i, total_)) / a;
        if (leave < 0) {
          leave = i;
          best_ratio = ratio;
          continue;
        }
        const double slack = 1e-12 * std::max(1.0, best_ratio);
        if (ratio < best_ratio - slack) {
          leave = i;
          best_ratio = ratio;
        } else if (ratio <= best_ratio + slack) {
          const bool take = bland ? basis_[i] < basis_[leave] : a > T_(leave, enter);
          if (take) {
            leave = i;
            best_ratio = std::min(ratio, best_ratio);
          }
        }
      }
      if (leave < 0) {
        if (tiny_only)
          throw NumericalFailure("simplex: only pivots below 1e-9 available in column " +
                                 std::to_string(enter));
        if (phase == 1) throw NumericalFailure("simplex: unbounded ray in phase one");
        return Outcome::Unbounded;
      }
      pivot(leave, enter);
      bland = best_ratio <= kDegenerateStep;
    }
  }

  double phase1_value() const { return -z1_(total_); }

  // Pivot basic artificials out where a structural column allows it. Rows that
  // cannot be cleared are linearly dependent and keep a zero artificial.
  void drive_out_artificials() {
    for (Index i = 0; i < rows_; ++i) {
      if (basis_[i] < structural_) continue;
      Index col = -1;
      double big = kPivotTol;
      for (Index j = 0; j < structural_; ++j) {
        if (is_basic_[j]) continue;
        if (std::abs(T_(i, j)) > big) {
          big = std::abs(T_(i, j));
          col = j;
        }
      }
      if (col >= 0) {
        T_(i, total_) = 0.0;
        pivot(i, col);
      }
    }
  }

  const std::vector<Index>& basis() const { return basis_; }
  Index rows() const { return rows_; }
  Index structural() const { return structural_; }
  double rhs(Index i) const { return T_(i, total_); }
  int iterations() const { return iterations_; }

 private:
  void pivot(Index row, Index col) {
    const double piv = T_(row, col);
    if (std::abs(piv) < kTinyPivot) throw NumericalFailure("simplex: pivot below 1e-11");
    T_.row(row) /= piv;
    T_(row, col) = 1.0;
    for (Index i = 0; i < rows_; ++i) {
      if (i == row) continue;
      const double f = T_(i, col);
      if (f == 0.0) continue;
      T_.row(i) -= f * T_.row(row);
      T_(i, col) = 0.0;
    }
    for (Vector* z : {&z1_, &z2_}) {
      const double f = (*z)(col);
      if (f == 0.0) continue;
      *z -= f * T_.row(row).transpose();
      (*z)(col) = 0.0;
    }
    is_basic_[basis_[row]] = false;
    basis_[row] = col;
    is_basic_[col] = true;
  }

  Index rows_;
  Index structural_;
  Index total_;
  Matrix T_;
  Vector z1_;
  Vector z2_;
  std::vector<Index> basis_;
  std::vector<bool> is_basic_;
  double cost_scale_ = 1.0;
  int iterations_ = 0;
  int iteration_cap_ = 0;
};

}  // namespace

LpSolution solve_lp(const LpProblem& lp) {
  validate_lp(lp);

  const Index n = lp.nvars;
  const Index n_ineq = lp.n_ineq();
  const Index rows = n_ineq + lp.n_eq();

  // Column layout: one column per variable, a second (negated) column for
  // free variables, then one surplus column per inequality row.
  std::vector<Index> pos_col(n), neg_col(n, -1);
  Index cols = 0;
  for (Index j = 0; j < n; ++j) {
    pos_col[j] = cols++;
    if (lp.lower_bounds(j) == kFree) neg_col[j] = cols++;
  }
  const Index first_surplus = cols;
  cols += n_ineq;

  Matrix A = Matrix::Zero(rows, cols);
  Vector rhs(rows);
  Vector c = Vector::Zero(cols);
  for (Index j = 0; j < n; ++j) {
    c(pos_col[j]) = lp.cost(j);
    if (neg_col[j] >= 0) c(neg_col[j]) = -lp.cost(j);
  }
  for (Index i = 0; i < rows; ++i) {
    const bool ineq = i < n_ineq;
    for (Index j = 0; j < n; ++j) {
      const double v = ineq ? lp.G(i, j) : lp.H(i - n_ineq, j);
      A(i, pos_col[j]) = v;
      if (neg_col[j] >= 0) A(i, neg_col[j]) = -v;
    }
    if (ineq) A(i, first_surplus + i) = -1.0;
    rhs(i) = ineq ? lp.h(i) : lp.k(i - n_ineq);
  }
  Vector sign = Vector::Ones(rows);
  for (Index i = 0; i < rows; ++i) {
    if (rhs(i) < 0.0) {
      sign(i) = -1.0;
      A.row(i) *= -1.0;
      rhs(i) = -rhs(i);
    }
  }

  LpSolution sol;
  Tableau tab(A, rhs, c);
  tab.run(1);
  const double infeas_tol = 1e-9 * std::max(1.0, rows ? rhs.maxCoeff() : 0.0);
  if (tab.phase1_value() > infeas_tol) {
    sol.status = LpStatus::Infeasible;
    sol.iterations = tab.iterations();
    return sol;
  }
  tab.drive_out_artificials();
  if (tab.run(2) == Tableau::Outcome::Unbounded) {
    sol.status = LpStatus::Unbounded;
    sol.iterations = tab.iterations();
    return sol;
  }

  // Recompute the basic solution and multipliers from the original data; this
  // removes round-off accumulated in the tableau.
  const auto& basis = tab.basis();
  Matrix Bm(rows, rows);
  Vector cB(rows);
  Vector x_tab(rows);
  for (Index i = 0; i < rows; ++i) {
    const Index col = basis[i];
    if (col < cols) {
      Bm.col(i) = A.col(col);
      cB(i) = c(col);
    } else {
      Bm.col(i) = Vector::Unit(rows, col - cols);
      cB(i) = 0.0;
    }
    x_tab(i) = tab.rhs(i);
  }
  Vector xB = x_tab;
  Vector y = Vector::Zero(rows);
  if (rows > 0) {
    Eigen::PartialPivLU<Matrix> lu(Bm);
    Vector xB_lu = lu.solve(rhs);
    Vector y_lu = lu.transpose().solve(cB);
    const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
    if (xB_lu.allFinite() && y_lu.allFinite() && (Bm * xB_lu - rhs).cwiseAbs().maxCoeff() <= 1e-9 * scale) {
      xB = xB_lu;
      y = y_lu;
    } else {
      throw NumericalFailure("simplex: final basis is numerically singular");
    }
  }

  Vector x = Vector::Zero(cols);
  const double clamp = 1e-9 * std::max(1.0, rows ? rhs.maxCoeff() : 0.0);
  for (Index i = 0; i < rows; ++i) {
    if (basis[i] >= cols) continue;  // zero artificial on a redundant row
    double v = xB(i);
    if (v < 0.0 && v >= -clamp) v = 0.0;
    x(basis[i]) = v;
  }

  sol.status = LpStatus::Optimal;
  sol.w.resize(n);
  for (Index j = 0; j < n; ++j) sol.w(j) = x(pos_col[j]) - (neg_col[j] >= 0 ? x(neg_col[j]) : 0.0);
  sol.objective = lp.cost.dot(sol.w);
  sol.duals = sign.cwiseProduct(y);
  sol.iterations = tab.iterations();
  return sol;
}

LpSolution solve_closest(const LpProblem& lp, const Vector& prev, std::span<const Index> measured) {
  if (prev.size() != lp.nvars)
    throw DimensionError("solve_closest: prev has length " + std::to_string(prev.size()) +
                         ", expected " + std::to_string(lp.nvars));
  std::vector<Index> idx(measured.begin(), measured.end());
  if (idx.empty()) {
    idx.resize(lp.nvars);
    for (Index j = 0; j < lp.nvars; ++j) idx[j] = j;
  }
  for (Index j : idx)
    if (j < 0 || j >= lp.nvars) throw DimensionError("solve_closest: measured index out of range");

  LpSolution first = solve_lp(lp);
  if (!first.optimal()) return first;

  const Index n = lp.nvars;
  const Index ns = static_cast<Index>(idx.size());
  LpProblem dist;
  dist.nvars = n + ns;
  dist.cost = Vector::Zero(n + ns);
  dist.cost.tail(ns).setOnes();
  dist.lower_bounds.resize(n + ns);
  dist.lower_bounds.head(n) = lp.lower_bounds;
  dist.lower_bounds.tail(ns).setZero();

  const Index gi = lp.n_ineq();
  dist.G = Matrix::Zero(gi + 2 * ns + 1, n + ns);
  dist.h = Vector::Zero(gi + 2 * ns + 1);
  if (gi > 0) {
    dist.G.topLeftCorner(gi, n) = lp.G;
    dist.h.head(gi) = lp.h;
  }
  for (Index q = 0; q < ns; ++q) {
    const Index j = idx[q];
    // s_q - w_j >= -prev_j  and  s_q + w_j >= prev_j
    dist.G(gi + 2 * q, n + q) = 1.0;
    dist.G(gi + 2 * q, j) = -1.0;
    dist.h(gi + 2 * q) = -prev(j);
    dist.G(gi + 2 * q + 1, n + q) = 1.0;
    dist.G(gi + 2 * q + 1, j) = 1.0;
    dist.h(gi + 2 * q + 1) = prev(j);
  }
  // Objective cap cost'w <= v* + kTolFix, with the row scaled so its
  // coefficients are O(1). The relative floor only takes over once kTolFix
  // falls below the resolution of v* (very large penalty weights). The cap
  // sits just inside kTolFix so rounding on the active row cannot cross it.
  const double scale = std::max(1.0, n ? lp.cost.cwiseAbs().maxCoeff() : 0.0);
  const double v_scaled = first.objective / scale;
  dist.G.block(gi + 2 * ns, 0, 1, n) = -lp.cost.transpose() / scale;
  dist.h(gi + 2 * ns) = -(v_scaled + std::max(0.999 * kTolFix / scale, 1e-12 * std::abs(v_scaled)));

  dist.H = Matrix::Zero(lp.n_eq(), n + ns);
  if (lp.n_eq() > 0) dist.H.leftCols(n) = lp.H;
  dist.k = lp.k;

  LpSolution second = solve_lp(dist);
  if (!second.optimal())
    throw NumericalFailure(std::string("solve_closest: reselection stage is ") + to_string(second.status));

  LpSolution out;
  out.status = LpStatus::Optimal;
  out.w = second.w.head(n);
  out.objective = lp.cost.dot(out.w);
  out.duals = first.duals;
  out.iterations = first.iterations + second.iterations;
  return out;
}

LpProblem pin_variables(LpProblem lp, std::span<const Index> indices, const Vector& values) {
  if (values.size() != static_cast<Index>(indices.size()))
    throw DimensionError("pin_variables: values/indices length mismatch");
  for (std::size_t q = 0; q < indices.size(); ++q) {
    const Index j = indices[q];
    if (j < 0 || j >= lp.nvars) throw DimensionError("pin_variables: index out of range");
    lp.add_eq(Vector::Unit(lp.nvars, j), values(static_cast<Index>(q)));
  }
  return lp;
}

double max_violation(const LpProblem& lp, const Vector& w) {
  double v = 0.0;
  if (lp.n_ineq() > 0) v = std::max(v, (lp.h - lp.G * w).maxCoeff());
  if (lp.n_eq() > 0) v = std::max(v, (lp.H * w - lp.k).cwiseAbs().maxCoeff());
  for (Index j = 0; j < lp.nvars; ++j)
    if (lp.lower_bounds(j) == 0.0) v = std::max(v, -w(j));
  return v;
}

std::string dump(const LpProblem& lp) {
  std::ostringstream os;
  os << std::setprecision(17);
  auto row = [&](const auto& coeffs) {
    bool any = false;
    for (Index j = 0; j < lp.nvars; ++j) {
      if (coeffs(j) == 0.0) continue;
      os << (coeffs(j) < 0 ? " - " : (any ? " + " : " ")) << std::abs(coeffs(j)) << " w" << j;
      any = true;
    }
    if (!any) os << " 0";
  };
  os << "minimize";
  row(lp.cost);
  os << "\n";
  for (Index i = 0; i < lp.n_ineq(); ++i) {
    os << "g" << i << ":";
    row(lp.G.row(i));
    os << " >= " << lp.h(i) << "\n";
  }
  for (Index i = 0; i < lp.n_eq(); ++i) {
    os << "e" << i << ":";
    row(lp.H.row(i));
    os << " = " << lp.k(i) << "\n";
  }
  for (Index j = 0; j < lp.nvars; ++j)
    os << "w" << j << (lp.lower_bounds(j) == 0.0 ? " >= 0" : " free") << "\n";
  return os.str();
}

}  // namespace palm
