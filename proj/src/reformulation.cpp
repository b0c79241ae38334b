#include "palm/reformulation.hpp"

#include <string>

namespace palm {

namespace {

void require_length(const Vector& v, Index len, const char* what) {
  if (v.size() != len)
    throw DimensionError(std::string(what) + " has length " + std::to_string(v.size()) +
                         ", expected " + std::to_string(len));
}

// Rows  Au u + B y >= a  with u fixed, written over the y block of an LP
// whose y variables start at column `y0`.
void add_upper_rows_fixed_u(LpProblem& lp, const BilevelInstance& inst, const Vector& u, Index y0) {
  const Vector rhs = inst.a - inst.Au * u;
  for (Index i = 0; i < inst.p; ++i) {
    Vector row = Vector::Zero(lp.nvars);
    row.segment(y0, inst.n) = inst.B.row(i).transpose();
    lp.add_ineq(row, rhs(i));
  }
}

}  // namespace

LpProblem build_init_problem(const BilevelInstance& inst, const Vector& u0) {
  require_length(u0, inst.r, "u0");
  const Matrix CX = inst.C + materialize_X(inst, u0);
  const Index n = inst.n, m = inst.m;

  LpProblem lp = LpProblem::free_vars(n + m);
  lp.cost.head(n) = inst.e;
  lp.cost.tail(m) = -inst.b;
  lp.lower_bounds.tail(m).setZero();

  add_upper_rows_fixed_u(lp, inst, u0, 0);
  for (Index i = 0; i < m; ++i) {
    Vector row = Vector::Zero(n + m);
    row.head(n) = CX.row(i).transpose();
    lp.add_ineq(row, inst.b(i));
  }
  for (Index j = 0; j < n; ++j) {
    Vector row = Vector::Zero(n + m);
    row.tail(m) = CX.col(j);
    lp.add_eq(row, inst.e(j));
  }
  return lp;
}

LpProblem build_subproblem_primal(const BilevelInstance& inst, const Vector& u_bar, double mu) {
  require_length(u_bar, inst.r, "u_bar");
  if (!(mu >= 0.0)) throw std::invalid_argument("build_subproblem_primal: mu must be >= 0");
  const Matrix CX = inst.C + materialize_X(inst, u_bar);

  LpProblem lp = LpProblem::free_vars(inst.n);
  lp.cost = inst.d + mu * inst.e;
  add_upper_rows_fixed_u(lp, inst, u_bar, 0);
  for (Index i = 0; i < inst.m; ++i) lp.add_ineq(CX.row(i).transpose(), inst.b(i));
  return lp;
}

LpProblem build_subproblem_dual(const BilevelInstance& inst, const Vector& u_bar) {
  require_length(u_bar, inst.r, "u_bar");
  const Matrix CX = inst.C + materialize_X(inst, u_bar);

  LpProblem lp = LpProblem::free_vars(inst.m);
  lp.cost = -inst.b;
  lp.lower_bounds.setZero();
  for (Index j = 0; j < inst.n; ++j) lp.add_eq(CX.col(j), inst.e(j));
  return lp;
}

Expansion linearize_expansion(const Matrix& X_bar, const Vector& y_bar, const Matrix& dX,
                              const Vector& dy) {
  if (dX.rows() != X_bar.rows() || dX.cols() != X_bar.cols() || y_bar.size() != X_bar.cols() ||
      dy.size() != X_bar.cols())
    throw DimensionError("linearize_expansion: non-conforming shapes");
  Expansion ex;
  ex.exact = (X_bar + dX) * (y_bar + dy);
  ex.approx = X_bar * (y_bar + dy) + dX * y_bar;
  ex.dropped = dX * dy;
  return ex;
}

MasterLayout master_layout(const BilevelInstance& inst) { return {inst.r, inst.n, inst.m}; }

LpProblem build_master_lp(const BilevelInstance& inst, const Iterate& it, double mu) {
  require_length(it.u_bar, inst.r, "u_bar");
  require_length(it.y_bar, inst.n, "y_bar");
  require_length(it.lambda_bar, inst.m, "lambda_bar");
  const Index m = inst.m, n = inst.n, r = inst.r;
  const MasterLayout L = master_layout(inst);
  const Matrix CX = inst.C + materialize_X(inst, it.u_bar);

  // dX(i, j) = sum_k P(i + j m, k) du_k, so
  //   (dX y_bar)_i       = sum_k [sum_j P(i + j m, k) y_bar_j] du_k
  //   (dX' lambda_bar)_j = sum_k [sum_i P(i + j m, k) lambda_bar_i] du_k
  Matrix primal_du = Matrix::Zero(m, r);
  Matrix dual_du = Matrix::Zero(n, r);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < m; ++i) {
      const auto Prow = inst.P.row(i + j * m);
      primal_du.row(i) += it.y_bar(j) * Prow;
      dual_du.row(j) += it.lambda_bar(i) * Prow;
    }
  }

  LpProblem lp = LpProblem::free_vars(L.nvars());
  lp.cost.segment(L.du(), r) = inst.cu;
  lp.cost.segment(L.y(), n) = inst.d + mu * inst.e;
  lp.cost.segment(L.lambda(), m) = -mu * inst.b;
  lp.lower_bounds.segment(L.lambda(), m).setZero();

  const Vector upper_rhs = inst.a - inst.Au * it.u_bar;
  for (Index i = 0; i < inst.p; ++i) {
    Vector row = Vector::Zero(L.nvars());
    row.segment(L.du(), r) = inst.Au.row(i).transpose();
    row.segment(L.y(), n) = inst.B.row(i).transpose();
    lp.add_ineq(row, upper_rhs(i));
  }
  for (Index i = 0; i < m; ++i) {
    Vector row = Vector::Zero(L.nvars());
    row.segment(L.du(), r) = primal_du.row(i).transpose();
    row.segment(L.y(), n) = CX.row(i).transpose();
    lp.add_ineq(row, inst.b(i));
  }
  for (Index j = 0; j < n; ++j) {
    Vector row = Vector::Zero(L.nvars());
    row.segment(L.du(), r) = dual_du.row(j).transpose();
    row.segment(L.lambda(), m) = CX.col(j);
    lp.add_eq(row, inst.e(j));
  }
  return lp;
}

}  // namespace palm
