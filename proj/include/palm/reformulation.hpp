#pragma once

#include "palm/lp.hpp"
#include "palm/model.hpp"

namespace palm {

/// Linearization point (u_bar, y_bar, lambda_bar); X_bar = materialize_X(u_bar).
struct Iterate {
  Vector u_bar;
  Vector y_bar;
  Vector lambda_bar;
};

/// min e'y - b'lambda over (y free, lambda >= 0) with u fixed at u0:
/// Au u0 + B y >= a, (C + X0) y >= b, (C + X0)' lambda = e.
/// Variable order: y (n), lambda (m).
LpProblem build_init_problem(const BilevelInstance& inst, const Vector& u0);

/// min (d + mu e)'y  s.t.  Au u_bar + B y >= a, (C + X_bar) y >= b, y free.
LpProblem build_subproblem_primal(const BilevelInstance& inst, const Vector& u_bar, double mu);

/// min -b'lambda  s.t.  (C + X_bar)' lambda = e, lambda >= 0.
LpProblem build_subproblem_dual(const BilevelInstance& inst, const Vector& u_bar);

struct Expansion {
  Vector exact;    ///< (X_bar + dX)(y_bar + dy)
  Vector approx;   ///< X_bar (y_bar + dy) + dX y_bar
  Vector dropped;  ///< dX dy
};

/// First-order expansion of the bilinear product around (X_bar, y_bar).
Expansion linearize_expansion(const Matrix& X_bar, const Vector& y_bar, const Matrix& dX,
                              const Vector& dy);

/// Column ranges of the master LP's variables.
struct MasterLayout {
  Index r = 0;
  Index n = 0;
  Index m = 0;
  Index du() const { return 0; }
  Index y() const { return r; }
  Index lambda() const { return r + n; }
  Index nvars() const { return r + n + m; }
};

MasterLayout master_layout(const BilevelInstance& inst);

/**
 * Penalized problem with the bilinear terms replaced by their expansion
 * around the iterate, over (du, y, lambda) with dX = mat(P du):
 *
 *   min  cu'du + d'y + mu (e'y - b'lambda)          (+ constant cu'u_bar)
 *   s.t. Au du + B y >= a - Au u_bar
 *        (C + X_bar) y + dX y_bar >= b
 *        (C + X_bar)' lambda + dX' lambda_bar = e
 *        lambda >= 0
 */
LpProblem build_master_lp(const BilevelInstance& inst, const Iterate& it, double mu);

}  // namespace palm
