#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "palm/types.hpp"

namespace palm {

inline constexpr double kTolFeas = 1e-8;  ///< primal feasibility of returned points
inline constexpr double kTolDual = 1e-6;  ///< primal/dual objective agreement
inline constexpr double kTolFix = 1e-7;   ///< objective slack when reselecting

/**
 * Dense linear program in minimization form
 *
 *   min  cost'w   s.t.  G w >= h,  H w = k,  w_j >= lower_bounds_j
 *
 * where every lower bound is either 0 or -infinity.
 */
struct LpProblem {
  Index nvars = 0;
  Vector cost;
  Matrix G;
  Vector h;
  Matrix H;
  Vector k;
  Vector lower_bounds;

  /// Empty problem over `nvars` free variables with zero cost.
  static LpProblem free_vars(Index nvars);

  Index n_ineq() const { return G.rows(); }
  Index n_eq() const { return H.rows(); }

  void add_ineq(const Eigen::Ref<const Vector>& row, double rhs);
  void add_eq(const Eigen::Ref<const Vector>& row, double rhs);
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

const char* to_string(LpStatus s);

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Vector w;
  double objective = 0.0;
  /// One multiplier per row, inequality rows first then equality rows.
  /// Inequality multipliers are non-negative; the dual objective is
  /// h'duals_ineq + k'duals_eq.
  Vector duals;
  int iterations = 0;

  bool optimal() const { return status == LpStatus::Optimal; }
};

constexpr double kFree = -std::numeric_limits<double>::infinity();

/// Throws DimensionError on inconsistent shapes, non-finite data, or a bound
/// that is neither 0 nor -infinity.
void validate_lp(const LpProblem& lp);

/// Two-phase dense simplex. Dantzig pricing, switching to Bland's rule after
/// a degenerate pivot. Infeasible and Unbounded are reported through the
/// status; NumericalFailure is thrown when the method breaks down.
LpSolution solve_lp(const LpProblem& lp);

/**
 * Among the optimal solutions of `lp`, return one minimizing the 1-norm
 * distance to `prev` over the coordinates listed in `measured`
 * (all coordinates when `measured` is empty).
 *
 * Stage one computes v* = min cost'w. Stage two minimizes sum_j s_j with
 * s_j >= +-(w_j - prev_j) subject to the original rows plus
 * cost'w <= v* + kTolFix (or a relative 1e-12 when |v*| is so large
 * that kTolFix is below its resolution). The duals reported are those of
 * stage one, which are optimal for every primal optimum.
 *
 * Returns the stage-one solution unchanged when it is not Optimal.
 */
LpSolution solve_closest(const LpProblem& lp, const Vector& prev,
                         std::span<const Index> measured = {});

/// Adds equality rows w_j = values_j for each listed index.
LpProblem pin_variables(LpProblem lp, std::span<const Index> indices, const Vector& values);

/// max(0, h - G w), |H w - k| and bound violations, whichever is largest.
double max_violation(const LpProblem& lp, const Vector& w);

/// Human-readable listing, one row per line, 17 significant digits.
std::string dump(const LpProblem& lp);

}  // namespace palm
