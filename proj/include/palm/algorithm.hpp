#pragma once

#include <string>
#include <vector>

#include "palm/model.hpp"
#include "palm/reformulation.hpp"

namespace palm {

struct PalmConfig {
  double mu0 = 1.0;
  double growth = 2.0;
  double eps_opt = 1e-6;  ///< outer tolerance on the lower-level duality gap
  double eps_apx = 1e-6;  ///< inner tolerance on |P du|_inf
  int max_outer = 60;
  int max_inner = 100;
  Vector u0;  ///< empty means the zero vector of length r

  /// Throws std::invalid_argument on non-positive parameters.
  void check() const;
};

/// One inner iteration. `u_base` is where y_bar and lambda_bar were computed;
/// `u_bar` is the point after the linearized step.
struct TraceRecord {
  int outer_i = 0;
  int inner_j = 0;
  double mu = 0.0;
  double gap = 0.0;
  double dx_inf = 0.0;
  Vector u_base;
  Vector u_bar;
  Vector y_bar;
  Vector lambda_bar;
  double upper_objective = 0.0;  ///< cu'u_bar + d'y_bar
  bool inner_cap_hit = false;
};

struct PalmState {
  Iterate iterate;
  double mu = 0.0;
  int outer_i = 0;
  int inner_j = 0;
  double last_dx_inf = 0.0;
  double gap = 0.0;
};

enum class PalmStatus { Converged, MaxOuterExceeded, MasterInfeasible, NumericalFailure };

const char* to_string(PalmStatus s);

struct PalmResult {
  PalmStatus status = PalmStatus::NumericalFailure;
  /// Consistent triple: y_bar and lambda_bar solve the exact subproblems at u_bar.
  Iterate iterate;
  double gap = 0.0;
  double upper_objective = 0.0;
  int outer_iterations = 0;
  bool certified = false;  ///< true only for Converged
  std::string detail;
  std::vector<TraceRecord> trace;
};

/// Penalty loop around alternating exact-subproblem reselection and
/// linearized master steps. The instance must validate.
PalmResult run_palm(const BilevelInstance& inst, const PalmConfig& cfg = {});

struct FeasibilityReport {
  double primal_violation = 0.0;  ///< max(0, b - (C + X_bar) y_bar)
  double dual_violation = 0.0;    ///< |(C + X_bar)' lambda - e| and max(0, -lambda)
  double upper_violation = 0.0;   ///< max(0, a - Au u - B y)
  double gap = 0.0;               ///< e'y_bar - b'lambda_bar

  bool within(double tol) const {
    return primal_violation <= tol && dual_violation <= tol && upper_violation <= tol;
  }
};

/// Exact (non-linearized) residuals of the bilevel single-level system.
FeasibilityReport check_bilevel_feasibility(const BilevelInstance& inst, const Iterate& it);

double lower_gap(const BilevelInstance& inst, const Vector& y, const Vector& lambda);
double upper_objective(const BilevelInstance& inst, const Vector& u, const Vector& y);

}  // namespace palm
