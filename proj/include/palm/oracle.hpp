#pragma once

#include <string>
#include <variant>
#include <vector>

#include "palm/model.hpp"

namespace palm {

struct GridFixed {
  double value = 0.0;
};
struct GridRange {
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;
};
struct GridFree {};

using GridAxis = std::variant<GridFixed, GridRange, GridFree>;

/// One axis per coordinate of u.
struct GridSpec {
  std::vector<GridAxis> axes;

  /// Points of a Range axis: lo + k*step for k = 0 .. floor((hi - lo)/step).
  static std::vector<double> points(const GridRange& range);
};

/// Throws std::invalid_argument when the grid does not fit the instance:
/// wrong axis count, bad ranges, or a Free coordinate with a nonzero P column.
void check_grid(const BilevelInstance& inst, const GridSpec& grid);

enum class OracleStatus { Optimal, NoFeasiblePoint };

const char* to_string(OracleStatus s);

struct OracleResult {
  OracleStatus status = OracleStatus::NoFeasiblePoint;
  Vector best_u;
  Vector best_y;
  double best_objective = 0.0;
  long feasible_points = 0;
  long evaluated_points = 0;
};

/// Lower-level value is unbounded at a grid point; the bilevel value is undefined.
class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kTolLex = 1e-7;

/**
 * Enumerates the grid. At each point g the lower-level value
 * v*(g) = min { e'y : (C + X(g)) y >= b } is computed, then the optimistic
 * response min cu'u + d'y over y and the Free coordinates subject to the
 * upper rows, (C + X(g)) y >= b and e'y <= v*(g) + tol_lex. The best point
 * minimizes the objective; ties go to the lexicographically smallest gridded
 * coordinates.
 *
 * `threads` <= 0 means std::thread::hardware_concurrency().
 */
OracleResult run_oracle(const BilevelInstance& inst, const GridSpec& grid, double tol_lex = kTolLex,
                        int threads = 1);

}  // namespace palm
