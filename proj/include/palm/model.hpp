#pragma once

#include <string>
#include <vector>

#include "palm/types.hpp"

namespace palm {

/**
 * Bilevel program with a linear upper level and a lower level whose
 * constraint matrix is perturbed by the upper-level decision:
 *
 *   min_{u,y}  cu'u + d'y
 *   s.t.       Au u + B y >= a
 *              y in argmin { e'y : (C + X(u)) y >= b }
 *
 * with vec(X(u)) = P u + x0 (column-major vec). Taking r = m*n, P = I and
 * x0 = 0 gives the plain matrix-valued upper decision. Upper-level auxiliary
 * variables are coordinates of u whose column of P is zero.
 *
 * The lower-level y carries no sign restriction; bounds on y are written as
 * rows of C with zero coupling in P.
 */
struct BilevelInstance {
  std::string name;

  Index m = 0;  ///< lower-level rows (size of b and lambda)
  Index n = 0;  ///< lower-level variables (size of y, e, d)
  Index p = 0;  ///< upper-level rows (size of a)
  Index r = 0;  ///< upper-level decision length (size of u)

  Matrix C;   // m x n
  Vector b;   // m
  Vector e;   // n
  Matrix P;   // (m*n) x r
  Vector x0;  // m*n
  Vector cu;  // r
  Vector d;   // n
  Matrix Au;  // p x r
  Matrix B;   // p x n
  Vector a;   // p
};

/// Column-major stacking: vec(X)[i + j*rows] = X(i, j).
Vector vec(const Matrix& X);

/// Inverse of vec.
Matrix mat(const Vector& v, Index rows, Index cols);

/// X(u) = mat(P u + x0), an m x n matrix.
Matrix materialize_X(const BilevelInstance& inst, const Vector& u);

/// Every dimension or finiteness violation found in `inst`. Empty when valid.
std::vector<std::string> validate(const BilevelInstance& inst);

/// Throws DimensionError listing all violations when `inst` is invalid.
void require_valid(const BilevelInstance& inst);

/// The four-row, two-variable demonstration problem: minimize |x| subject to
/// y2 <= 1.5 where y solves min y1 + y2 s.t. (0.5 + x) y1 + y2 >= 3,
/// (1 - x) y1 + 0.5 y2 >= 3, y >= 0. Encoded with u = (x, t) and t >= |x|.
BilevelInstance example_instance();

}  // namespace palm
