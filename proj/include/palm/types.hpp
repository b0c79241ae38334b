#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace palm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Raised when operands do not have conforming shapes.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when the LP engine cannot make progress (tiny pivots, singular
/// basis, iteration cap) or a stage that must succeed does not.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace palm
