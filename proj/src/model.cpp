#include "palm/model.hpp"

#include <cmath>
#include <sstream>

namespace palm {

Vector vec(const Matrix& X) {
  // Matrix is column-major, so its storage order is already the vec order.
  return X.reshaped();
}

Matrix mat(const Vector& v, Index rows, Index cols) {
  if (v.size() != rows * cols) {
    std::ostringstream os;
    os << "mat: vector of length " << v.size() << " cannot be reshaped to " << rows << "x"
       << cols;
    throw DimensionError(os.str());
  }
  return v.reshaped(rows, cols);
}

Matrix materialize_X(const BilevelInstance& inst, const Vector& u) {
  if (u.size() != inst.r || inst.P.cols() != inst.r || inst.P.rows() != inst.m * inst.n ||
      inst.x0.size() != inst.m * inst.n) {
    std::ostringstream os;
    os << "materialize_X: u has length " << u.size() << ", P is " << inst.P.rows() << "x"
       << inst.P.cols() << ", x0 has length " << inst.x0.size() << " (expected r=" << inst.r
       << ", m*n=" << inst.m * inst.n << ")";
    throw DimensionError(os.str());
  }
  return mat(inst.P * u + inst.x0, inst.m, inst.n);
}

namespace {

void check_matrix(std::vector<std::string>& out, const char* name, const Matrix& M, Index rows,
                  Index cols, const char* rows_sym, const char* cols_sym) {
  if (M.rows() != rows) {
    std::ostringstream os;
    os << name << " row count " << M.rows() << " != " << rows_sym << " (" << rows << ")";
    out.push_back(os.str());
  }
  if (M.cols() != cols) {
    std::ostringstream os;
    os << name << " column count " << M.cols() << " != " << cols_sym << " (" << cols << ")";
    out.push_back(os.str());
  }
  for (Index j = 0; j < M.cols(); ++j) {
    for (Index i = 0; i < M.rows(); ++i) {
      if (!std::isfinite(M(i, j))) {
        std::ostringstream os;
        os << "non-finite entry " << name << "[" << i << "][" << j << "]";
        out.push_back(os.str());
      }
    }
  }
}

void check_vector(std::vector<std::string>& out, const char* name, const Vector& v, Index len,
                  const char* len_sym) {
  if (v.size() != len) {
    std::ostringstream os;
    os << name << " length " << v.size() << " != " << len_sym << " (" << len << ")";
    out.push_back(os.str());
  }
  for (Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v(i))) {
      std::ostringstream os;
      os << "non-finite entry " << name << "[" << i << "]";
      out.push_back(os.str());
    }
  }
}

}  // namespace

std::vector<std::string> validate(const BilevelInstance& inst) {
  std::vector<std::string> out;
  if (inst.m < 0 || inst.n < 0 || inst.p < 0 || inst.r < 0) {
    out.emplace_back("dimensions m, n, p, r must be non-negative");
    return out;
  }
  const Index mn = inst.m * inst.n;
  check_matrix(out, "C", inst.C, inst.m, inst.n, "m", "n");
  check_vector(out, "b", inst.b, inst.m, "m");
  check_vector(out, "e", inst.e, inst.n, "n");
  check_matrix(out, "P", inst.P, mn, inst.r, "m*n", "r");
  check_vector(out, "x0", inst.x0, mn, "m*n");
  check_vector(out, "cu", inst.cu, inst.r, "r");
  check_vector(out, "d", inst.d, inst.n, "n");
  check_matrix(out, "Au", inst.Au, inst.p, inst.r, "p", "r");
  check_matrix(out, "B", inst.B, inst.p, inst.n, "p", "n");
  check_vector(out, "a", inst.a, inst.p, "p");
  return out;
}

void require_valid(const BilevelInstance& inst) {
  const auto violations = validate(inst);
  if (violations.empty()) return;
  std::ostringstream os;
  os << "invalid instance '" << inst.name << "':";
  for (const auto& v : violations) os << "\n  " << v;
  throw DimensionError(os.str());
}

BilevelInstance example_instance() {
  BilevelInstance inst;
  inst.name = "minimal-example";
  inst.m = 4;
  inst.n = 2;
  inst.p = 3;
  inst.r = 2;

  inst.C.resize(4, 2);
  inst.C << 0.5, 1.0,
            1.0, 0.5,
            1.0, 0.0,
            0.0, 1.0;
  inst.b = Vector{{3.0, 3.0, 0.0, 0.0}};
  inst.e = Vector{{1.0, 1.0}};

  // u = (x, t). x enters X(0,0) with +1 and X(1,0) with -1; t is auxiliary.
  inst.P = Matrix::Zero(8, 2);
  inst.P(0 + 0 * 4, 0) = 1.0;
  inst.P(1 + 0 * 4, 0) = -1.0;
  inst.x0 = Vector::Zero(8);

  inst.cu = Vector{{0.0, 1.0}};
  inst.d = Vector::Zero(2);

  // -y2 >= -1.5;  t - x >= 0;  t + x >= 0.
  inst.Au.resize(3, 2);
  inst.Au << 0.0, 0.0,
            -1.0, 1.0,
             1.0, 1.0;
  inst.B.resize(3, 2);
  inst.B << 0.0, -1.0,
            0.0, 0.0,
            0.0, 0.0;
  inst.a = Vector{{-1.5, 0.0, 0.0}};
  return inst;
}

}  // namespace palm
