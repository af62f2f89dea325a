#pragma once

// Test-only reference computations that share no code with the library kernels.

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>

#include "caqr/matrix.hpp"

namespace oracle {

inline Eigen::MatrixXd to_eigen(const caqr::DenseMatrix& a) {
  Eigen::MatrixXd e(a.rows(), a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) e(i, j) = a(i, j);
  return e;
}

/// 2-norm condition number from Eigen's SVD.
inline double condition_number(const caqr::DenseMatrix& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(a));
  const auto& s = svd.singularValues();
  return s(0) / s(s.size() - 1);
}

/// R of A by Givens rotations, rows scaled so diag(R) >= 0.
inline caqr::DenseMatrix givens_r(caqr::DenseMatrix a) {
  const std::size_t m = a.rows(), n = a.cols();
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = m - 1; i > j; --i) {
      double x = a(i - 1, j), y = a(i, j);
      if (y == 0.0) continue;
      double r = std::hypot(x, y), c = x / r, s = y / r;
      for (std::size_t k = j; k < n; ++k) {
        double u = a(i - 1, k), v = a(i, k);
        a(i - 1, k) = c * u + s * v;
        a(i, k) = -s * u + c * v;
      }
    }
  caqr::DenseMatrix r(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double sign = a(i, i) < 0 ? -1.0 : 1.0;
    for (std::size_t j = i; j < n; ++j) r(i, j) = sign * a(i, j);
  }
  return r;
}

/// Largest entrywise difference.
inline double max_diff(const caqr::DenseMatrix& a, const caqr::DenseMatrix& b) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) d = std::max(d, std::abs(a(i, j) - b(i, j)));
  return d;
}

}  // namespace oracle
