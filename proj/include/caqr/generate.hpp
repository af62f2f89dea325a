#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include "caqr/householder.hpp"
#include "caqr/matrix.hpp"

namespace caqr {

enum class MatrixKind { uniform, laplace, identity, zero };

inline MatrixKind parse_matrix_kind(const std::string& s) {
  if (s == "uniform") return MatrixKind::uniform;
  if (s == "laplace" || s == "laplace-like-structured") return MatrixKind::laplace;
  if (s == "identity") return MatrixKind::identity;
  if (s == "zero") return MatrixKind::zero;
  throw std::invalid_argument("unknown matrix kind: " + s);
}

/// Uniform doubles in [-1, 1) from std::mt19937_64, 53 high bits per draw.
class UniformSource {
 public:
  explicit UniformSource(std::uint64_t seed) : eng_(seed) {}
  double next() { return 2.0 * (static_cast<double>(eng_() >> 11) * 0x1.0p-53) - 1.0; }

 private:
  std::mt19937_64 eng_;
};

/// Deterministic test matrices. `laplace` is the 1-D second-difference stencil (2 on the
/// diagonal, -1 beside it) with a seeded perturbation of size 1e-3 so it stays full rank
/// in tall shapes.
inline DenseMatrix generate(MatrixKind kind, std::size_t m, std::size_t n, std::uint64_t seed) {
  if (m == 0 || n == 0) throw std::invalid_argument("generate: zero dimension");
  DenseMatrix a(m, n);
  switch (kind) {
    case MatrixKind::uniform: {
      UniformSource src(seed);
      for (std::size_t k = 0; k < a.size(); ++k) a.data()[k] = src.next();
      break;
    }
    case MatrixKind::laplace: {
      UniformSource src(seed);
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < m; ++i) {
          double v = i == j ? 2.0 : (i + 1 == j || j + 1 == i ? -1.0 : 0.0);
          a(i, j) = v + 1e-3 * src.next();
        }
      break;
    }
    case MatrixKind::identity:
      a = DenseMatrix::identity(m, n);
      break;
    case MatrixKind::zero:
      break;
  }
  return a;
}

/// Q1 * diag(sigma) * Q2^T with sigma log-spaced from 1 down to 1/kappa.
inline DenseMatrix generate_with_condition(std::size_t m, std::size_t n, double kappa, std::uint64_t seed) {
  if (m == 0 || n == 0) throw std::invalid_argument("generate: zero dimension");
  if (m < n) throw std::invalid_argument("generate_with_condition: m < n");
  if (!(kappa >= 1.0) || !std::isfinite(kappa)) throw std::invalid_argument("kappa must be >= 1");
  DenseMatrix q1 = explicit_q(qr_unblocked(generate(MatrixKind::uniform, m, n, seed)));
  DenseMatrix q2 = explicit_q(qr_unblocked(generate(MatrixKind::uniform, n, n, seed ^ 0x9e3779b97f4a7c15ULL)));
  for (std::size_t j = 0; j < n; ++j) {
    double s = n == 1 ? 1.0 : std::pow(kappa, -static_cast<double>(j) / static_cast<double>(n - 1));
    for (std::size_t i = 0; i < m; ++i) q1(i, j) *= s;
  }
  return multiply(q1, q2.transpose());
}

}  // namespace caqr
