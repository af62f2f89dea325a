#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>

#include "caqr/matrix.hpp"

namespace caqr {

/// Lower bounds are clipped at zero.
struct CommBound {
  double words = 0;
  double messages = 0;
};

namespace detail {

inline double clip(double x) { return std::max(0.0, x); }

inline void check_positive(double x, const char* what) {
  if (!(x > 0)) throw std::invalid_argument(what);
}

/// Lower bound on multiplications for the right half of R.
inline double qr_mults_half(double m, double n) { return m * n * n / 4 - n * n / 8 * (n / 2 + 1); }

inline double qr_mults_weak(double m, double n) { return 3 * n * n * (m - 4.0 / 3) / 16; }

}  // namespace detail

/// n x n times n x n, fast memory of W words.
inline CommBound lb_seq_matmul(double n, double w) {
  detail::check_positive(n, "lb_seq_matmul: need n > 0");
  detail::check_positive(w, "lb_seq_matmul: need W > 0");
  const double f = n * n * n / (2 * std::sqrt(2.0));
  return {detail::clip(f / std::sqrt(w) - w), detail::clip(f / std::pow(w, 1.5) - 1)};
}

/// 2-D parallel matmul with mu n^2 / P words per processor; requires P >= 32 mu^3.
inline CommBound lb_par_matmul_2d(double n, double p, double mu) {
  detail::check_positive(n, "lb_par_matmul_2d: need n > 0");
  detail::check_positive(mu, "lb_par_matmul_2d: need mu > 0");
  if (!(p >= 32 * mu * mu * mu)) throw std::invalid_argument("lb_par_matmul_2d: need P >= 32 mu^3");
  return {n * n / (4 * std::sqrt(2.0) * std::sqrt(mu * p)), std::sqrt(p) / (4 * std::sqrt(2.0) * std::pow(mu, 1.5))};
}

/// (n x r) times (r x m) on P processors with 3 n' m' / P words each.
inline CommBound lb_rect_matmul(double m, double n, double r, double p) {
  detail::check_positive(m * n * r, "lb_rect_matmul: need positive dimensions");
  detail::check_positive(p, "lb_rect_matmul: need P > 0");
  std::array<double, 3> s{m, n, r};
  std::sort(s.begin(), s.end(), std::greater<>());
  const double nb = s[0], mb = s[1], rb = s[2];
  if (rb < std::sqrt(864 * nb * mb / p)) throw std::invalid_argument("lb_rect_matmul: matrices too rectangular");
  return {std::sqrt(nb * mb) * rb / std::sqrt(96 * p), std::sqrt(p) * rb / std::sqrt(864 * nb * mb)};
}

/// Sequential QR of m x n with fast memory W.
inline CommBound lb_seq_qr(double m, double n, double w) {
  detail::check_positive(w, "lb_seq_qr: need W > 0");
  if (!(n >= 1 && m >= n)) throw std::invalid_argument("lb_seq_qr: need m >= n >= 1");
  const double f = detail::qr_mults_weak(m, n);
  return {detail::clip(f / std::sqrt(8 * w) - w), detail::clip(f / std::sqrt(8 * w * w * w) - 1)};
}

/// Words and messages some processor must send or receive, W words per processor.
inline CommBound lb_par_qr(double m, double n, double p, double w) {
  detail::check_positive(p, "lb_par_qr: need P > 0");
  detail::check_positive(w, "lb_par_qr: need W > 0");
  if (!(n >= 1 && m >= n)) throw std::invalid_argument("lb_par_qr: need m >= n >= 1");
  const double f = detail::qr_mults_weak(m, n) / p;
  return {detail::clip(f / std::sqrt(8 * w) - w), detail::clip(f / std::sqrt(8 * w * w * w) - 1)};
}

/// W = mn/P and n >= 2^11 m / P.
inline CommBound lb_par_qr_special(double m, double n, double p) {
  if (!(n >= 1 && m >= n && p >= 1)) throw std::invalid_argument("lb_par_qr_special: need m >= n >= 1, P >= 1");
  if (n < 2048 * m / p) throw std::invalid_argument("lb_par_qr_special: need n >= 2^11 m / P");
  return {std::sqrt(m * n * n * n / (2048 * p)), std::sqrt(n * p / (2048 * m))};
}

/// Multiplications needed for column j+1 of R.
inline double lb_qr_flops_column(double m, double j) { return m * j - j * (j + 1) / 2; }

/// Multiplications needed for columns n/2+1 .. n of R.
inline double lb_qr_flops(double m, double n) {
  if (!(n >= 1 && m >= n)) throw std::invalid_argument("lb_qr_flops: need m >= n >= 1");
  return detail::clip(detail::qr_mults_half(m, n));
}

/// Words on each reduction-tree edge for an n-column R.
inline double lb_reduction_edge(double n) {
  if (!(n >= 1)) throw std::invalid_argument("lb_reduction_edge: need n >= 1");
  return n * (n + 1) / 2;
}

struct GemmViaLu {
  DenseMatrix product;
  double residual = 0;
};

/// Multiply A and B by unpivoted LU of [I 0 -B; A I 0; 0 0 I]; the product appears in U.
inline GemmViaLu gemm_via_lu_check(const DenseMatrix& a, const DenseMatrix& b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.rows() != n || b.cols() != n) throw std::invalid_argument("gemm_via_lu: need square conformal A, B");
  const std::size_t N = 3 * n;
  DenseMatrix m = DenseMatrix::identity(N);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      m(i, 2 * n + j) = -b(i, j);
      m(n + i, j) = a(i, j);
    }
  for (std::size_t k = 0; k < N; ++k) {
    const double piv = m(k, k);
    if (piv == 0.0) throw std::runtime_error("gemm_via_lu: zero pivot");
    for (std::size_t i = k + 1; i < N; ++i) m(i, k) /= piv;
    for (std::size_t j = k + 1; j < N; ++j) {
      const double u = m(k, j);
      if (u == 0.0) continue;
      for (std::size_t i = k + 1; i < N; ++i) m(i, j) -= m(i, k) * u;
    }
  }
  GemmViaLu r{m.block(n, 2 * n, n, n), 0.0};
  DenseMatrix direct(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0;
      for (std::size_t k = 0; k < n; ++k) s += a(i, k) * b(k, j);
      direct(i, j) = s;
    }
  r.residual = fro_norm(subtract(r.product, direct));
  return r;
}

}  // namespace caqr
