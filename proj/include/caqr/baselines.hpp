#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <span>
#include <string>
#include <vector>

#include "caqr/counters.hpp"
#include "caqr/householder.hpp"
#include "caqr/matrix.hpp"

namespace caqr {

enum class QrStatus { ok, breakdown };

inline std::string to_string(QrStatus s) { return s == QrStatus::ok ? "ok" : "breakdown"; }

/// Explicit thin factorization. On breakdown q and r hold whatever was computed so far.
struct ThinQR {
  DenseMatrix q;
  DenseMatrix r;
  QrStatus status = QrStatus::ok;
  std::size_t failed_column = 0;
};

namespace detail {

inline void check_tall(const DenseMatrix& a, const char* who) {
  if (a.cols() == 0 || a.rows() < a.cols()) throw std::invalid_argument(std::string(who) + ": need m >= n >= 1");
}

inline double dot(std::span<const double> x, std::span<const double> y, OpCount& ops) {
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  ops.flops += 2 * x.size() - 1;
  ops.multiplies += x.size();
  return s;
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y, OpCount& ops) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
  ops.flops += 2 * x.size();
  ops.multiplies += x.size();
}

/// Normalize v into q; false if its norm is zero or not finite.
inline bool normalize(std::span<const double> v, std::span<double> q, double& norm, OpCount& ops) {
  norm = std::sqrt(dot(v, v, ops));
  ops.flops += 1;
  if (!(norm > 0) || !std::isfinite(norm)) return false;
  for (std::size_t i = 0; i < v.size(); ++i) q[i] = v[i] / norm;
  ops.divisions += v.size();
  return true;
}

}  // namespace detail

/// Gram matrix, Cholesky factor R, then Q = A R^-1.
inline ThinQR cholesky_qr(const DenseMatrix& a, CommCounters& counters) {
  detail::check_tall(a, "cholesky_qr");
  const std::size_t m = a.rows(), n = a.cols();
  OpCount ops;
  ThinQR out{DenseMatrix(m, n), DenseMatrix(n, n)};
  DenseMatrix g(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i <= j; ++i) g(i, j) = detail::dot(a.col(i), a.col(j), ops);
  DenseMatrix& r = out.r;
  for (std::size_t k = 0; k < n; ++k) {
    double d = g(k, k);
    for (std::size_t i = 0; i < k; ++i) d -= r(i, k) * r(i, k);
    ops.flops += 2 * k + 1;
    ops.multiplies += k;
    if (!(d > 0) || !std::isfinite(d)) {
      out.status = QrStatus::breakdown;
      out.failed_column = k;
      counters.record_flops(0, ops);
      return out;
    }
    r(k, k) = std::sqrt(d);
    for (std::size_t j = k + 1; j < n; ++j) {
      double s = g(k, j);
      for (std::size_t i = 0; i < k; ++i) s -= r(i, k) * r(i, j);
      r(k, j) = s / r(k, k);
    }
    ops.flops += (n - k - 1) * 2 * k;
    ops.multiplies += (n - k - 1) * k;
    ops.divisions += n - k - 1;
  }
  // forward substitution Q R = A, one column of Q at a time
  DenseMatrix& q = out.q;
  for (std::size_t j = 0; j < n; ++j) {
    auto qj = q.col(j);
    auto aj = a.col(j);
    for (std::size_t i = 0; i < m; ++i) qj[i] = aj[i];
    for (std::size_t k = 0; k < j; ++k) detail::axpy(-r(k, j), q.col(k), qj, ops);
    for (std::size_t i = 0; i < m; ++i) qj[i] /= r(j, j);
    ops.divisions += m;
  }
  counters.record_flops(0, ops);
  return out;
}

/// Left-looking classical Gram-Schmidt: column j is projected against the original a_j.
inline ThinQR cgs(const DenseMatrix& a, CommCounters& counters) {
  detail::check_tall(a, "cgs");
  const std::size_t m = a.rows(), n = a.cols();
  OpCount ops;
  ThinQR out{DenseMatrix(m, n), DenseMatrix(n, n)};
  std::vector<double> v(m);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < j; ++k) out.r(k, j) = detail::dot(out.q.col(k), a.col(j), ops);
    auto aj = a.col(j);
    v.assign(aj.begin(), aj.end());
    for (std::size_t k = 0; k < j; ++k) detail::axpy(-out.r(k, j), out.q.col(k), v, ops);
    if (!detail::normalize(v, out.q.col(j), out.r(j, j), ops)) {
      out.status = QrStatus::breakdown;
      out.failed_column = j;
      break;
    }
  }
  counters.record_flops(0, ops);
  return out;
}

/// Right-looking modified Gram-Schmidt: each new q_j is removed from all later columns at once.
inline ThinQR mgs_right_looking(const DenseMatrix& a, CommCounters& counters) {
  detail::check_tall(a, "mgs");
  const std::size_t m = a.rows(), n = a.cols();
  OpCount ops;
  ThinQR out{DenseMatrix(m, n), DenseMatrix(n, n)};
  DenseMatrix v = a;
  for (std::size_t j = 0; j < n; ++j) {
    if (!detail::normalize(v.col(j), out.q.col(j), out.r(j, j), ops)) {
      out.status = QrStatus::breakdown;
      out.failed_column = j;
      break;
    }
    for (std::size_t k = j + 1; k < n; ++k) {
      out.r(j, k) = detail::dot(out.q.col(j), v.col(k), ops);
      detail::axpy(-out.r(j, k), out.q.col(j), v.col(k), ops);
    }
  }
  counters.record_flops(0, ops);
  return out;
}

/// Unblocked Householder with Q formed explicitly; the operation count covers the factorization.
inline ThinQR householder_reference(const DenseMatrix& a, CommCounters& counters) {
  detail::check_tall(a, "householder_reference");
  OpCount ops;
  HouseholderFactor f = qr_unblocked(a, ops);
  counters.record_flops(0, ops);
  return {explicit_q(f), f.r, QrStatus::ok, 0};
}

inline ThinQR cholesky_qr(const DenseMatrix& a) {
  CommCounters c;
  return cholesky_qr(a, c);
}

inline ThinQR cgs(const DenseMatrix& a) {
  CommCounters c;
  return cgs(a, c);
}

inline ThinQR mgs_right_looking(const DenseMatrix& a) {
  CommCounters c;
  return mgs_right_looking(a, c);
}

inline ThinQR householder_reference(const DenseMatrix& a) {
  CommCounters c;
  return householder_reference(a, c);
}

}  // namespace caqr
