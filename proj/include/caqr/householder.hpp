#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "caqr/counters.hpp"
#include "caqr/matrix.hpp"

namespace caqr {

enum class BlockKind { dense, triangular };

/// One block of rows in a vertically stacked input. Triangular blocks are upper triangular.
struct StackedBlock {
  std::size_t offset = 0;
  std::size_t rows = 0;
  BlockKind kind = BlockKind::dense;

  friend bool operator==(const StackedBlock&, const StackedBlock&) = default;
};

/// Half-open row interval.
struct RowRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const noexcept { return end - begin; }
};

using RowRanges = std::vector<RowRange>;

/// Rows that reflector j may touch, given the sparsity of the stacked input.
inline RowRanges reflector_support(const std::vector<StackedBlock>& s, std::size_t j) {
  RowRanges out;
  const StackedBlock& top = s.front();
  if (top.kind == BlockKind::dense)
    out.push_back({top.offset + j, top.offset + top.rows});
  else
    out.push_back({top.offset + j, top.offset + j + 1});
  for (std::size_t k = 1; k < s.size(); ++k) {
    const StackedBlock& b = s[k];
    std::size_t len = b.kind == BlockKind::dense ? b.rows : std::min(j + 1, b.rows);
    if (len) out.push_back({b.offset, b.offset + len});
  }
  return out;
}

inline RowRanges intersect(const RowRanges& a, const RowRanges& b) {
  RowRanges out;
  std::size_t i = 0, k = 0;
  while (i < a.size() && k < b.size()) {
    std::size_t lo = std::max(a[i].begin, b[k].begin);
    std::size_t hi = std::min(a[i].end, b[k].end);
    if (lo < hi) out.push_back({lo, hi});
    if (a[i].end < b[k].end) ++i; else ++k;
  }
  return out;
}

inline std::size_t total_rows(const RowRanges& r) {
  std::size_t t = 0;
  for (const auto& x : r) t += x.size();
  return t;
}

/**
 * Householder QR factor: Q = rho_0 rho_1 ... rho_{n-1}, rho_j = I - tau_j v_j v_j^T.
 * Column j of `y` holds v_j with an explicit 1 at its pivot row and zeros outside
 * reflector_support(structure, j).
 */
struct HouseholderFactor {
  DenseMatrix y;
  std::vector<double> tau;
  DenseMatrix r;
  std::vector<StackedBlock> structure;

  std::size_t rows() const noexcept { return y.rows(); }
  std::size_t cols() const noexcept { return y.cols(); }
  bool stacked() const noexcept { return structure.size() > 1; }
  RowRanges support(std::size_t j) const { return reflector_support(structure, j); }
};

struct Reflector {
  std::vector<double> v;
  double tau = 0.0;
  double beta = 0.0;
};

/// (I - tau v v^T) x = beta e_1 with beta = ||x|| >= 0 and v(0) = 1.
inline Reflector reflector(std::span<const double> x, OpCount& ops) {
  if (x.empty()) throw std::invalid_argument("reflector of an empty vector");
  const std::size_t k = x.size();
  Reflector h;
  h.v.assign(k, 0.0);
  h.v[0] = 1.0;
  const double alpha = x[0];
  double sigma = 0.0;
  for (std::size_t i = 1; i < k; ++i) sigma += x[i] * x[i];
  if (k > 1) {
    ops.flops += 2 * k - 3;
    ops.multiplies += k - 1;
  }
  if (sigma == 0.0) {
    if (alpha >= 0.0) {
      h.beta = alpha;
    } else {
      h.tau = 2.0;
      h.beta = -alpha;
    }
    return h;
  }
  const double mu = std::sqrt(alpha * alpha + sigma);
  double v1;
  if (alpha <= 0.0) {
    v1 = alpha - mu;
    ops.flops += 3;
  } else {
    v1 = -sigma / (alpha + mu);
    ops.flops += 3;
    ops.divisions += 1;
  }
  ops.multiplies += 1;
  h.tau = 2.0 * v1 * v1 / (sigma + v1 * v1);
  ops.flops += 4;
  ops.multiplies += 3;
  ops.divisions += 1;
  for (std::size_t i = 1; i < k; ++i) h.v[i] = x[i] / v1;
  ops.divisions += k - 1;
  h.beta = mu;
  return h;
}

inline Reflector reflector(std::span<const double> x) {
  OpCount ops;
  return reflector(x, ops);
}

namespace detail {

inline void validate_structure(const std::vector<StackedBlock>& s, std::size_t rows, std::size_t cols) {
  if (s.empty()) throw std::invalid_argument("empty stacking structure");
  std::size_t at = 0;
  for (const auto& b : s) {
    if (b.offset != at) throw std::invalid_argument("stacked blocks must be contiguous");
    at += b.rows;
  }
  if (at != rows) throw std::invalid_argument("stacked blocks do not cover the matrix");
  if (s.front().rows < cols) throw std::invalid_argument("top block has fewer rows than columns");
}

/// Apply rho_j (stored in y column j) to column c of m; both share the row space.
inline void apply_reflector(const DenseMatrix& y, std::size_t j, double tau, const RowRanges& sup,
                            DenseMatrix& m, std::size_t c, OpCount& ops) {
  if (tau == 0.0) return;
  double w = 0.0;
  for (const auto& rg : sup)
    for (std::size_t i = rg.begin; i < rg.end; ++i) w += y(i, j) * m(i, c);
  const double s = tau * w;
  for (const auto& rg : sup)
    for (std::size_t i = rg.begin; i < rg.end; ++i) m(i, c) -= s * y(i, j);
  const std::size_t k = total_rows(sup);
  ops.flops += 4 * k - 2;
  ops.multiplies += 2 * k - 1;
}

/// T for reflectors [first, last): rho_first ... rho_{last-1} = I + Y T Y^T.
inline DenseMatrix form_t(const DenseMatrix& y, std::span<const double> tau,
                          const std::vector<StackedBlock>& s, std::size_t first, std::size_t last,
                          OpCount& ops) {
  const std::size_t k = last - first;
  DenseMatrix t(k, k);
  std::vector<RowRanges> sup(k);
  for (std::size_t a = 0; a < k; ++a) sup[a] = reflector_support(s, first + a);
  std::vector<double> z(k);
  for (std::size_t jj = 0; jj < k; ++jj) {
    const std::size_t j = first + jj;
    t(jj, jj) = -tau[j];
    if (jj == 0 || tau[j] == 0.0) continue;
    for (std::size_t a = 0; a < jj; ++a) {
      RowRanges both = intersect(sup[a], sup[jj]);
      double d = 0.0;
      for (const auto& rg : both)
        for (std::size_t i = rg.begin; i < rg.end; ++i) d += y(i, first + a) * y(i, j);
      z[a] = d;
      std::size_t len = total_rows(both);
      if (len) {
        ops.flops += 2 * len - 1;
        ops.multiplies += len;
      }
    }
    // z := -tau_j * T(0:jj, 0:jj) * z, T upper triangular
    for (std::size_t a = 0; a < jj; ++a) {
      double acc = 0.0;
      for (std::size_t b = a; b < jj; ++b) acc += t(a, b) * z[b];
      t(a, jj) = -tau[j] * acc;
    }
    ops.flops += jj * (jj + 1) + jj;
    ops.multiplies += jj * (jj + 1) / 2 + jj;
  }
  return t;
}

/// m(:, c0:c1) := (I + Y op(T) Y^T) m(:, c0:c1), with op(T) = T^T if transpose.
inline void apply_block(const DenseMatrix& y, const std::vector<StackedBlock>& s, std::size_t first,
                        std::size_t last, const DenseMatrix& t, bool transpose, DenseMatrix& m,
                        std::size_t c0, std::size_t c1, OpCount& ops) {
  const std::size_t k = last - first;
  if (k == 0 || c1 <= c0) return;
  const std::size_t nc = c1 - c0;
  std::vector<RowRanges> sup(k);
  for (std::size_t a = 0; a < k; ++a) sup[a] = reflector_support(s, first + a);
  DenseMatrix w(k, nc);
  for (std::size_t c = 0; c < nc; ++c)
    for (std::size_t a = 0; a < k; ++a) {
      double d = 0.0;
      for (const auto& rg : sup[a])
        for (std::size_t i = rg.begin; i < rg.end; ++i) d += y(i, first + a) * m(i, c0 + c);
      w(a, c) = d;
      std::size_t len = total_rows(sup[a]);
      ops.flops += 2 * len - 2;
      ops.multiplies += len - 1;
    }
  DenseMatrix w2(k, nc);
  for (std::size_t c = 0; c < nc; ++c)
    for (std::size_t a = 0; a < k; ++a) {
      double acc = 0.0;
      if (transpose)
        for (std::size_t b = 0; b <= a; ++b) acc += t(b, a) * w(b, c);
      else
        for (std::size_t b = a; b < k; ++b) acc += t(a, b) * w(b, c);
      w2(a, c) = acc;
    }
  ops.flops += nc * k * k;
  ops.multiplies += nc * k * (k + 1) / 2;
  for (std::size_t c = 0; c < nc; ++c)
    for (std::size_t a = 0; a < k; ++a) {
      const double f = w2(a, c);
      for (const auto& rg : sup[a])
        for (std::size_t i = rg.begin; i < rg.end; ++i) m(i, c0 + c) += y(i, first + a) * f;
      std::size_t len = total_rows(sup[a]);
      ops.flops += 2 * len - 1;
      ops.multiplies += len - 1;
    }
}

struct FactorResult {
  HouseholderFactor factor;
  std::vector<DenseMatrix> t;
};

/// Column-by-column Householder QR of `work` in panels of width b (b >= cols: unblocked).
inline FactorResult factor(DenseMatrix work, std::vector<StackedBlock> s, std::size_t b, OpCount& ops) {
  const std::size_t m = work.rows(), n = work.cols();
  validate_structure(s, m, n);
  FactorResult out;
  HouseholderFactor& f = out.factor;
  f.y = DenseMatrix(m, n);
  f.tau.assign(n, 0.0);
  f.structure = std::move(s);
  const bool blocked = b < n;
  std::vector<double> x;
  for (std::size_t c0 = 0; c0 < n; c0 += b) {
    const std::size_t c1 = std::min(n, c0 + b);
    const std::size_t reach = blocked ? c1 : n;
    for (std::size_t j = c0; j < c1; ++j) {
      RowRanges sup = reflector_support(f.structure, j);
      x.clear();
      for (const auto& rg : sup)
        for (std::size_t i = rg.begin; i < rg.end; ++i) x.push_back(work(i, j));
      Reflector h = reflector(x, ops);
      std::size_t at = 0;
      for (const auto& rg : sup)
        for (std::size_t i = rg.begin; i < rg.end; ++i, ++at) {
          f.y(i, j) = h.v[at];
          work(i, j) = 0.0;
        }
      f.tau[j] = h.tau;
      work(sup.front().begin, j) = h.beta;
      for (std::size_t c = j + 1; c < reach; ++c) apply_reflector(f.y, j, h.tau, sup, work, c, ops);
    }
    if (blocked) {
      DenseMatrix t = form_t(f.y, f.tau, f.structure, c0, c1, ops);
      apply_block(f.y, f.structure, c0, c1, t, true, work, c1, n, ops);
      out.t.push_back(std::move(t));
    }
  }
  f.r = DenseMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i <= j; ++i) f.r(i, j) = work(i, j);
  return out;
}

inline void check_rows(const HouseholderFactor& f, const DenseMatrix& c) {
  if (c.rows() != f.rows()) throw std::invalid_argument("apply: row dimension mismatch");
}

}  // namespace detail

inline HouseholderFactor qr_unblocked(const DenseMatrix& a, OpCount& ops) {
  if (a.rows() < a.cols()) throw std::invalid_argument("qr: rows < cols");
  if (a.cols() == 0) throw std::invalid_argument("qr: no columns");
  return detail::factor(a, {{0, a.rows(), BlockKind::dense}}, a.cols(), ops).factor;
}

inline HouseholderFactor qr_unblocked(const DenseMatrix& a) {
  OpCount ops;
  return qr_unblocked(a, ops);
}

struct BlockedQr {
  HouseholderFactor factor;
  std::vector<DenseMatrix> t;  // one per panel
  std::size_t block = 1;
};

inline BlockedQr qr_blocked(const DenseMatrix& a, std::size_t b, OpCount& ops) {
  if (a.rows() < a.cols()) throw std::invalid_argument("qr: rows < cols");
  if (a.cols() == 0) throw std::invalid_argument("qr: no columns");
  if (b == 0 || b > a.cols()) throw std::invalid_argument("qr_blocked: need 1 <= b <= cols");
  const std::size_t n = a.cols();
  detail::FactorResult fr = detail::factor(a, {{0, a.rows(), BlockKind::dense}}, b < n ? b : n, ops);
  BlockedQr out{std::move(fr.factor), std::move(fr.t), b};
  if (out.t.empty()) out.t.push_back(detail::form_t(out.factor.y, out.factor.tau, out.factor.structure, 0, n, ops));
  return out;
}

inline BlockedQr qr_blocked(const DenseMatrix& a, std::size_t b) {
  OpCount ops;
  return qr_blocked(a, b, ops);
}

/// QR of a vertical stack whose blocks are dense or upper triangular; never touches structural zeros.
inline HouseholderFactor qr_stacked(const DenseMatrix& stacked, std::vector<StackedBlock> structure,
                                    OpCount& ops) {
  if (stacked.cols() == 0) throw std::invalid_argument("qr: no columns");
  detail::validate_structure(structure, stacked.rows(), stacked.cols());
  for (const auto& b : structure) {
    if (b.kind != BlockKind::triangular) continue;
    for (std::size_t j = 0; j < stacked.cols(); ++j)
      for (std::size_t i = j + 1; i < b.rows; ++i)
        if (stacked(b.offset + i, j) != 0.0)
          throw std::invalid_argument("qr_stacked: block is not upper triangular");
  }
  return detail::factor(stacked, std::move(structure), stacked.cols(), ops).factor;
}

inline HouseholderFactor qr_stacked_triangles(std::span<const DenseMatrix> rs, OpCount& ops) {
  if (rs.size() < 2) throw std::invalid_argument("qr_stacked_triangles: need at least two blocks");
  const std::size_t n = rs.front().cols();
  std::vector<StackedBlock> s;
  DenseMatrix stacked(n * rs.size(), n);
  for (std::size_t k = 0; k < rs.size(); ++k) {
    if (rs[k].rows() != n || rs[k].cols() != n)
      throw std::invalid_argument("qr_stacked_triangles: blocks must be n x n");
    stacked.set_block(k * n, 0, rs[k]);
    s.push_back({k * n, n, BlockKind::triangular});
  }
  return qr_stacked(stacked, std::move(s), ops);
}

inline HouseholderFactor qr_stacked_triangles(std::span<const DenseMatrix> rs) {
  OpCount ops;
  return qr_stacked_triangles(rs, ops);
}

/// Q^T C, one reflector at a time.
inline DenseMatrix apply_qt(const HouseholderFactor& f, DenseMatrix c, OpCount& ops) {
  detail::check_rows(f, c);
  for (std::size_t j = 0; j < f.cols(); ++j) {
    if (f.tau[j] == 0.0) continue;
    RowRanges sup = f.support(j);
    for (std::size_t k = 0; k < c.cols(); ++k) detail::apply_reflector(f.y, j, f.tau[j], sup, c, k, ops);
  }
  return c;
}

inline DenseMatrix apply_q(const HouseholderFactor& f, DenseMatrix c, OpCount& ops) {
  detail::check_rows(f, c);
  for (std::size_t j = f.cols(); j-- > 0;) {
    if (f.tau[j] == 0.0) continue;
    RowRanges sup = f.support(j);
    for (std::size_t k = 0; k < c.cols(); ++k) detail::apply_reflector(f.y, j, f.tau[j], sup, c, k, ops);
  }
  return c;
}

inline DenseMatrix apply_qt(const HouseholderFactor& f, DenseMatrix c) {
  OpCount ops;
  return apply_qt(f, std::move(c), ops);
}

inline DenseMatrix apply_q(const HouseholderFactor& f, DenseMatrix c) {
  OpCount ops;
  return apply_q(f, std::move(c), ops);
}

/// T of the compact form Q = I + Y T Y^T, T upper triangular with T(j,j) = -tau_j.
inline DenseMatrix form_t(const HouseholderFactor& f, OpCount& ops) {
  return detail::form_t(f.y, f.tau, f.structure, 0, f.cols(), ops);
}

inline DenseMatrix form_t(const HouseholderFactor& f) {
  OpCount ops;
  return form_t(f, ops);
}

/// Q^T C through the compact form, with T built from (Y, tau) first.
inline DenseMatrix apply_qt_wy(const HouseholderFactor& f, DenseMatrix c, OpCount& ops) {
  detail::check_rows(f, c);
  DenseMatrix t = form_t(f, ops);
  detail::apply_block(f.y, f.structure, 0, f.cols(), t, true, c, 0, c.cols(), ops);
  return c;
}

inline DenseMatrix apply_q_wy(const HouseholderFactor& f, DenseMatrix c, OpCount& ops) {
  detail::check_rows(f, c);
  DenseMatrix t = form_t(f, ops);
  detail::apply_block(f.y, f.structure, 0, f.cols(), t, false, c, 0, c.cols(), ops);
  return c;
}

/// Thin explicit Q (rows x cols).
inline DenseMatrix explicit_q(const HouseholderFactor& f) {
  return apply_q(f, DenseMatrix::identity(f.rows(), f.cols()));
}

}  // namespace caqr
