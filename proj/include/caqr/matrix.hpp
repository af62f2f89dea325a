#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace caqr {

/// Column-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t rows, std::size_t cols) {
    DenseMatrix a(rows, cols);
    for (std::size_t j = 0; j < std::min(rows, cols); ++j) a(j, j) = 1.0;
    return a;
  }
  static DenseMatrix identity(std::size_t n) { return identity(n, n); }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i + j * rows_]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i + j * rows_]; }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }

  std::span<double> col(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
  std::span<const double> col(std::size_t j) const { return {data_.data() + j * rows_, rows_}; }

  DenseMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) throw std::out_of_range("block outside matrix");
    DenseMatrix b(nr, nc);
    for (std::size_t j = 0; j < nc; ++j)
      std::copy_n(data_.data() + r0 + (c0 + j) * rows_, nr, b.data() + j * nr);
    return b;
  }

  void set_block(std::size_t r0, std::size_t c0, const DenseMatrix& b) {
    if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_)
      throw std::out_of_range("block outside matrix");
    for (std::size_t j = 0; j < b.cols(); ++j)
      std::copy_n(b.data() + j * b.rows(), b.rows(), data_.data() + r0 + (c0 + j) * rows_);
  }

  /// Gather the listed rows (in order) over all columns.
  DenseMatrix gather_rows(std::span<const std::size_t> idx) const {
    DenseMatrix b(idx.size(), cols_);
    for (std::size_t j = 0; j < cols_; ++j)
      for (std::size_t k = 0; k < idx.size(); ++k) b(k, j) = (*this)(idx[k], j);
    return b;
  }

  void scatter_rows(std::span<const std::size_t> idx, const DenseMatrix& b) {
    if (b.rows() != idx.size() || b.cols() != cols_)
      throw std::invalid_argument("scatter_rows: shape mismatch");
    for (std::size_t j = 0; j < cols_; ++j)
      for (std::size_t k = 0; k < idx.size(); ++k) (*this)(idx[k], j) = b(k, j);
  }

  DenseMatrix transpose() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t j = 0; j < cols_; ++j)
      for (std::size_t i = 0; i < rows_; ++i) t(j, i) = (*this)(i, j);
    return t;
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
  }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct ProblemShape {
  std::size_t m = 1;
  std::size_t n = 1;

  void validate() const {
    if (m == 0 || n == 0) throw std::invalid_argument("problem shape needs m, n >= 1");
  }
};

inline double fro_norm(const DenseMatrix& a) {
  // scaled sum of squares, as in LAPACK's dlassq
  double scale = 0.0, ssq = 1.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    double x = std::abs(a.data()[k]);
    if (x == 0.0) continue;
    if (scale < x) {
      ssq = 1.0 + ssq * (scale / x) * (scale / x);
      scale = x;
    } else {
      ssq += (x / scale) * (x / scale);
    }
  }
  return scale * std::sqrt(ssq);
}

inline double max_abs(const DenseMatrix& a) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a.data()[k]));
  return m;
}

inline DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("multiply: inner dimension mismatch");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      double bkj = b(k, j);
      if (bkj == 0.0) continue;
      for (std::size_t i = 0; i < a.rows(); ++i) c(i, j) += a(i, k) * bkj;
    }
  return c;
}

/// A^T B without forming the transpose.
inline DenseMatrix multiply_tn(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("multiply_tn: row mismatch");
  DenseMatrix c(a.cols(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j)
    for (std::size_t i = 0; i < a.cols(); ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.rows(); ++k) s += a(k, i) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

inline DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("subtract: shape mismatch");
  DenseMatrix c = a;
  for (std::size_t k = 0; k < c.size(); ++k) c.data()[k] -= b.data()[k];
  return c;
}

/// Copy of the upper triangle (rows 0..min(m,n)-1); everything below is zero.
inline DenseMatrix upper_triangle(const DenseMatrix& a) {
  std::size_t k = std::min(a.rows(), a.cols());
  DenseMatrix r(k, a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i <= std::min(j, k - 1); ++i) r(i, j) = a(i, j);
  return r;
}

inline bool is_upper_triangular(const DenseMatrix& a) {
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = j + 1; i < a.rows(); ++i)
      if (a(i, j) != 0.0) return false;
  return true;
}

/// ||Q^T Q - I||_F
inline double orthogonality_error(const DenseMatrix& q) {
  DenseMatrix g = multiply_tn(q, q);
  for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) -= 1.0;
  return fro_norm(g);
}

/// ||A - Q R||_F
inline double residual(const DenseMatrix& a, const DenseMatrix& q, const DenseMatrix& r) {
  return fro_norm(subtract(a, multiply(q, r)));
}

inline constexpr double machine_epsilon = std::numeric_limits<double>::epsilon();

}  // namespace caqr
