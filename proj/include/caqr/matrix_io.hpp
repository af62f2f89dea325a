#pragma once

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "caqr/matrix.hpp"

namespace caqr {

// Text format: "m n" on the first line, then m lines of n reals.

inline void write_matrix(std::ostream& os, const DenseMatrix& a) {
  os << a.rows() << ' ' << a.cols() << '\n';
  os << std::setprecision(17);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (j) os << ' ';
      os << a(i, j);
    }
    os << '\n';
  }
}

inline DenseMatrix read_matrix(std::istream& is) {
  long long m = 0, n = 0;
  if (!(is >> m >> n) || m < 1 || n < 1) throw std::runtime_error("matrix file: bad header");
  DenseMatrix a(static_cast<std::size_t>(m), static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (!(is >> a(i, j)))
        throw std::runtime_error("matrix file: expected " + std::to_string(m * n) + " values");
  if (!a.all_finite()) throw std::runtime_error("matrix file: non-finite entry");
  return a;
}

inline DenseMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_matrix(in);
}

inline void write_matrix_file(const std::string& path, const DenseMatrix& a) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_matrix(out, a);
}

}  // namespace caqr
