#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "core/errors.hpp"

namespace hiermc {

// Dense row-major matrix. Everything in this codebase is tiny (K x S with K <= 3,
// S = number of sites), so there is no point in anything cleverer.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

  // Row-major initializer: Matrix(2, 3, {a,b,c, d,e,f}).
  Matrix(std::size_t rows, std::size_t cols, std::initializer_list<double> vals)
      : rows_(rows), cols_(cols), a_(vals) {
    if (a_.size() != rows * cols) throw ShapeError("Matrix: initializer size mismatch");
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return a_.size(); }

  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  double* data() { return a_.data(); }
  const double* data() const { return a_.data(); }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

}  // namespace hiermc
