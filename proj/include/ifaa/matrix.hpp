// Copyright 2026 The ifaa authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IFAA_MATRIX_HPP
#define IFAA_MATRIX_HPP

#include <cstddef>
#include <vector>

namespace ifaa {

// Dense row-major matrix of doubles. Deliberately minimal: the regressions
// in this project are tall and narrow, so everything heavier goes through
// the kernels and the two factorizations below.
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  std::vector<double> column(std::size_t j) const {
    std::vector<double> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = data_[i * cols_ + j];
    return out;
  }

  bool operator==(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ &&
           data_ == other.data_;
  }

 private:
  std::size_t rows_, cols_;
  std::vector<double> data_;
};

// Solves A x = b for symmetric positive-definite A by Cholesky, in place.
// Throws ifaa::Error when A is not positive definite.
std::vector<double> solve_spd(Matrix a, std::vector<double> b);

// Lower-triangular factor L with L L^T = A for a positive SEMIdefinite A.
// Zero pivots (up to a relative tolerance) are allowed and produce zero
// columns, which is what degenerate normal draws need; a pivot below
// -tolerance throws.
Matrix psd_cholesky(const Matrix& a);

}  // namespace ifaa

#endif  // IFAA_MATRIX_HPP
