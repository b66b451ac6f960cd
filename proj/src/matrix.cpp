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

#include "ifaa/matrix.hpp"

#include <cmath>
#include <string>

#include "ifaa/error.hpp"
#include "ifaa/kernels.hpp"

namespace ifaa {

std::vector<double> solve_spd(Matrix a, std::vector<double> b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) throw Error("solve_spd: shape mismatch");

  // In-place lower Cholesky.
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j) - kern::sumsq(a.row(j), j);
    if (!(d > 0.0)) throw Error("solve_spd: matrix not positive definite");
    d = std::sqrt(d);
    a(j, j) = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      a(i, j) = (a(i, j) - kern::dot(a.row(i), a.row(j), j)) / d;
    }
  }
  // Forward then backward substitution.
  for (std::size_t i = 0; i < n; ++i) {
    b[i] = (b[i] - kern::dot(a.row(i), b.data(), i)) / a(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= a(k, ii) * b[k];
    b[ii] = s / a(ii, ii);
  }
  return b;
}

Matrix psd_cholesky(const Matrix& a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw Error("psd_cholesky: matrix not square");

  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::fabs(a(i, i)));
  const double tol = 1e-10 * std::max(scale, 1.0);

  Matrix l(n, n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j) - kern::sumsq(l.row(j), j);
    if (d < -tol)
      throw Error("psd_cholesky: matrix not positive semidefinite (pivot " +
                  std::to_string(d) + ")");
    if (d <= tol) {
      // Degenerate direction: leave the column at zero.
      continue;
    }
    d = std::sqrt(d);
    l(j, j) = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      l(i, j) = (a(i, j) - kern::dot(l.row(i), l.row(j), j)) / d;
    }
  }
  return l;
}

}  // namespace ifaa
