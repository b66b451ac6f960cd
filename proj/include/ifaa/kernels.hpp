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

#ifndef IFAA_KERNELS_HPP
#define IFAA_KERNELS_HPP

#include <cstddef>
#include <string>

// Dense vector primitives behind the regression engine and the simulators.
// A scalar reference implementation always exists; on x86-64 an AVX2+FMA
// variant and on aarch64 a NEON variant are compiled in and selected at
// runtime. The IFAA_KERNELS environment variable ("scalar", "avx2", "neon",
// "auto") overrides detection. SIMD variants reassociate the reductions, so
// they agree with the scalar kernels to rounding error, not bitwise; the
// equivalence tests pin the tolerance.

namespace ifaa::kern {

enum class Backend { scalar, avx2, neon };

Backend active_backend();
const char* backend_name(Backend b);
bool backend_available(Backend b);
// Test hook; throws if the backend is not available on this machine.
void force_backend(Backend b);

double dot(const double* a, const double* b, std::size_t n);
double sum(const double* x, std::size_t n);
double sumsq(const double* x, std::size_t n);
// y += a * x
void axpy(double a, const double* x, double* y, std::size_t n);
// x *= a
void scale(double a, double* x, std::size_t n);

namespace detail {

// Reference kernels, callable directly by the equivalence tests.
double dot_scalar(const double* a, const double* b, std::size_t n);
double sum_scalar(const double* x, std::size_t n);
double sumsq_scalar(const double* x, std::size_t n);
void axpy_scalar(double a, const double* x, double* y, std::size_t n);
void scale_scalar(double a, double* x, std::size_t n);

#if defined(__x86_64__) || defined(_M_X64)
double dot_avx2(const double* a, const double* b, std::size_t n);
double sum_avx2(const double* x, std::size_t n);
double sumsq_avx2(const double* x, std::size_t n);
void axpy_avx2(double a, const double* x, double* y, std::size_t n);
void scale_avx2(double a, double* x, std::size_t n);
#endif

#if defined(__aarch64__)
double dot_neon(const double* a, const double* b, std::size_t n);
double sum_neon(const double* x, std::size_t n);
double sumsq_neon(const double* x, std::size_t n);
void axpy_neon(double a, const double* x, double* y, std::size_t n);
void scale_neon(double a, double* x, std::size_t n);
#endif

}  // namespace detail

}  // namespace ifaa::kern

#endif  // IFAA_KERNELS_HPP
