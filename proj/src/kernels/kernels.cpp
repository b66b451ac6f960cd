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

#include "ifaa/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "ifaa/error.hpp"

namespace ifaa::kern {

namespace {

struct Vtable {
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  double (*sumsq)(const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scale)(double, double*, std::size_t);
};

constexpr Vtable kScalarVtable = {
    detail::dot_scalar, detail::sum_scalar, detail::sumsq_scalar,
    detail::axpy_scalar, detail::scale_scalar};

#if defined(__x86_64__) || defined(_M_X64)
constexpr Vtable kAvx2Vtable = {detail::dot_avx2, detail::sum_avx2,
                                detail::sumsq_avx2, detail::axpy_avx2,
                                detail::scale_avx2};
#endif
#if defined(__aarch64__)
constexpr Vtable kNeonVtable = {detail::dot_neon, detail::sum_neon,
                                detail::sumsq_neon, detail::axpy_neon,
                                detail::scale_neon};
#endif

bool simd_supported(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::neon:
#if defined(__aarch64__)
      return true;  // NEON is baseline on aarch64
#else
      return false;
#endif
  }
  return false;
}

const Vtable* vtable_for(Backend b) {
  switch (b) {
    case Backend::scalar:
      return &kScalarVtable;
#if defined(__x86_64__) || defined(_M_X64)
    case Backend::avx2:
      return &kAvx2Vtable;
#endif
#if defined(__aarch64__)
    case Backend::neon:
      return &kNeonVtable;
#endif
    default:
      return &kScalarVtable;
  }
}

Backend detect_backend() {
  if (const char* env = std::getenv("IFAA_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
    if (std::strcmp(env, "avx2") == 0 && simd_supported(Backend::avx2))
      return Backend::avx2;
    if (std::strcmp(env, "neon") == 0 && simd_supported(Backend::neon))
      return Backend::neon;
    // "auto" or anything unrecognized falls through to detection
  }
  if (simd_supported(Backend::avx2)) return Backend::avx2;
  if (simd_supported(Backend::neon)) return Backend::neon;
  return Backend::scalar;
}

struct Dispatch {
  Backend backend;
  const Vtable* vt;
  Dispatch() : backend(detect_backend()), vt(vtable_for(backend)) {}
};

Dispatch& dispatch() {
  static Dispatch d;
  return d;
}

}  // namespace

Backend active_backend() { return dispatch().backend; }

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
  }
  return "?";
}

bool backend_available(Backend b) { return simd_supported(b); }

void force_backend(Backend b) {
  if (!simd_supported(b))
    throw Error(std::string("kernel backend not available on this machine: ") +
                backend_name(b));
  dispatch().backend = b;
  dispatch().vt = vtable_for(b);
}

double dot(const double* a, const double* b, std::size_t n) {
  return dispatch().vt->dot(a, b, n);
}
double sum(const double* x, std::size_t n) { return dispatch().vt->sum(x, n); }
double sumsq(const double* x, std::size_t n) {
  return dispatch().vt->sumsq(x, n);
}
void axpy(double a, const double* x, double* y, std::size_t n) {
  dispatch().vt->axpy(a, x, y, n);
}
void scale(double a, double* x, std::size_t n) {
  dispatch().vt->scale(a, x, n);
}

}  // namespace ifaa::kern
