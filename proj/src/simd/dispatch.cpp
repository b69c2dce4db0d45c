// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <string>

#include "torsiongeo/simd/kernels.hpp"

namespace torsiongeo::simd {

namespace {

struct KernelTable {
  Isa isa;
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*gemv)(const double*, const double*, double*, std::size_t, std::size_t);
  void (*gemm)(const double*, const double*, double*, std::size_t, std::size_t, std::size_t);
};

constexpr KernelTable kScalar{Isa::scalar, scalar::dot, scalar::axpy, scalar::gemv, scalar::gemm};
#if defined(TORSIONGEO_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::avx2, avx2::dot, avx2::axpy, avx2::gemv, avx2::gemm};
#endif

const KernelTable& select() {
  const char* env = std::getenv("TORSIONGEO_SIMD");
  const std::string request = env ? env : "";
  if (request == "scalar") return kScalar;
#if defined(TORSIONGEO_HAVE_AVX2)
  if (avx2_available()) return kAvx2;
#endif
  return kScalar;
}

const KernelTable& table() {
  static const KernelTable& t = select();
  return t;
}

}  // namespace

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool avx2_available() {
#if defined(TORSIONGEO_HAVE_AVX2)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa active_isa() { return table().isa; }

double dot(const double* a, const double* b, std::size_t n) { return table().dot(a, b, n); }

void axpy(double alpha, const double* x, double* y, std::size_t n) { table().axpy(alpha, x, y, n); }

void gemv(const double* A, const double* x, double* y, std::size_t m, std::size_t n) {
  table().gemv(A, x, y, m, n);
}

void gemm(const double* A, const double* B, double* C, std::size_t m, std::size_t k, std::size_t n) {
  table().gemm(A, B, C, m, k, n);
}

}  // namespace torsiongeo::simd
