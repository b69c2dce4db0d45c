// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>

#include "torsiongeo/simd/kernels.hpp"

namespace torsiongeo::simd::scalar {

namespace {
constexpr std::size_t kBlockK = 128;
constexpr std::size_t kBlockN = 256;
}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(const double* A, const double* x, double* y, std::size_t m, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) y[i] = dot(A + i * n, x, n);
}

void gemm(const double* A, const double* B, double* C, std::size_t m, std::size_t k, std::size_t n) {
  std::fill(C, C + m * n, 0.0);
  for (std::size_t p0 = 0; p0 < k; p0 += kBlockK) {
    const std::size_t p1 = std::min(k, p0 + kBlockK);
    for (std::size_t j0 = 0; j0 < n; j0 += kBlockN) {
      const std::size_t j1 = std::min(n, j0 + kBlockN);
      for (std::size_t i = 0; i < m; ++i) {
        double* c = C + i * n;
        for (std::size_t p = p0; p < p1; ++p) {
          const double a = A[i * k + p];
          const double* b = B + p * n;
          for (std::size_t j = j0; j < j1; ++j) c[j] += a * b[j];
        }
      }
    }
  }
}

}  // namespace torsiongeo::simd::scalar
