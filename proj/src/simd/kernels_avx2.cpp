// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

#include <immintrin.h>

#include <algorithm>

#include "torsiongeo/simd/kernels.hpp"

namespace torsiongeo::simd::avx2 {

namespace {

constexpr std::size_t kBlockK = 128;
constexpr std::size_t kBlockN = 256;

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
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
        std::size_t p = p0;
        // Two rows of B per pass halves the loads and stores of C.
        for (; p + 2 <= p1; p += 2) {
          const __m256d a0 = _mm256_set1_pd(A[i * k + p]);
          const __m256d a1 = _mm256_set1_pd(A[i * k + p + 1]);
          const double* b0 = B + p * n;
          const double* b1 = b0 + n;
          std::size_t j = j0;
          for (; j + 4 <= j1; j += 4) {
            __m256d cv = _mm256_loadu_pd(c + j);
            cv = _mm256_fmadd_pd(a0, _mm256_loadu_pd(b0 + j), cv);
            cv = _mm256_fmadd_pd(a1, _mm256_loadu_pd(b1 + j), cv);
            _mm256_storeu_pd(c + j, cv);
          }
          for (; j < j1; ++j) c[j] += A[i * k + p] * b0[j] + A[i * k + p + 1] * b1[j];
        }
        for (; p < p1; ++p) {
          const double a = A[i * k + p];
          const __m256d av = _mm256_set1_pd(a);
          const double* b = B + p * n;
          std::size_t j = j0;
          for (; j + 4 <= j1; j += 4) {
            _mm256_storeu_pd(c + j, _mm256_fmadd_pd(av, _mm256_loadu_pd(b + j), _mm256_loadu_pd(c + j)));
          }
          for (; j < j1; ++j) c[j] += a * b[j];
        }
      }
    }
  }
}

}  // namespace torsiongeo::simd::avx2
