// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

// Dense double-precision kernels used by the transfer-matrix code. Every
// kernel has a portable scalar reference and, on x86-64 builds, an AVX2+FMA
// variant. The variant is chosen once at first use from the CPU feature bits;
// TORSIONGEO_SIMD=scalar|avx2 overrides the choice.
//
// All matrices are row-major and densely packed.

#pragma once

#include <cstddef>
#include <string_view>

namespace torsiongeo::simd {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

// True when the AVX2 kernels were compiled in and the CPU supports them.
bool avx2_available();

// The instruction set the dispatched kernels below resolve to.
Isa active_isa();

double dot(const double* a, const double* b, std::size_t n);
// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);
// y = A x, A is m x n
void gemv(const double* A, const double* x, double* y, std::size_t m, std::size_t n);
// C = A B, A is m x k, B is k x n, C is m x n (C must not alias A or B)
void gemm(const double* A, const double* B, double* C, std::size_t m, std::size_t k, std::size_t n);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void gemv(const double* A, const double* x, double* y, std::size_t m, std::size_t n);
void gemm(const double* A, const double* B, double* C, std::size_t m, std::size_t k, std::size_t n);
}  // namespace scalar

#if defined(TORSIONGEO_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void gemv(const double* A, const double* x, double* y, std::size_t m, std::size_t n);
void gemm(const double* A, const double* B, double* C, std::size_t m, std::size_t k, std::size_t n);
}  // namespace avx2
#endif

}  // namespace torsiongeo::simd
