// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "torsiongeo/simd/kernels.hpp"

namespace simd = torsiongeo::simd;

namespace {

std::vector<double> random_vector(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

double max_rel(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]) / (1.0 + std::abs(a[i])));
  return worst;
}

// Odd sizes exercise the remainder loops after the vector body.
const std::size_t kSizes[] = {1, 3, 4, 7, 16, 33, 130};

}  // namespace

TEST(Simd, ScalarReferenceIsCorrect) {
  const double a[] = {1, 2, 3};
  const double b[] = {4, 5, 6};
  EXPECT_DOUBLE_EQ(simd::scalar::dot(a, b, 3), 32.0);
  const double m[] = {1, 2, 3, 4};  // 2 x 2
  double c[4];
  simd::scalar::gemm(m, m, c, 2, 2, 2);
  EXPECT_DOUBLE_EQ(c[0], 7.0);
  EXPECT_DOUBLE_EQ(c[1], 10.0);
  EXPECT_DOUBLE_EQ(c[2], 15.0);
  EXPECT_DOUBLE_EQ(c[3], 22.0);
}

TEST(Simd, DispatchReportsAnIsa) {
  const auto isa = simd::active_isa();
  EXPECT_TRUE(isa == simd::Isa::scalar || simd::avx2_available());
  EXPECT_FALSE(simd::isa_name(isa).empty());
}

#if defined(TORSIONGEO_HAVE_AVX2)

class SimdEquivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!simd::avx2_available()) GTEST_SKIP() << "CPU lacks AVX2/FMA";
  }
};

TEST_F(SimdEquivalence, Dot) {
  for (std::size_t n : kSizes) {
    const auto a = random_vector(n, 1), b = random_vector(n, 2);
    EXPECT_NEAR(simd::avx2::dot(a.data(), b.data(), n), simd::scalar::dot(a.data(), b.data(), n), 1e-13) << n;
  }
}

TEST_F(SimdEquivalence, Axpy) {
  for (std::size_t n : kSizes) {
    const auto x = random_vector(n, 3);
    auto y1 = random_vector(n, 4), y2 = y1;
    simd::scalar::axpy(0.37, x.data(), y1.data(), n);
    simd::avx2::axpy(0.37, x.data(), y2.data(), n);
    EXPECT_LT(max_rel(y1, y2), 1e-15) << n;
  }
}

TEST_F(SimdEquivalence, Gemv) {
  for (std::size_t m : kSizes) {
    for (std::size_t n : kSizes) {
      const auto a = random_vector(m * n, 5), x = random_vector(n, 6);
      std::vector<double> y1(m), y2(m);
      simd::scalar::gemv(a.data(), x.data(), y1.data(), m, n);
      simd::avx2::gemv(a.data(), x.data(), y2.data(), m, n);
      EXPECT_LT(max_rel(y1, y2), 1e-13) << m << "x" << n;
    }
  }
}

TEST_F(SimdEquivalence, Gemm) {
  for (std::size_t m : {1, 5, 17, 64}) {
    for (std::size_t k : {1, 3, 32, 67}) {
      for (std::size_t n : {1, 6, 9, 40}) {
        const auto a = random_vector(m * k, 7), b = random_vector(k * n, 8);
        std::vector<double> c1(m * n), c2(m * n);
        simd::scalar::gemm(a.data(), b.data(), c1.data(), m, k, n);
        simd::avx2::gemm(a.data(), b.data(), c2.data(), m, k, n);
        EXPECT_LT(max_rel(c1, c2), 1e-13) << m << "x" << k << "x" << n;
      }
    }
  }
}

#endif
