// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "torsiongeo/error.hpp"
#include "torsiongeo/spectrum.hpp"

using namespace torsiongeo;

namespace {

struct Series {
  std::vector<double> tau;
  std::vector<double> values;
};

Series synthetic(const std::vector<double>& energies, const std::vector<double>& amps, double t0, double t1,
                 int n) {
  Series s;
  for (int k = 0; k < n; ++k) {
    const double t = t0 + (t1 - t0) * k / (n - 1);
    double v = 0.0;
    for (std::size_t l = 0; l < energies.size(); ++l) v += amps[l] * std::exp(-energies[l] * t);
    s.tau.push_back(t);
    s.values.push_back(v);
  }
  return s;
}

}  // namespace

TEST(Nnls, MatchesUnconstrainedSolutionWhenPositive) {
  Matrix a(4, 2);
  a << 1, 0, 0, 1, 1, 1, 2, 1;
  const Vector x_true = (Vector(2) << 0.5, 2.0).finished();
  const Vector x = nnls(a, a * x_true);
  EXPECT_LT((x - x_true).norm(), 1e-12);
}

TEST(Nnls, ClampsNegativeComponents) {
  Matrix a = Matrix::Identity(3, 3);
  const Vector b = (Vector(3) << 1.0, -2.0, 3.0).finished();
  const Vector x = nnls(a, b);
  EXPECT_DOUBLE_EQ(x[0], 1.0);
  EXPECT_DOUBLE_EQ(x[1], 0.0);
  EXPECT_DOUBLE_EQ(x[2], 3.0);
}

TEST(Spectrum, RecoversSingleLevel) {
  const auto s = synthetic({0.7}, {2.0}, 0.5, 4.0, 40);
  const SpectrumFit fit = extract_spectrum(s.tau, s.values);
  ASSERT_EQ(fit.levels.size(), 1u);
  EXPECT_NEAR(fit.levels[0].energy, 0.7, 1e-9);
  EXPECT_NEAR(fit.levels[0].amplitude, 2.0, 1e-8);
}

TEST(Spectrum, RecoversDegenerateLadder) {
  // Circle-like ladder with doubly degenerate excited levels.
  const auto s = synthetic({0.0, 0.5, 2.0, 4.5}, {1.0, 2.0, 2.0, 2.0}, 1.0, 4.0, 49);
  const SpectrumFit fit = extract_spectrum(s.tau, s.values);
  ASSERT_GE(fit.levels.size(), 3u);
  EXPECT_NEAR(fit.levels[0].energy, 0.0, 1e-6);
  EXPECT_NEAR(fit.levels[1].energy, 0.5, 1e-6);
  EXPECT_NEAR(fit.levels[2].energy, 2.0, 1e-4);
  EXPECT_NEAR(fit.levels[1].amplitude, 2.0, 1e-5);
  EXPECT_LT(fit.residual, 1e-8);
}

TEST(Spectrum, ToleratesSmallNoise) {
  auto s = synthetic({0.3, 1.4}, {1.0, 0.5}, 0.5, 6.0, 60);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1e-7);
  for (double& v : s.values) v *= 1.0 + n(rng);
  const SpectrumFit fit = extract_spectrum(s.tau, s.values);
  ASSERT_GE(fit.levels.size(), 2u);
  EXPECT_NEAR(fit.levels[0].energy, 0.3, 1e-5);
  EXPECT_NEAR(fit.levels[1].energy, 1.4, 1e-3);
}

TEST(Spectrum, WindowSelectsSamples) {
  const auto s = synthetic({0.2, 6.0}, {1.0, 1.0}, 0.1, 5.0, 50);
  FitOptions o;
  o.tau_min = 2.0;
  o.max_levels = 1;
  const SpectrumFit fit = extract_spectrum(s.tau, s.values, o);
  EXPECT_LT(fit.samples, 50);
  ASSERT_EQ(fit.levels.size(), 1u);
  EXPECT_NEAR(fit.levels[0].energy, 0.2, 1e-4);
}

TEST(Spectrum, UnderdeterminedFitsAreRejected) {
  // Four samples cannot fix two levels and two amplitudes robustly.
  const std::vector<double> tau{0.5, 1.0, 2.0, 4.0};
  std::vector<double> v;
  for (double t : tau) v.push_back(std::exp(-0.5 * t) + std::exp(-2.0 * t));
  try {
    extract_spectrum(tau, v);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IllConditionedFit);
  }
  const std::vector<double> narrow{1.0, 1.1, 1.2, 1.3, 1.4};
  EXPECT_THROW(extract_spectrum(narrow, std::vector<double>(5, 1.0)), Error);
}

TEST(Spectrum, RejectsInvalidInput) {
  EXPECT_THROW(extract_spectrum({1.0, 2.0}, {1.0}), Error);
  const auto s = synthetic({0.5}, {1.0}, 0.5, 4.0, 20);
  auto bad = s.values;
  bad[3] = std::nan("");
  EXPECT_THROW(extract_spectrum(s.tau, bad), Error);
}
