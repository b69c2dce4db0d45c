// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "torsiongeo/catalog.hpp"
#include "torsiongeo/error.hpp"
#include "torsiongeo/propagator.hpp"

using namespace torsiongeo;

namespace {

SliceConfig slices(int n, double eps) {
  SliceConfig c;
  c.slices = n;
  c.eps = eps;
  return c;
}

// Small sphere run shared by several tests.
PropagatorResult sphere_run(Measure measure, bool veff, bool fit = true) {
  const GeometryBundle b(sphere(1.0));
  SliceConfig c = slices(100, 0.04);
  c.measure = measure;
  c.effective_potential = veff;
  PropagateOptions o;
  o.grid.azimuthal_points = 256;
  o.grid.sectors = 3;
  o.fit_spectrum = fit;
  o.fit.tau_min = 1.0;
  o.fit.tau_max = 4.0;
  return propagate(b, c, o);
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::ValidationError;
}

}  // namespace

TEST(Propagator, GridKindSelection) {
  EXPECT_EQ(grid_kind_for(GeometryBundle(flat_cartesian(1))), GridKind::line);
  EXPECT_EQ(grid_kind_for(GeometryBundle(circle(1.0))), GridKind::circle);
  EXPECT_EQ(grid_kind_for(GeometryBundle(sphere(2.0))), GridKind::sphere);
  EXPECT_EQ(kind_of([] { grid_kind_for(GeometryBundle(polar())); }), ErrorKind::Unsupported);
  EXPECT_EQ(kind_of([] { grid_kind_for(GeometryBundle(flat_cartesian(2))); }), ErrorKind::Unsupported);
}

TEST(Propagator, LineReproducesTheFreeKernel) {
  const GeometryBundle b(flat_cartesian(1));
  const SliceConfig c = slices(64, 1.0 / 64);
  PropagateOptions o;
  o.amplitude_steps = {16, 64};
  const PropagatorResult r = propagate(b, c, o);
  ASSERT_EQ(r.sectors.size(), 1u);
  ASSERT_EQ(r.sectors[0].amplitude.size(), 2u);
  const int n = static_cast<int>(r.grid.size());
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x = r.grid[i][0], y = r.grid[j][0];
      if (std::abs(x) > 1.0 || std::abs(y) > 1.0) continue;
      worst = std::max(worst, std::abs(r.sectors[0].amplitude[1](i, j) / gaussian_kernel(x - y, 1.0, c.particle) - 1.0));
    }
  }
  EXPECT_LT(worst, 1e-10);
}

TEST(Propagator, LineKernelIsNormalised) {
  const GeometryBundle b(flat_cartesian(1));
  PropagateOptions o;
  o.amplitude_steps = {8, 32};
  const PropagatorResult r = propagate(b, slices(32, 1.0 / 32), o);
  const int n = static_cast<int>(r.grid.size());
  // By tau = 1 the absorbing ends at +-5 have removed about erfc(5 / sqrt 2).
  const int mid = n / 2;
  EXPECT_NEAR(r.sectors[0].amplitude[0].row(mid).dot(r.weights), 1.0, 1e-10);
  EXPECT_NEAR(r.sectors[0].amplitude[1].row(mid).dot(r.weights), 1.0, 2e-6);
}

TEST(Propagator, AmplitudesCompose) {
  // K(2 tau) = integral K(tau) K(tau) with the stored quadrature weights.
  const GeometryBundle b(circle(1.0));
  PropagateOptions o;
  o.amplitude_steps = {16, 32};
  o.fit_spectrum = false;
  const PropagatorResult r = propagate(b, slices(32, 1.0 / 16), o);
  const Matrix& k1 = r.sectors[0].amplitude[0];
  const Matrix& k2 = r.sectors[0].amplitude[1];
  const Matrix composed = k1 * r.weights.asDiagonal() * k1;
  EXPECT_LT((composed - k2).cwiseAbs().maxCoeff() / k2.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Propagator, CircleSpectrumConvergesWithSlicing) {
  const GeometryBundle b(circle(1.0));
  PropagateOptions o;
  o.fit.tau_min = 1.0;
  o.fit.tau_max = 4.0;
  double prev = 1.0;
  for (int n : {32, 64}) {
    const PropagatorResult r = propagate(b, slices(n, 4.0 / n), o);
    ASSERT_GE(r.levels.size(), 3u);
    const double err = std::abs(r.levels[1].energy - r.levels[0].energy - 0.5);
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(Propagator, TraceMatchesEigenvalues) {
  const GeometryBundle b(circle(0.8));
  PropagateOptions o;
  o.fit_spectrum = false;
  const PropagatorResult r = propagate(b, slices(20, 0.05), o);
  const SectorResult& s = r.sectors[0];
  for (int k : {1, 7, 20}) {
    const double from_eigen = s.eigenvalues.array().pow(k).sum();
    EXPECT_NEAR(s.trace[k - 1] / from_eigen, 1.0, 1e-10);
  }
}

TEST(Propagator, SphereKernelIsSymmetricAndLevelsAreOrdered) {
  const PropagatorResult r = sphere_run(Measure::qep, false);
  for (const SectorResult& s : r.sectors) EXPECT_LT(s.asymmetry, 1e-3);
  ASSERT_EQ(r.levels.size(), 3u);
  for (const EnergyLevel& l : r.levels) EXPECT_NEAR(l.energy, 0.5 * l.label * (l.label + 1), 0.05) << l.label;
}

TEST(Propagator, NaiveMeasureWithEffectivePotentialMatchesQep) {
  const PropagatorResult qep = sphere_run(Measure::qep, false);
  const PropagatorResult naive = sphere_run(Measure::naive_dewitt, false);
  const PropagatorResult fixed = sphere_run(Measure::naive_dewitt, true);
  // The remaining gap is a slicing effect of order eps E; it halves when
  // eps is halved.
  for (std::size_t l = 0; l < qep.levels.size(); ++l) {
    EXPECT_NEAR(naive.levels[l].energy - qep.levels[l].energy, 1.0 / 3.0, 0.05) << l;
    EXPECT_NEAR(fixed.levels[l].energy, qep.levels[l].energy, 0.05) << l;
  }
}

TEST(Propagator, ErrorsAreTyped) {
  const GeometryBundle line(flat_cartesian(1));
  PropagateOptions coarse;
  coarse.grid.points = 8;
  EXPECT_EQ(kind_of([&] { propagate(line, slices(4, 0.01), coarse); }), ErrorKind::GridResolutionInsufficient);
  SliceConfig rt = slices(4, 0.01);
  rt.contour = TimeContour::real_time;
  EXPECT_EQ(kind_of([&] { propagate(line, rt, {}); }), ErrorKind::Unsupported);
  EXPECT_EQ(kind_of([&] { propagate(GeometryBundle(polar()), slices(4, 0.01), {}); }), ErrorKind::Unsupported);
  SliceConfig wide = slices(4, 2.0);
  EXPECT_EQ(kind_of([&] { propagate(GeometryBundle(sphere(1.0)), wide, {}); }), ErrorKind::ParameterOutOfRange);
}
