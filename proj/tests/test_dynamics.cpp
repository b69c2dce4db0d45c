// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "torsiongeo/catalog.hpp"
#include "torsiongeo/dynamics.hpp"
#include "torsiongeo/error.hpp"

using namespace torsiongeo;

namespace {

Point p2(double a, double b) { return (Point(2) << a, b).finished(); }
Point p3(double a, double b, double c) { return (Point(3) << a, b, c).finished(); }

double max_norm_diff(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, (a[k] - b[k]).norm());
  return worst;
}

}  // namespace

TEST(Dynamics, PolarAutoparallelIsAStraightLine) {
  const GeometryBundle b(polar());
  // Start at (x, y) = (1, 0) moving along +y with unit speed.
  const Trajectory tr = integrate_trajectory(b, PathKind::autoparallel, p2(1.0, 0.0), p2(0.0, 1.0), 2.0, 1e-3);
  for (std::size_t k = 0; k < tr.size(); k += 100) {
    const double x = tr.q[k][0] * std::cos(tr.q[k][1]);
    const double y = tr.q[k][0] * std::sin(tr.q[k][1]);
    EXPECT_NEAR(x, 1.0, 1e-10);
    EXPECT_NEAR(y, tr.t[k], 1e-10);
  }
  EXPECT_NEAR(evaluate_action(b, tr, 2.0), 2.0, 1e-9);  // (M/2) v^2 T
}

TEST(Dynamics, GeodesicEqualsAutoparallelWithoutTorsion) {
  for (const TriadPtr& t : {polar(), sphere(1.5)}) {
    const GeometryBundle b(t);
    const auto g = integrate_trajectory(b, PathKind::geodesic, p2(1.1, 0.3), p2(0.4, -0.7), 1.5, 1e-3);
    const auto a = integrate_trajectory(b, PathKind::autoparallel, p2(1.1, 0.3), p2(0.4, -0.7), 1.5, 1e-3);
    EXPECT_LT(max_norm_diff(g.q, a.q), 1e-12) << t->name();
  }
}

TEST(Dynamics, TorsionSeparatesGeodesicsFromAutoparallels) {
  const GeometryBundle b(constant_torsion_toy(0.3));
  const Point q0 = p3(0.1, -0.2, 0.3);
  const Vector v0 = p3(0.5, 0.4, -0.3);
  const auto g = integrate_trajectory(b, PathKind::geodesic, q0, v0, 1.0, 1e-3);
  const auto a = integrate_trajectory(b, PathKind::autoparallel, q0, v0, 1.0, 1e-3);
  EXPECT_GT((g.q.back() - a.q.back()).norm(), 1e-3);
  EXPECT_GT(acceleration_difference(b.connection(q0), v0).norm(), 1e-3);
}

TEST(Dynamics, KineticInvariantIsConserved) {
  const GeometryBundle b(constant_torsion_toy(0.3));
  const Point q0 = p3(0.1, -0.2, 0.3);
  const Vector v0 = p3(0.5, 0.4, -0.3);
  for (PathKind kind : {PathKind::geodesic, PathKind::autoparallel}) {
    const auto tr = integrate_trajectory(b, kind, q0, v0, 2.0, 1e-3);
    const double k0 = kinetic_invariant(b, tr.q.front(), tr.qdot.front());
    for (std::size_t k = 0; k < tr.size(); ++k) {
      EXPECT_NEAR(kinetic_invariant(b, tr.q[k], tr.qdot[k]) / k0, 1.0, 1e-10);
    }
    EXPECT_LT(step_doubling_error(b, kind, q0, v0, 2.0, 1e-2), 1e-8);
  }
}

TEST(Dynamics, AutoparallelsSolveTheModifiedEulerLagrangeEquation) {
  const GeometryBundle b(constant_torsion_toy(0.3));
  const Point q0 = p3(0.1, -0.2, 0.3);
  const Vector v0 = p3(0.5, 0.4, -0.3);
  const auto a = integrate_trajectory(b, PathKind::autoparallel, q0, v0, 1.0, 1e-3);
  const auto g = integrate_trajectory(b, PathKind::geodesic, q0, v0, 1.0, 1e-3);
  EXPECT_LT(modified_el_residual(b, a, 1.0).max_norm, 1e-9);
  EXPECT_GT(modified_el_residual(b, g, 1.0).max_norm, 1e-3);
  double force = 0.0;
  for (const Vector& f : torsion_force(b, a, 1.0)) force = std::max(force, f.norm());
  EXPECT_GT(force, 1e-3);
}

TEST(Dynamics, ClosureFailureMatchesTimeOrderedSolution) {
  const GeometryBundle b(constant_torsion_toy(0.3));
  const auto tr = integrate_trajectory(b, PathKind::autoparallel, p3(0.1, -0.2, 0.3), p3(0.5, 0.4, -0.3), 1.0, 1e-3);
  const auto dq = bump_variation(tr, p3(0.01, -0.02, 0.015));
  const auto ode = nonholonomic_variation(b, tr, dq);
  const auto closed = variation_closed_form(b, tr, dq, 16);
  EXPECT_LT(max_norm_diff(ode.db, closed.db), 1e-8);
  EXPECT_EQ(ode.db.front().norm(), 0.0);
  EXPECT_GT(ode.db.back().norm(), 1e-6);  // the varied path does not close
}

TEST(Dynamics, HolonomicVariationCloses) {
  const GeometryBundle b(polar());
  const auto tr = integrate_trajectory(b, PathKind::autoparallel, p2(1.0, 0.0), p2(0.3, 0.5), 1.0, 1e-3);
  const auto rec = nonholonomic_variation(b, tr, bump_variation(tr, p2(0.01, 0.02)));
  for (const Vector& db : rec.db) EXPECT_LT(db.norm(), 1e-15);
}

TEST(Dynamics, VariationArgumentsAreChecked) {
  const GeometryBundle b(polar());
  const auto tr = integrate_trajectory(b, PathKind::autoparallel, p2(1.0, 0.0), p2(0.3, 0.5), 1.0, 0.01);
  auto dq = bump_variation(tr, p2(0.01, 0.02));
  dq.pop_back();
  try {
    nonholonomic_variation(b, tr, dq);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::GridMismatch);
  }
  std::vector<Vector> open(tr.size(), p2(0.01, 0.0));
  try {
    nonholonomic_variation(b, tr, open);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ValidationError);
  }
}

TEST(Dynamics, ChartSingularityIsReported) {
  const GeometryBundle b(polar());
  try {
    // Heads straight for the origin.
    integrate_trajectory(b, PathKind::autoparallel, p2(1.0, 0.0), p2(-1.0, 0.0), 2.0, 1e-3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ChartSingularity);
  }
}

TEST(Dynamics, SimpsonIsExactForCubics) {
  std::vector<double> y;
  const double h = 0.1;
  for (int k = 0; k <= 9; ++k) {  // nine intervals exercise the 3/8 closure
    const double t = k * h;
    y.push_back(t * t * t - 2.0 * t + 1.0);
  }
  const double T = 0.9;
  EXPECT_NEAR(simpson(y, h), T * T * T * T / 4.0 - T * T + T, 1e-14);
  y.resize(9);
  const double T8 = 0.8;
  EXPECT_NEAR(simpson(y, h), T8 * T8 * T8 * T8 / 4.0 - T8 * T8 + T8, 1e-14);
}

TEST(Dynamics, ParticleValidation) {
  EXPECT_THROW((ParticleParams{-1.0, 1.0}.validate()), Error);
  EXPECT_THROW((ParticleParams{1.0, 0.0}.validate()), Error);
  EXPECT_NO_THROW((ParticleParams{2.0, 0.5}.validate()));
}
