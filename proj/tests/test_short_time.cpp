// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "test_util.hpp"
#include "torsiongeo/catalog.hpp"
#include "torsiongeo/error.hpp"
#include "torsiongeo/short_time.hpp"

using namespace torsiongeo;

namespace {

Point p3(double a, double b, double c) { return (Point(3) << a, b, c).finished(); }

struct OrbitFixture {
  GeometryBundle bundle{constant_torsion_toy(0.3)};
  Point q = p3(0.2, -0.4, 0.5);
  Vector dir = p3(0.6, -0.5, 0.62);
  double eps = 0.1;
  double mass = 1.0;

  double residual(Scheme scheme, double s, int order = 4) const {
    const Vector dq = s * dir;
    SliceConfig c;
    c.eps = eps;
    c.particle.mass = mass;
    c.scheme = scheme;
    c.order = order;
    return short_time_action(bundle, q, dq, c).total - classical_orbit_action(bundle, q - dq, q, eps, mass);
  }

  // log2 of the residual ratio between step s and s / 2.
  double order_of(Scheme scheme, double s, int order = 4) const {
    return std::log2(std::abs(residual(scheme, s, order) / residual(scheme, s / 2, order)));
  }
};

// log |det d(Delta x)/d(Delta q)| relative to the triad at q, by central
// differences of the cubic image.
double image_log_det(const ExpansionCoefficients& ec, const Vector& dq) {
  const int d = static_cast<int>(dq.size());
  Matrix jac(ec.e.rows(), d);
  const double h = 1e-6;
  for (int a = 0; a < d; ++a) {
    Vector p = dq, m = dq;
    p[a] += h;
    m[a] -= h;
    jac.col(a) = (delta_x_expansion(ec, p, 3) - delta_x_expansion(ec, m, 3)) / (2.0 * h);
  }
  return std::log(std::abs((ec.e.inverse() * jac).determinant()));
}

}  // namespace

TEST(ShortTime, DeltaXExpansionMatchesChartMap) {
  // Polar chart: Delta x is known in closed form.
  const GeometryBundle b(polar());
  const Point q = (Point(2) << 1.3, 0.4).finished();
  const Vector dir = (Point(2) << 0.7, -0.9).finished();
  auto x = [](const Point& p) { return (Point(2) << p[0] * std::cos(p[1]), p[0] * std::sin(p[1])).finished(); };
  double prev = 0.0;
  for (double s : {0.04, 0.02}) {
    const Vector dq = s * dir;
    const Vector exact = x(q) - x(q - dq);
    const double err = (delta_x_expansion(b, q, dq, 3) - exact).norm();
    if (prev > 0.0) {
      EXPECT_NEAR(std::log2(prev / err), 4.0, 0.2);
    }
    prev = err;
  }
}

TEST(ShortTime, PostpointActionIsFifthOrderAgainstTheOrbit) {
  const OrbitFixture f;
  EXPECT_NEAR(f.order_of(Scheme::postpoint, 0.1), 5.0, 0.3);
  EXPECT_NEAR(f.order_of(Scheme::prepoint, 0.1), 5.0, 0.3);
  EXPECT_NEAR(f.order_of(Scheme::postpoint, 0.1, 2), 3.0, 0.3);
}

TEST(ShortTime, MidpointActionIsSixthOrderAgainstTheOrbit) {
  const OrbitFixture f;
  EXPECT_NEAR(f.order_of(Scheme::midpoint, 0.1), 6.0, 0.3);
}

TEST(ShortTime, SchemesAgreeToQuarticOrder) {
  const OrbitFixture f;
  for (double s : {0.05, 0.025}) {
    const double scale = f.mass / (2.0 * f.eps) * std::pow(s, 5);
    EXPECT_LT(std::abs(f.residual(Scheme::postpoint, s) - f.residual(Scheme::midpoint, s)), 10.0 * scale);
    EXPECT_LT(std::abs(f.residual(Scheme::prepoint, s) - f.residual(Scheme::midpoint, s)), 10.0 * scale);
  }
}

TEST(ShortTime, MidpointHasNoCubicTerm) {
  const OrbitFixture f;
  SliceConfig c;
  c.scheme = Scheme::midpoint;
  const ActionTerms t = short_time_action(f.bundle, f.q, 0.1 * f.dir, c);
  EXPECT_EQ(t.cubic, 0.0);
  EXPECT_NE(t.quartic, 0.0);
}

TEST(ShortTime, NaiveJacobianFormsAgree) {
  for (const auto& s : torsiongeo::testing::catalog_samples(6, 3)) {
    const GeometryBundle b(s.triad);
    for (const Point& q : s.points) {
      const Vector dq = Vector::Constant(q.size(), 0.03);
      const double aff = jacobian_actions(b, q, dq, JacobianForm::affine_trace).value;
      EXPECT_NEAR(jacobian_actions(b, q, dq, JacobianForm::christoffel_trace).value, aff, 1e-10) << s.label;
      EXPECT_NEAR(jacobian_actions(b, q, dq, JacobianForm::triad_determinant).value, aff, 1e-10) << s.label;
    }
  }
}

TEST(ShortTime, QepJacobianIsTheImageDeterminant) {
  const OrbitFixture f;
  const auto ec = ExpansionCoefficients::at(*f.bundle.at(f.q));
  double prev = 0.0;
  for (double s : {0.1, 0.05, 0.025}) {
    const Vector dq = s * f.dir;
    const double err = std::abs(jacobian_actions(f.bundle, f.q, dq, JacobianForm::qep).value - image_log_det(ec, dq));
    if (prev > 0.0) {
      EXPECT_GT(std::log2(prev / err), 2.7);
    }
    prev = err;
  }
}

TEST(ShortTime, JacobianShiftIsRicciOverSixOnTheSphere) {
  for (double a : {0.7, 1.3}) {
    const GeometryBundle b(sphere(a));
    const Point q = (Point(2) << 0.9, 0.3).finished();
    const auto pg = b.at(q);
    const JacobianAction dj = delta_jacobian_action(b, q, (Point(2) << 0.05, 0.04).finished());
    EXPECT_LT(dj.linear.norm(), 1e-12);
    EXPECT_LT((dj.quadratic - pg->curvature.ricci_bar / 6.0).cwiseAbs().maxCoeff(), 1e-10);
    const double eps = 0.02;
    EXPECT_NEAR(expectation_contraction(dj.quadratic, pg->connection.metric.g_inv, eps, 1.0, 1.0),
                eps * pg->curvature.scalar_bar / 6.0, 1e-12);
  }
}

TEST(ShortTime, UnsymmetrizedQepReducesToAffineTraceWithoutTorsion) {
  const GeometryBundle b(polar());
  const auto pg = b.at((Point(2) << 1.2, 0.4).finished());
  const JacobianAction sym = jacobian_coefficients(*pg, JacobianForm::qep, true);
  const JacobianAction raw = jacobian_coefficients(*pg, JacobianForm::qep, false);
  const JacobianAction aff = jacobian_coefficients(*pg, JacobianForm::affine_trace);
  EXPECT_LT((sym.linear - raw.linear).norm(), 1e-12);
  EXPECT_LT((sym.quadratic - raw.quadratic).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((raw.quadratic - aff.quadratic).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ShortTime, EffectivePotential) {
  const GeometryBundle s(sphere(1.3));
  const auto v = effective_potential(s, (Point(2) << 0.9, 0.3).finished(), 2.0, 0.5);
  EXPECT_NEAR(v.value, -0.25 * (2.0 / (1.3 * 1.3)) / 12.0, 1e-12);
  EXPECT_FALSE(v.torsion_present);
  const GeometryBundle t(constant_torsion_toy(0.3));
  EXPECT_TRUE(effective_potential(t, p3(0.1, 0.2, 0.3), 1.0, 1.0).torsion_present);
}

TEST(ShortTime, PhaseSpaceKernelMatchesConfigurationKernel) {
  const OrbitFixture f;
  for (double eps : {0.05, 0.2}) {
    const auto c = phase_space_kernel_check(f.bundle, f.q, 0.05 * f.dir, eps, 1.5, 0.7);
    EXPECT_LT(c.residual, 1e-12);
    EXPECT_GT(c.configuration_kernel, 0.0);
  }
}

TEST(ShortTime, FreeKernelContinuation) {
  const ParticleParams p{};
  const auto e = free_particle_kernel(0.3, 2, 0.5, p, TimeContour::euclidean);
  EXPECT_NEAR(e.real(), std::exp(-0.3) / (std::numbers::pi), 1e-14);
  EXPECT_EQ(e.imag(), 0.0);
  const auto r = free_particle_kernel(0.3, 2, 0.5, p, TimeContour::real_time);
  EXPECT_NEAR(std::abs(r), 1.0 / std::numbers::pi, 1e-14);
}

TEST(ShortTime, TorsionScalarMatchesFrameOracle) {
  // d e^3 = S0 dq1 ^ dq2 fixes the flat-frame torsion
  // S^3_{ab} = (S0 / 2)(e_a^1 e_b^2 - e_a^2 e_b^1); all other components vanish.
  const double s0 = 0.3;
  const TriadPtr toy = constant_torsion_toy(s0);
  auto chart_scalar = [](const PointGeometry& pg) {
    const ConnectionData& c = pg.connection;
    const Tensor low = lower_last(c.torsion, c.metric.g);
    const Matrix& gi = c.metric.g_inv;
    const int d = low.extent(0);
    double s = 0.0;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int l = 0; l < d; ++l)
          for (int a2 = 0; a2 < d; ++a2)
            for (int b2 = 0; b2 < d; ++b2)
              for (int l2 = 0; l2 < d; ++l2) s += low(a, b, l) * gi(a, a2) * gi(b, b2) * gi(l, l2) * low(a2, b2, l2);
    return s;
  };
  for (const Point& q : {p3(0.1, 0.2, 0.3), p3(-0.6, 0.4, 0.8)}) {
    const PointGeometry pg = point_geometry(*toy, q);
    const Matrix& inv = pg.connection.metric.e_inv;
    double oracle = 0.0;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        const double s = 0.5 * s0 * (inv(0, a) * inv(1, b) - inv(1, a) * inv(0, b));
        oracle += s * s;
      }
    }
    EXPECT_NEAR(chart_scalar(pg), oracle, 1e-12);
    EXPECT_NEAR(chart_scalar(point_geometry(FiniteDifferenceTriad(toy), q)), oracle, 1e-7);
  }
}

TEST(ShortTime, SliceConfigValidation) {
  SliceConfig c;
  EXPECT_NO_THROW(c.validate());
  c.slices = 0;
  EXPECT_THROW(c.validate(), Error);
  c = SliceConfig{};
  c.eps = -1.0;
  EXPECT_THROW(c.validate(), Error);
  c = SliceConfig{};
  c.order = 5;
  EXPECT_THROW(c.validate(), Error);
}
