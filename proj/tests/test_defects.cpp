// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "torsiongeo/defects.hpp"
#include "torsiongeo/error.hpp"

using namespace torsiongeo;

namespace {

constexpr double kPi = std::numbers::pi;

Point p2(double a, double b) { return (Point(2) << a, b).finished(); }

}  // namespace

TEST(Defects, WindingAndAngleContinuation) {
  Contour c = circle_contour(p2(0.0, 0.0), 1.0, 400, 2);
  validate_contour(c);
  EXPECT_EQ(c.winding, 2);
  const AngleTrack track = multivalued_angle_along(c);
  EXPECT_NEAR(track.total, 4.0 * kPi, 1e-12);
  Contour off = circle_contour(p2(3.0, 0.0), 1.0, 400);
  validate_contour(off);
  EXPECT_FALSE(off.encloses_origin());
}

TEST(Defects, ContourThroughOriginIsRejected) {
  try {
    circle_contour(p2(1.0, 0.0), 1.0, 100);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OriginOnContour);
  }
}

TEST(Defects, DislocationBurgersVector) {
  const double eps = 0.01;
  const DefectGeometry d = dislocation_geometry(eps);
  for (int turns : {1, 2}) {
    for (const Point& center : {p2(0.0, 0.0), p2(0.3, -0.2)}) {
      const Vector b = burgers_vector(d, circle_contour(center, 1.0, 10000, turns));
      EXPECT_NEAR(b[0], 0.0, 1e-12);
      EXPECT_NEAR(b[1] / (turns * eps), 1.0, 1e-6);
    }
  }
  EXPECT_LT(burgers_vector(d, circle_contour(p2(3.0, 0.0), 1.0, 2000)).norm(), 1e-12);
}

TEST(Defects, ReciprocalBurgersVectorCarriesSecondOrderCorrection) {
  const double eps = 0.01;
  const Vector b = reciprocal_burgers_vector(dislocation_geometry(eps), circle_contour(p2(0.0, 0.0), 1.0, 2000), 8);
  EXPECT_NEAR(b[0], 0.0, 1e-9);
  // -eps at first order; the chart angle lags by eps / 2 pi.
  EXPECT_NEAR(b[1], -eps + eps * eps / (2.0 * kPi), 1e-7);
}

TEST(Defects, DisclinationRotationDeficit) {
  for (double omega : {0.05, -0.03}) {
    const DefectGeometry d = disclination_geometry(omega);
    const double deficit = frank_rotation_deficit(d, circle_contour(p2(0.1, 0.0), 1.0, 4000));
    EXPECT_NEAR(deficit, -2.0 * kPi * omega, 1e-9);
  }
  EXPECT_THROW(disclination_geometry(0.2), Error);
  EXPECT_THROW(frank_rotation_deficit(dislocation_geometry(0.01), circle_contour(p2(0, 0), 1.0, 100)), Error);
}

TEST(Defects, TeleparallelHolonomyIsTrivial) {
  const GeometryBundle b(dislocation(0.01));
  const Contour c = circle_contour(p2(0.0, 0.0), 1.0, 2000);
  EXPECT_NEAR(holonomy_rotation_angle(b, c, ConnectionKind::affine), 0.0, 1e-9);
  EXPECT_NEAR(holonomy_rotation_angle(b, c, ConnectionKind::riemann), 0.0, 1e-6);
}

TEST(Defects, SphereHolonomyEqualsEnclosedArea) {
  // A chart disc of radius r about colatitude tc covers the area
  // 2 pi r J1(r) sin(tc) on the unit sphere; the transported vector turns by
  // that angle for a counter-clockwise loop.
  const double r = 0.3, tc = 1.0;
  const Contour c = circle_contour(p2(tc, 0.5), r, 2000);
  const GeometryBundle b(sphere(1.0));
  const double expected = 2.0 * kPi * r * std::cyl_bessel_j(1.0, r) * std::sin(tc);
  EXPECT_NEAR(holonomy_rotation_angle(b, c, ConnectionKind::riemann), expected, 1e-6);
}
