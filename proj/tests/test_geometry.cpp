// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "test_util.hpp"
#include "torsiongeo/catalog.hpp"
#include "torsiongeo/error.hpp"
#include "torsiongeo/geometry.hpp"
#include "torsiongeo/io.hpp"

using namespace torsiongeo;

namespace {

// K_{mu nu lam} + K_{mu lam nu} with the last index lowered.
double contortion_symmetric_part(const ConnectionData& c) {
  const Tensor k = lower_last(c.contortion, c.metric.g);
  const int d = k.extent(0);
  double worst = 0.0;
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      for (int l = 0; l < d; ++l) worst = std::max(worst, std::abs(k(a, b, l) + k(a, l, b)));
    }
  }
  return worst;
}

double trace_identity(const ConnectionData& c) {
  const int d = c.gamma.extent(0);
  double worst = 0.0;
  for (int mu = 0; mu < d; ++mu) {
    double a = 0.0, b = 0.0;
    for (int nu = 0; nu < d; ++nu) {
      a += c.gamma(mu, nu, nu);
      b += c.christoffel(mu, nu, nu);
    }
    worst = std::max(worst, std::abs(a - b));
  }
  return worst;
}

}  // namespace

TEST(Geometry, FlatCartesianIsTrivial) {
  const auto pg = point_geometry(*flat_cartesian(3), (Point(3) << 0.1, -2.0, 4.0).finished());
  EXPECT_EQ(pg.connection.gamma.max_abs(), 0.0);
  EXPECT_EQ(pg.connection.torsion.max_abs(), 0.0);
  EXPECT_EQ(pg.curvature.cartan.max_abs(), 0.0);
  EXPECT_DOUBLE_EQ(pg.connection.metric.sqrt_g, 1.0);
}

TEST(Geometry, PolarChristoffelClosedForm) {
  const double r = 1.7;
  const auto pg = point_geometry(*polar(), (Point(2) << r, 0.4).finished());
  const Tensor& c = pg.connection.christoffel;
  EXPECT_NEAR(c(1, 1, 0), -r, 1e-14);       // Gamma_{phi phi}^r
  EXPECT_NEAR(c(0, 1, 1), 1.0 / r, 1e-14);  // Gamma_{r phi}^phi
  EXPECT_NEAR(c(1, 0, 1), 1.0 / r, 1e-14);
  EXPECT_NEAR(pg.connection.metric.sqrt_g, r, 1e-14);
  EXPECT_LT(pg.curvature.riemann.max_abs(), 1e-13);
}

TEST(Geometry, SphereCurvatureMatchesClosedForm) {
  for (double a : {0.5, 1.0, 2.0}) {
    const auto pg = point_geometry(*sphere(a), (Point(2) << 0.8, 1.1).finished());
    EXPECT_NEAR(pg.curvature.scalar_bar, 2.0 / (a * a), 1e-12);
    EXPECT_NEAR(pg.curvature.scalar, 2.0 / (a * a), 1e-12);
    const Matrix ricci_expected = pg.connection.metric.g / (a * a);
    EXPECT_LT((pg.curvature.ricci_bar - ricci_expected).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT(pg.curvature.einstein_bar.cwiseAbs().maxCoeff(), 1e-12);  // two dimensions
    EXPECT_LT(pg.connection.torsion.max_abs(), 1e-15);
  }
}

TEST(Geometry, CatalogTensorIdentities) {
  for (const auto& s : torsiongeo::testing::catalog_samples(25)) {
    for (const Point& q : s.points) {
      const auto pg = point_geometry(*s.triad, q);
      const ConnectionData& c = pg.connection;
      const int d = c.gamma.extent(0);
      for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
          for (int l = 0; l < d; ++l) ASSERT_EQ(c.torsion(a, b, l), -c.torsion(b, a, l)) << s.label;
        }
      }
      EXPECT_LT(contortion_symmetric_part(c), 1e-12) << s.label;
      EXPECT_LT(max_abs_diff(c.gamma, c.christoffel + c.contortion), 1e-10) << s.label;
      EXPECT_LT(trace_identity(c), 1e-10) << s.label;
      EXPECT_LT(max_abs_diff(c.gamma, c.gamma_alt), 1e-10) << s.label;
    }
  }
}

TEST(Geometry, CurvatureDecompositionOnTorsionToy) {
  const TriadPtr toy = constant_torsion_toy(0.3);
  const FiniteDifferenceTriad fd(toy, 1e-5);
  for (const auto& q : {(Point(3) << 0.2, -0.4, 0.5).finished(), (Point(3) << -0.7, 0.1, 0.9).finished()}) {
    const auto pg = point_geometry(*toy, q);
    // The triad connection is teleparallel: its curvature vanishes while the
    // Riemannian and torsion parts do not, so the relation is nontrivial.
    EXPECT_LT(pg.curvature.cartan.max_abs(), 1e-12);
    EXPECT_GT(pg.curvature.riemann.max_abs(), 1e-3);
    EXPECT_GT(pg.connection.torsion.max_abs(), 1e-3);
    EXPECT_LT(max_abs_diff(curvature_from_decomposition(*toy, pg), pg.curvature.cartan), 1e-8);
    const auto pf = point_geometry(fd, q);
    EXPECT_LT(max_abs_diff(curvature_from_decomposition(fd, pf), pf.curvature.cartan), 1e-5);
    EXPECT_LT(max_abs_diff(pf.curvature.cartan, pg.curvature.cartan), 1e-5);
  }
}

TEST(Geometry, FiniteDifferencesAgreeWithAnalytic) {
  for (const auto& s : torsiongeo::testing::catalog_samples(5, 11)) {
    const FiniteDifferenceTriad fd(s.triad, 1e-5);
    for (const Point& q : s.points) {
      const auto a = point_geometry(*s.triad, q);
      const auto f = point_geometry(fd, q);
      EXPECT_LT(max_abs_diff(a.connection.gamma, f.connection.gamma), 1e-8) << s.label;
      EXPECT_LT(max_abs_diff(a.curvature.d_gamma, f.curvature.d_gamma), 1e-5) << s.label;
      EXPECT_LT(max_abs_diff(a.curvature.cartan, f.curvature.cartan), 1e-5) << s.label;
    }
  }
}

TEST(Geometry, TorsionToyConnectionIsNotSymmetric) {
  const auto pg = point_geometry(*constant_torsion_toy(0.3), (Point(3) << 0.1, 0.2, 0.3).finished());
  // S_{12}^3 in the flat frame is S0 / 2; the chart torsion is nonzero.
  EXPECT_GT(pg.connection.torsion.max_abs(), 0.05);
  EXPECT_GT(pg.curvature.d_gamma.max_abs(), 1e-3);
}

TEST(Geometry, MetricIsCovariantlyConstant) {
  const GeometryBundle bundle(constant_torsion_toy(0.3));
  const Point q = (Point(3) << 0.3, -0.2, 0.6).finished();
  for (ConnectionKind mode : {ConnectionKind::riemann, ConnectionKind::affine}) {
    const TensorValue dg = covariant_derivative(bundle, metric_field(bundle), q, mode);
    EXPECT_LT(dg.values.max_abs(), 1e-12);
  }
  // Without the analytic gradient the finite-difference path gives the same.
  TensorField numeric = metric_field(bundle);
  numeric.gradient = nullptr;
  EXPECT_LT(covariant_derivative(bundle, numeric, q, ConnectionKind::affine).values.max_abs(), 1e-8);
}

TEST(Geometry, MetricOnlyGeometryUsesChristoffel) {
  const TriadPtr m = make_metric_geometry("round-sphere", 2, [](const Point& q) {
    Matrix g = Matrix::Zero(2, 2);
    g(0, 0) = 1.0;
    g(1, 1) = std::sin(q[0]) * std::sin(q[0]);
    return g;
  });
  const auto pg = point_geometry(*m, (Point(2) << 0.9, 0.2).finished());
  EXPECT_FALSE(pg.connection.torsion_defined);
  EXPECT_NEAR(pg.curvature.scalar_bar, 2.0, 1e-5);
  EXPECT_LT(max_abs_diff(pg.connection.gamma, pg.connection.christoffel), 1e-15);
}

TEST(Geometry, MetricOnlyRejectsIndefiniteMetric) {
  const TriadPtr m = make_metric_geometry("bad", 2, [](const Point&) {
    Matrix g = Matrix::Identity(2, 2);
    g(1, 1) = -1.0;
    return g;
  });
  try {
    point_geometry(*m, Point::Zero(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MetricNotPositiveDefinite);
  }
}

TEST(Geometry, SingularChartPointThrows) {
  try {
    induced_metric(*polar(), (Point(2) << 0.0, 0.3).finished());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularTriad);
  }
}

TEST(Geometry, BundleCacheSharesResults) {
  const GeometryBundle cached(polar(), true);
  const Point q = (Point(2) << 1.0, 0.5).finished();
  const auto a = cached.at(q);
  const auto b = cached.at(q);
  EXPECT_EQ(a.get(), b.get());
  EXPECT_EQ(cached.cache_size(), 1u);
  cached.clear_cache();
  EXPECT_EQ(cached.cache_size(), 0u);
  const GeometryBundle plain(polar());
  EXPECT_NE(plain.at(q).get(), plain.at(q).get());
}

TEST(Geometry, GridTriadRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "torsiongeo_grid_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "polar.csv").string();
  write_csv(path, sample_triad_grid(*polar(), {0.8, -0.5}, {1.6, 0.5}, {41, 51}));
  const TriadPtr grid = load_grid_triad_csv(path);
  const Point q = (Point(2) << 1.13, 0.07).finished();
  const auto a = point_geometry(*polar(), q);
  const auto g = point_geometry(*grid, q);
  EXPECT_LT((a.connection.metric.g - g.connection.metric.g).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT(max_abs_diff(a.connection.christoffel, g.connection.christoffel), 1e-4);
  EXPECT_LT(g.connection.torsion.max_abs(), 1e-4);
}

TEST(Geometry, GridTriadRejectsBadFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "torsiongeo_grid_test";
  std::filesystem::create_directories(dir);
  const std::string bad_header = (dir / "bad_header.csv").string();
  write_text_file(bad_header, "x,y,e_1_1\n0,0,1\n");
  EXPECT_THROW(load_grid_triad_csv(bad_header), Error);
  const std::string ragged = (dir / "nonuniform.csv").string();
  write_text_file(ragged, "q1,e_1_1\n0,1\n0.1,1\n0.3,1\n");
  try {
    load_grid_triad_csv(ragged);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ValidationError);
  }
}

TEST(Catalog, ParameterValidationNamesTheKey) {
  try {
    make_catalog_triad("sphere", {{"a", -1.0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("'a'"), std::string::npos);
  }
  EXPECT_THROW(make_catalog_triad("torus", {}), Error);
  EXPECT_THROW(make_catalog_triad("polar", {{"a", 1.0}}), Error);
  EXPECT_THROW(make_catalog_triad("flat-cartesian", {{"D", 2.5}}), Error);
  EXPECT_EQ(make_catalog_triad("flat-cartesian", {{"D", 3}})->dimension(), 3);
}
