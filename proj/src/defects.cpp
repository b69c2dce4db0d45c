// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "torsiongeo/defects.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "torsiongeo/error.hpp"

namespace torsiongeo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_increment(double d) {
  while (d > std::numbers::pi) d -= kTwoPi;
  while (d <= -std::numbers::pi) d += kTwoPi;
  return d;
}

// Distance from the origin to the segment [a, b].
double origin_distance(const Point& a, const Point& b) {
  const Eigen::Vector2d u = b - a;
  const double len2 = u.squaredNorm();
  double s = len2 > 0.0 ? -a.dot(u) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return (Eigen::Vector2d(a) + s * u).norm();
}

}  // namespace

Contour circle_contour(const Point& center, double radius, int segments, int turns) {
  if (center.size() != 2) fail(ErrorKind::ValidationError, "contour center must have two coordinates");
  if (!(radius > 0.0)) fail(ErrorKind::ValidationError, "'radius' must be positive");
  if (segments < 3) fail(ErrorKind::ValidationError, "'segments' must be at least 3");
  if (turns < 1) fail(ErrorKind::ValidationError, "'turns' must be at least 1");
  Contour c;
  const long total = static_cast<long>(segments) * turns;
  c.vertices.reserve(total + 1);
  for (long k = 0; k < total; ++k) {
    const double t = kTwoPi * static_cast<double>(k % segments) / segments;
    Point p(2);
    p << center[0] + radius * std::cos(t), center[1] + radius * std::sin(t);
    c.vertices.push_back(p);
  }
  c.vertices.push_back(c.vertices.front());
  validate_contour(c);
  return c;
}

void validate_contour(Contour& contour) {
  auto& v = contour.vertices;
  if (v.size() < 3) fail(ErrorKind::ValidationError, "contour needs at least three vertices");
  for (const auto& p : v) {
    if (p.size() != 2) fail(ErrorKind::ValidationError, "contour vertices must have two coordinates");
  }
  if ((v.front() - v.back()).norm() > 1e-12) v.push_back(v.front());
  for (std::size_t k = 0; k + 1 < v.size(); ++k) {
    if ((v[k + 1] - v[k]).norm() == 0.0) fail(ErrorKind::ValidationError, "contour has repeated consecutive vertices");
    if (origin_distance(v[k], v[k + 1]) < 1e-12) fail(ErrorKind::OriginOnContour, "contour passes through the origin");
  }
  contour.winding = multivalued_angle_along(contour).winding;
}

AngleTrack multivalued_angle_along(const Contour& contour) {
  const auto& v = contour.vertices;
  AngleTrack track;
  track.phi.reserve(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k].norm() < 1e-12) fail(ErrorKind::OriginOnContour, "contour vertex at the origin");
    const double principal = std::atan2(v[k][1], v[k][0]);
    if (k == 0) {
      track.phi.push_back(principal);
    } else {
      if (origin_distance(v[k - 1], v[k]) < 1e-12) fail(ErrorKind::OriginOnContour, "contour passes through the origin");
      const double prev = track.phi.back();
      track.phi.push_back(prev + wrap_increment(principal - std::atan2(v[k - 1][1], v[k - 1][0])));
    }
  }
  track.total = track.phi.back() - track.phi.front();
  track.winding = static_cast<int>(std::lround(track.total / kTwoPi));
  return track;
}

DefectGeometry dislocation_geometry(double epsilon) {
  if (!std::isfinite(epsilon)) fail(ErrorKind::ValidationError, "'epsilon' must be finite");
  return {DefectKind::dislocation, epsilon, dislocation(epsilon), nullptr};
}

DefectGeometry disclination_geometry(double omega, double bound) {
  if (!(std::abs(omega) < bound)) {
    fail(ErrorKind::ParameterOutOfRange, "'Omega' must satisfy |Omega| < " + std::to_string(bound));
  }
  auto metric = make_metric_geometry("disclination-metric", 2,
                                     [omega](const Point& q) { return disclination_metric(omega, q); });
  return {DefectKind::disclination, omega, disclination(omega), metric};
}

Vector burgers_vector(const TriadField& triad, const Contour& contour) {
  const auto& v = contour.vertices;
  Vector b = Vector::Zero(triad.flat_dimension());
  Matrix e_prev = triad.eval(v.front());
  for (std::size_t k = 0; k + 1 < v.size(); ++k) {
    const Matrix e_next = triad.eval(v[k + 1]);
    b += 0.5 * (e_prev + e_next) * (v[k + 1] - v[k]);
    e_prev = e_next;
  }
  return b;
}

Vector burgers_vector(const DefectGeometry& defect, const Contour& contour) {
  if (defect.kind != DefectKind::dislocation) {
    fail(ErrorKind::ValidationError, "Burgers vector applies to dislocations");
  }
  Contour c = contour;
  validate_contour(c);
  return burgers_vector(*defect.triad, c);
}

Vector reciprocal_burgers_vector(const DefectGeometry& defect, const Contour& x_contour, int substeps) {
  Contour c = x_contour;
  validate_contour(c);
  if (substeps < 1) fail(ErrorKind::ValidationError, "'substeps' must be positive");
  const TriadField& triad = *defect.triad;
  const auto& x = c.vertices;
  Point q = x.front();
  auto rate = [&](const Point& at, const Vector& dx) -> Vector {
    return reciprocal_triad(triad, at) * dx;
  };
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    // x(s) is linear on the edge, so dx/ds is constant there.
    const Vector dx = (x[k + 1] - x[k]) / substeps;
    for (int j = 0; j < substeps; ++j) {
      const Vector k1 = rate(q, dx);
      const Vector k2 = rate(q + 0.5 * k1, dx);
      const Vector k3 = rate(q + 0.5 * k2, dx);
      const Vector k4 = rate(q + k3, dx);
      q += (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    }
  }
  return q - x.front();
}

double frank_rotation_deficit(const DefectGeometry& defect, const Contour& contour) {
  if (defect.kind != DefectKind::disclination) {
    fail(ErrorKind::ValidationError, "rotation deficit applies to disclinations");
  }
  Contour c = contour;
  validate_contour(c);
  const auto& tri = dynamic_cast<const DisclinationTriad&>(*defect.triad);
  const AngleTrack track = multivalued_angle_along(c);
  for (const auto& p : c.vertices) {
    Eigen::LLT<Matrix> llt(disclination_metric(defect.parameter, p));
    if (llt.info() != Eigen::Success) {
      fail(ErrorKind::MetricNotPositiveDefinite, "disclination metric is not positive definite on the contour");
    }
  }
  auto omega_at = [&](std::size_t k) {
    const Matrix e = tri.eval_on_branch(c.vertices[k], track.phi[k]);
    return 0.5 * (e(1, 0) - e(0, 1));
  };
  double total = 0.0;
  double prev = omega_at(0);
  for (std::size_t k = 1; k < c.vertices.size(); ++k) {
    const double cur = omega_at(k);
    total += cur - prev;
    prev = cur;
  }
  return total;
}

double holonomy_rotation_angle(const GeometryBundle& bundle, const Contour& contour, ConnectionKind mode,
                               int substeps) {
  Contour c = contour;
  validate_contour(c);
  if (bundle.dimension() != 2) fail(ErrorKind::ValidationError, "holonomy angle needs a two-dimensional chart");
  const auto& v = c.vertices;
  auto rate = [&](const Point& at, const Vector& qdot, const Vector& w) -> Vector {
    const ConnectionData cd = bundle.connection(at);
    const Tensor& gam = mode == ConnectionKind::riemann ? cd.christoffel : cd.gamma;
    Vector out = Vector::Zero(2);
    for (int mu = 0; mu < 2; ++mu) {
      for (int nu = 0; nu < 2; ++nu) {
        for (int lam = 0; lam < 2; ++lam) out[lam] -= gam(mu, nu, lam) * qdot[mu] * w[nu];
      }
    }
    return out;
  };
  const MetricData m0 = bundle.metric(v.front());
  Vector w0(2);
  w0 << 1.0, 0.0;
  Vector w = w0;
  for (std::size_t k = 0; k + 1 < v.size(); ++k) {
    const Vector qdot = (v[k + 1] - v[k]) / substeps;
    Point q = v[k];
    for (int j = 0; j < substeps; ++j) {
      const Vector k1 = rate(q, qdot, w);
      const Vector k2 = rate(q + 0.5 * qdot, qdot, w + 0.5 * k1);
      const Vector k3 = rate(q + 0.5 * qdot, qdot, w + 0.5 * k2);
      const Vector k4 = rate(q + qdot, qdot, w + k3);
      w += (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
      q += qdot;
    }
  }
  const double dot = w0.dot(m0.g * w);
  const double cross = m0.sqrt_g * (w0[0] * w[1] - w0[1] * w[0]);
  return std::atan2(cross, dot);
}

}  // namespace torsiongeo
