// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "torsiongeo/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "torsiongeo/error.hpp"

namespace torsiongeo {

std::string_view to_string(PathKind kind) {
  return kind == PathKind::geodesic ? "geodesic" : "autoparallel";
}

void ParticleParams::validate() const {
  if (!(mass > 0.0) || !std::isfinite(mass)) fail(ErrorKind::ValidationError, "'M' must be positive");
  if (!(hbar > 0.0) || !std::isfinite(hbar)) fail(ErrorKind::ValidationError, "'hbar' must be positive");
}

Vector path_acceleration(const ConnectionData& c, PathKind kind, const Vector& v) {
  const Tensor& conn = kind == PathKind::geodesic ? c.christoffel : c.gamma;
  const int d = static_cast<int>(v.size());
  Vector a = Vector::Zero(d);
  for (int mu = 0; mu < d; ++mu) {
    for (int nu = 0; nu < d; ++nu) {
      const double vv = v[mu] * v[nu];
      for (int lam = 0; lam < d; ++lam) a[lam] -= conn(mu, nu, lam) * vv;
    }
  }
  return a;
}

Vector acceleration_difference(const ConnectionData& c, const Vector& v) {
  return path_acceleration(c, PathKind::geodesic, v) - path_acceleration(c, PathKind::autoparallel, v);
}

double kinetic_invariant(const GeometryBundle& bundle, const Point& q, const Vector& v) {
  const MetricData m = bundle.metric(q);
  return v.dot(m.g * v);
}

namespace {

long step_count(double duration, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorKind::ValidationError, "'dt' must be positive");
  if (!(duration > 0.0) || !std::isfinite(duration)) fail(ErrorKind::ValidationError, "'T' must be positive");
  const long n = std::lround(duration / dt);
  if (n < 1) fail(ErrorKind::ValidationError, "'T' is shorter than one step");
  return n;
}

struct State {
  Point q;
  Vector v;
};

State derivative(const GeometryBundle& bundle, PathKind kind, const State& s, double t) {
  try {
    const ConnectionData c = bundle.connection(s.q);
    return {s.v, path_acceleration(c, kind, s.v)};
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::SingularTriad) throw;
    std::ostringstream os;
    os << "path reached a singular chart point near t = " << t;
    fail(ErrorKind::ChartSingularity, os.str());
  }
}

State rk4_step(const GeometryBundle& bundle, PathKind kind, const State& s, double t, double h) {
  const State k1 = derivative(bundle, kind, s, t);
  const State k2 = derivative(bundle, kind, {s.q + 0.5 * h * k1.q, s.v + 0.5 * h * k1.v}, t + 0.5 * h);
  const State k3 = derivative(bundle, kind, {s.q + 0.5 * h * k2.q, s.v + 0.5 * h * k2.v}, t + 0.5 * h);
  const State k4 = derivative(bundle, kind, {s.q + h * k3.q, s.v + h * k3.v}, t + h);
  return {s.q + (h / 6.0) * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q),
          s.v + (h / 6.0) * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v)};
}

}  // namespace

Trajectory integrate_trajectory(const GeometryBundle& bundle, PathKind kind, const Point& q0, const Vector& v0,
                                double duration, double dt, const IntegrationOptions& options) {
  const int d = bundle.dimension();
  if (q0.size() != d || v0.size() != d) {
    fail(ErrorKind::ValidationError, "initial point and velocity must have " + std::to_string(d) + " components");
  }
  const long n = step_count(duration, dt);
  Trajectory traj;
  traj.kind = kind;
  traj.geometry = bundle.triad().name();
  traj.dt = dt;
  traj.t.reserve(n + 1);
  traj.q.reserve(n + 1);
  traj.qdot.reserve(n + 1);

  State s{q0, v0};
  // Validates the starting point.
  derivative(bundle, kind, s, 0.0);
  const double inv0 = kinetic_invariant(bundle, q0, v0);
  const double scale = std::max(std::abs(inv0), 1e-300);
  traj.t.push_back(0.0);
  traj.q.push_back(s.q);
  traj.qdot.push_back(s.v);
  for (long k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * dt;
    s = rk4_step(bundle, kind, s, t, dt);
    double inv = 0.0;
    try {
      inv = kinetic_invariant(bundle, s.q, s.v);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SingularTriad) throw;
      fail(ErrorKind::ChartSingularity, "path reached a singular chart point");
    }
    const double drift = std::abs(inv - inv0) / scale;
    if (drift > 10.0 * options.drift_tolerance) {
      std::ostringstream os;
      os << "kinetic invariant drifted by " << drift << " (relative) at t = " << t + dt << "; reduce dt";
      fail(ErrorKind::StepTooLarge, os.str());
    }
    traj.t.push_back(static_cast<double>(k + 1) * dt);
    traj.q.push_back(s.q);
    traj.qdot.push_back(s.v);
  }
  return traj;
}

double step_doubling_error(const GeometryBundle& bundle, PathKind kind, const Point& q0, const Vector& v0,
                           double duration, double dt) {
  IntegrationOptions loose;
  loose.drift_tolerance = 1.0;
  const Trajectory coarse = integrate_trajectory(bundle, kind, q0, v0, duration, dt, loose);
  const Trajectory fine = integrate_trajectory(bundle, kind, q0, v0, duration, 0.5 * dt, loose);
  return (coarse.q.back() - fine.q.back()).norm() / 15.0;
}

std::vector<double> lagrangian_samples(const GeometryBundle& bundle, const Trajectory& traj, double mass) {
  std::vector<double> l(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    l[k] = 0.5 * mass * kinetic_invariant(bundle, traj.q[k], traj.qdot[k]);
  }
  return l;
}

double simpson(const std::vector<double>& y, double h) {
  const std::size_t n = y.size();
  if (n < 2) fail(ErrorKind::GridTooCoarse, "quadrature needs at least two samples");
  if (n == 2) return 0.5 * h * (y[0] + y[1]);
  const std::size_t intervals = n - 1;
  // Simpson on an even number of intervals, 3/8 rule on the last three if odd.
  const std::size_t even = intervals % 2 == 0 ? intervals : intervals - 3;
  double s = 0.0;
  for (std::size_t k = 0; k + 2 <= even; k += 2) s += y[k] + 4.0 * y[k + 1] + y[k + 2];
  s *= h / 3.0;
  if (even != intervals) {
    const std::size_t k = even;
    s += 3.0 * h / 8.0 * (y[k] + 3.0 * y[k + 1] + 3.0 * y[k + 2] + y[k + 3]);
  }
  return s;
}

double evaluate_action(const GeometryBundle& bundle, const Trajectory& traj, double mass) {
  return simpson(lagrangian_samples(bundle, traj, mass), traj.dt);
}

ElResidual modified_el_residual(const GeometryBundle& bundle, const Trajectory& traj, double mass) {
  const std::size_t n = traj.size();
  if (n < 5) fail(ErrorKind::GridTooCoarse, "the residual needs at least five samples");
  const int d = traj.dimension();
  std::vector<Vector> p(n);
  std::vector<ConnectionData> conn(n);
  for (std::size_t k = 0; k < n; ++k) {
    conn[k] = bundle.connection(traj.q[k]);
    p[k] = mass * conn[k].metric.g * traj.qdot[k];
  }
  ElResidual out;
  for (std::size_t k = 2; k + 2 < n; ++k) {
    const ConnectionData& c = conn[k];
    const Vector& v = traj.qdot[k];
    const Vector dp = (-p[k + 2] + 8.0 * p[k + 1] - 8.0 * p[k - 1] + p[k - 2]) / (12.0 * traj.dt);
    Vector r(d);
    for (int lam = 0; lam < d; ++lam) {
      double dl = 0.0, force = 0.0;
      for (int mu = 0; mu < d; ++mu) {
        for (int nu = 0; nu < d; ++nu) {
          dl += 0.5 * mass * c.dg(mu, nu, lam) * v[mu] * v[nu];
          force += 2.0 * c.torsion(lam, mu, nu) * v[mu] * p[k][nu];
        }
      }
      r[lam] = dl - dp[lam] - force;
    }
    out.t.push_back(traj.t[k]);
    out.max_norm = std::max(out.max_norm, r.norm());
    out.r.push_back(std::move(r));
  }
  return out;
}

std::vector<Vector> torsion_force(const GeometryBundle& bundle, const Trajectory& traj, double mass) {
  const int d = traj.dimension();
  std::vector<Vector> f(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const ConnectionData c = bundle.connection(traj.q[k]);
    const Vector& v = traj.qdot[k];
    const Vector gv = c.metric.g * v;
    f[k] = Vector::Zero(d);
    for (int lam = 0; lam < d; ++lam) {
      for (int mu = 0; mu < d; ++mu) {
        for (int nu = 0; nu < d; ++nu) f[k][lam] += 2.0 * mass * c.torsion(lam, mu, nu) * v[mu] * gv[nu];
      }
    }
  }
  return f;
}

}  // namespace torsiongeo
