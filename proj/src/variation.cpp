// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>

#include "torsiongeo/dynamics.hpp"
#include "torsiongeo/error.hpp"

namespace torsiongeo {

void variation_coefficients(const GeometryBundle& bundle, const Trajectory& traj, std::vector<Matrix>& G,
                            std::vector<Matrix>& Sigma) {
  const int d = traj.dimension();
  G.assign(traj.size(), Matrix::Zero(d, d));
  Sigma.assign(traj.size(), Matrix::Zero(d, d));
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const ConnectionData c = bundle.connection(traj.q[k]);
    const Vector& v = traj.qdot[k];
    for (int mu = 0; mu < d; ++mu) {
      for (int lam = 0; lam < d; ++lam) {
        double g = 0.0, s = 0.0;
        for (int nu = 0; nu < d; ++nu) {
          g += c.gamma(lam, nu, mu) * v[nu];
          s += 2.0 * c.torsion(nu, lam, mu) * v[nu];
        }
        G[k](mu, lam) = g;
        Sigma[k](mu, lam) = s;
      }
    }
  }
}

namespace {

void check_grid(const std::vector<double>& t, std::size_t g, std::size_t s, std::size_t dq) {
  if (t.size() < 2) fail(ErrorKind::GridMismatch, "variation grid needs two or more samples");
  if (g != t.size() || s != t.size() || dq != t.size()) {
    fail(ErrorKind::GridMismatch, "variation field length differs from the trajectory grid");
  }
}

template <typename T>
T lerp(const T& a, const T& b, double w) {
  return (1.0 - w) * a + w * b;
}

}  // namespace

std::vector<Vector> solve_closure_ode(const std::vector<double>& t, const std::vector<Matrix>& G,
                                      const std::vector<Matrix>& Sigma, const std::vector<Vector>& dq) {
  check_grid(t, G.size(), Sigma.size(), dq.size());
  const int d = static_cast<int>(dq.front().size());
  std::vector<Vector> db(t.size(), Vector::Zero(d));
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    const double h = t[k + 1] - t[k];
    const Matrix gm = lerp(G[k], G[k + 1], 0.5);
    const Matrix sm = lerp(Sigma[k], Sigma[k + 1], 0.5);
    const Vector qm = lerp(dq[k], dq[k + 1], 0.5);
    const Vector src0 = Sigma[k] * dq[k];
    const Vector srcm = sm * qm;
    const Vector src1 = Sigma[k + 1] * dq[k + 1];
    const Vector& b = db[k];
    const Vector k1 = -G[k] * b + src0;
    const Vector k2 = -gm * (b + 0.5 * h * k1) + srcm;
    const Vector k3 = -gm * (b + 0.5 * h * k2) + srcm;
    const Vector k4 = -G[k + 1] * (b + h * k3) + src1;
    db[k + 1] = b + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return db;
}

std::vector<Vector> solve_closure_time_ordered(const std::vector<double>& t, const std::vector<Matrix>& G,
                                               const std::vector<Matrix>& Sigma, const std::vector<Vector>& dq,
                                               int substeps) {
  check_grid(t, G.size(), Sigma.size(), dq.size());
  if (substeps < 2 || substeps % 2 != 0) fail(ErrorKind::ValidationError, "'substeps' must be even and >= 2");
  const int d = static_cast<int>(dq.front().size());
  std::vector<Vector> db(t.size(), Vector::Zero(d));
  // P = U(tau, t_0) and its inverse, advanced together so that
  // U(t, t') = P(t) P(t')^{-1} never needs a matrix inversion.
  Matrix P = Matrix::Identity(d, d);
  Matrix P_inv = Matrix::Identity(d, d);
  Vector accumulated = Vector::Zero(d);  // integral of P^{-1} Sigma dq
  std::vector<Vector> f(substeps + 1);
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    const double h = (t[k + 1] - t[k]) / substeps;
    f[0] = P_inv * (Sigma[k] * dq[k]);
    for (int j = 0; j < substeps; ++j) {
      const double w_mid = (j + 0.5) / substeps;
      const Matrix gm = lerp(G[k], G[k + 1], w_mid);
      const Matrix step = (-h * gm).exp();
      const Matrix step_inv = (h * gm).exp();
      P = step * P;
      P_inv = P_inv * step_inv;
      const double w = static_cast<double>(j + 1) / substeps;
      f[j + 1] = P_inv * (lerp(Sigma[k], Sigma[k + 1], w) * lerp(dq[k], dq[k + 1], w));
    }
    Vector integral = Vector::Zero(d);
    for (int j = 0; j + 2 <= substeps; j += 2) integral += f[j] + 4.0 * f[j + 1] + f[j + 2];
    accumulated += (h / 3.0) * integral;
    db[k + 1] = P * accumulated;
  }
  return db;
}

namespace {

void check_variation(const Trajectory& traj, const std::vector<Vector>& dq) {
  if (dq.size() != traj.size()) fail(ErrorKind::GridMismatch, "variation has a different length than the trajectory");
  double scale = 0.0;
  for (const auto& v : dq) {
    if (v.size() != traj.dimension()) fail(ErrorKind::GridMismatch, "variation dimension differs from the trajectory");
    scale = std::max(scale, v.norm());
  }
  const double tol = 1e-10 * (1.0 + scale);
  if (dq.front().norm() > tol || dq.back().norm() > tol) {
    fail(ErrorKind::ValidationError, "holonomic variation must vanish at both endpoints");
  }
}

}  // namespace

VariationRecord nonholonomic_variation(const GeometryBundle& bundle, const Trajectory& traj,
                                       const std::vector<Vector>& dq) {
  check_variation(traj, dq);
  VariationRecord rec;
  rec.t = traj.t;
  rec.dq = dq;
  variation_coefficients(bundle, traj, rec.G, rec.Sigma);
  rec.db = solve_closure_ode(rec.t, rec.G, rec.Sigma, rec.dq);
  return rec;
}

VariationRecord variation_closed_form(const GeometryBundle& bundle, const Trajectory& traj,
                                      const std::vector<Vector>& dq, int substeps) {
  check_variation(traj, dq);
  VariationRecord rec;
  rec.t = traj.t;
  rec.dq = dq;
  variation_coefficients(bundle, traj, rec.G, rec.Sigma);
  rec.db = solve_closure_time_ordered(rec.t, rec.G, rec.Sigma, rec.dq, substeps);
  return rec;
}

std::vector<Vector> bump_variation(const Trajectory& traj, const Vector& amplitude) {
  std::vector<Vector> dq(traj.size());
  const double t0 = traj.t.front();
  const double span = traj.t.back() - t0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double s = std::sin(std::numbers::pi * (traj.t[k] - t0) / span);
    dq[k] = amplitude * (s * s);
  }
  // sin(pi) is not exactly zero in floating point.
  dq.front().setZero();
  dq.back().setZero();
  return dq;
}

}  // namespace torsiongeo
