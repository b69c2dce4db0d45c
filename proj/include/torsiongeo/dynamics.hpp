// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "torsiongeo/geometry.hpp"

namespace torsiongeo {

enum class PathKind { geodesic, autoparallel };

std::string_view to_string(PathKind kind);

struct ParticleParams {
  double mass = 1.0;
  double hbar = 1.0;

  // Throws ValidationError unless both are positive and finite.
  void validate() const;
};

struct Trajectory {
  PathKind kind = PathKind::autoparallel;
  std::string geometry;
  double dt = 0.0;
  std::vector<double> t;
  std::vector<Point> q;
  std::vector<Vector> qdot;

  std::size_t size() const { return t.size(); }
  int dimension() const { return q.empty() ? 0 : static_cast<int>(q.front().size()); }
};

struct IntegrationOptions {
  // Bound on the relative drift of g_{mu nu} qdot^mu qdot^nu; the integrator
  // aborts with StepTooLarge past ten times this value.
  double drift_tolerance = 1e-8;
};

// qddot^lam = -C_{mu nu}^lam qdot^mu qdot^nu with C the Christoffel symbol
// (geodesic) or the affine connection (autoparallel).
Vector path_acceleration(const ConnectionData& c, PathKind kind, const Vector& v);

// Fixed-step classical RK4 over round(T / dt) steps.
// Throws ChartSingularity when the path reaches a singular chart point.
Trajectory integrate_trajectory(const GeometryBundle& bundle, PathKind kind, const Point& q0, const Vector& v0,
                                double duration, double dt, const IntegrationOptions& options = {});

// Step-doubling estimate of the RK4 position error at the final time:
// |q_dt - q_{dt/2}| / 15.
double step_doubling_error(const GeometryBundle& bundle, PathKind kind, const Point& q0, const Vector& v0,
                           double duration, double dt);

// g_{mu nu}(q) v^mu v^nu
double kinetic_invariant(const GeometryBundle& bundle, const Point& q, const Vector& v);

// L = (M/2) g_{mu nu} qdot^mu qdot^nu at every sample.
std::vector<double> lagrangian_samples(const GeometryBundle& bundle, const Trajectory& traj, double mass);

// Composite Simpson rule on uniform samples; a trailing odd interval is
// closed with the 3/8 rule. Needs at least two samples.
double simpson(const std::vector<double>& y, double h);

double evaluate_action(const GeometryBundle& bundle, const Trajectory& traj, double mass);

struct ElResidual {
  std::vector<double> t;
  std::vector<Vector> r;
  double max_norm = 0.0;
};

// dL/dq_lam - d/dt dL/dqdot^lam - 2 S_{lam mu}^nu qdot^mu dL/dqdot^nu at the
// interior samples 2..N-2; the time derivative is the five-point central
// difference of the momentum. Throws GridTooCoarse below five samples.
ElResidual modified_el_residual(const GeometryBundle& bundle, const Trajectory& traj, double mass);

// 2 M S_{lam mu}^nu qdot^mu g_{nu kappa} qdot^kappa at every sample.
std::vector<Vector> torsion_force(const GeometryBundle& bundle, const Trajectory& traj, double mass);

// Geodesic minus autoparallel acceleration for the same velocity.
Vector acceleration_difference(const ConnectionData& c, const Vector& v);

struct VariationRecord {
  std::vector<double> t;
  std::vector<Vector> dq;
  std::vector<Vector> db;
  std::vector<Matrix> G;
  std::vector<Matrix> Sigma;
};

// G^mu_lam = Gamma_{lam nu}^mu qdot^nu and Sigma^mu_nu = 2 S_{lam nu}^mu qdot^lam
// along the trajectory.
void variation_coefficients(const GeometryBundle& bundle, const Trajectory& traj, std::vector<Matrix>& G,
                            std::vector<Matrix>& Sigma);

// RK4 for d/dt db = -G db + Sigma dq, db(t_0) = 0, with G, Sigma and dq
// interpolated linearly between grid points.
std::vector<Vector> solve_closure_ode(const std::vector<double>& t, const std::vector<Matrix>& G,
                                      const std::vector<Matrix>& Sigma, const std::vector<Vector>& dq);

// db(t) = integral U(t, t') Sigma dq dt' with U the time-ordered exponential
// of -G, built as an ordered product of exp(-G h) over `substeps` sub-steps
// per grid interval (G sampled at sub-step midpoints). `substeps` must be even.
std::vector<Vector> solve_closure_time_ordered(const std::vector<double>& t, const std::vector<Matrix>& G,
                                               const std::vector<Matrix>& Sigma, const std::vector<Vector>& dq,
                                               int substeps = 16);

// Throws GridMismatch when dq does not match the trajectory grid and
// ValidationError when dq does not vanish at the endpoints.
VariationRecord nonholonomic_variation(const GeometryBundle& bundle, const Trajectory& traj,
                                       const std::vector<Vector>& dq);
VariationRecord variation_closed_form(const GeometryBundle& bundle, const Trajectory& traj,
                                      const std::vector<Vector>& dq, int substeps = 16);

// dq(t) = amplitude * sin^2(pi (t - t_0) / (t_N - t_0)) on the trajectory grid.
std::vector<Vector> bump_variation(const Trajectory& traj, const Vector& amplitude);

}  // namespace torsiongeo
