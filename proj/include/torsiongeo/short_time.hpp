// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

// Short-time expansion of one time slice: the image Delta x of a chart step
// Delta q, the sliced action in the three expansion schemes, and the
// Jacobian (measure) exponents.

#pragma once

#include <complex>
#include <string_view>

#include "torsiongeo/dynamics.hpp"
#include "torsiongeo/geometry.hpp"

namespace torsiongeo {

enum class Scheme { postpoint, prepoint, midpoint };
enum class Measure { qep, naive_dewitt };
enum class TimeContour { euclidean, real_time };

std::string_view to_string(Scheme s);
std::string_view to_string(Measure m);
std::string_view to_string(TimeContour c);

struct SliceConfig {
  int slices = 1;
  double eps = 0.01;
  ParticleParams particle;
  Scheme scheme = Scheme::postpoint;
  int order = 4;
  TimeContour contour = TimeContour::euclidean;
  Measure measure = Measure::qep;
  // Adds eps * V_eff to the naive-measure exponent.
  bool effective_potential = false;

  void validate() const;
};

// Coefficients of the postpoint expansion at one base point.
//   third(mu, nu, sig, lam) = d_sig Gamma_{mu nu}^lam
//                             + Gamma_{mu nu}^tau Gamma_{(sig tau)}^lam
struct ExpansionCoefficients {
  Point base;
  Matrix e;
  Matrix g;
  Tensor gamma;
  Tensor third;

  static ExpansionCoefficients at(const PointGeometry& pg);

  // Gamma_{mu nu}^lam a^mu b^nu
  Vector gamma_contract(const Vector& a, const Vector& b) const;
  // third(...)^lam dq dq dq
  Vector third_contract(const Vector& dq) const;
};

// Delta x^i = e^i_lam(q) [dq - Gamma dq dq / 2 + third dq dq dq / 6]^lam,
// truncated after the term of degree `order` in dq (order 1..3).
Vector delta_x_expansion(const ExpansionCoefficients& c, const Vector& dq, int order);
Vector delta_x_expansion(const GeometryBundle& bundle, const Point& q, const Vector& dq, int order);

struct ActionTerms {
  Point base;
  Vector dq;
  double quadratic = 0.0;
  double cubic = 0.0;
  double quartic = 0.0;
  Tensor cubic_coefficient;    // A_3(mu, nu, lam) dq^mu dq^nu dq^lam
  Tensor quartic_coefficient;  // A_4(mu, nu, lam, kap) dq^4
  double total = 0.0;
};

// Postpoint action (M / 2 eps)[g dq dq - Gamma_{mu nu lam} dq^3 + quartic]
// about base point q.
ActionTerms postpoint_action(const ExpansionCoefficients& c, const Vector& dq, double eps, double mass, int order);

// Midpoint action about q_mid = q - dq/2: (M / 2 eps)[g dq dq + quartic], no
// cubic term.
ActionTerms midpoint_action(const PointGeometry& mid, const Vector& dq, double eps, double mass, int order);

// Dispatches on config.scheme. `q` is the postpoint; the prepoint scheme
// expands about q - dq with -dq, the midpoint scheme about q - dq / 2.
ActionTerms short_time_action(const GeometryBundle& bundle, const Point& q, const Vector& dq,
                              const SliceConfig& config);

struct OrbitOptions {
  int substeps = 64;
  int max_iterations = 50;
  double tolerance = 1e-13;
};

// Action of the autoparallel that runs from q_from to q_to in time eps,
// found by shooting backwards from q_to: (M / 2) eps g(q_to) v v with v the
// postpoint velocity. Throws NoConvergence when the shooting fails.
double classical_orbit_action(const GeometryBundle& bundle, const Point& q_from, const Point& q_to, double eps,
                              double mass, const OrbitOptions& options = {});

// Postpoint velocity of the same orbit.
Vector classical_orbit_velocity(const GeometryBundle& bundle, const Point& q_from, const Point& q_to, double eps,
                                const OrbitOptions& options = {});

enum class JacobianForm {
  affine_trace,       // log of the volume ratio via Gamma_{mu nu}^nu
  christoffel_trace,  // same via the Christoffel trace (log sqrt g)
  triad_determinant,  // directly from the triad and its derivatives
  qep,                // log det of d(Delta x)/d(Delta q), symmetrized
};

std::string_view to_string(JacobianForm f);

// Euclidean exponent contribution j = linear . dq + dq^T quadratic dq.
struct JacobianAction {
  Vector linear;
  Matrix quadratic;  // symmetric
  double value = 0.0;
};

JacobianAction jacobian_coefficients(const PointGeometry& pg, JacobianForm form, bool symmetrize = true);
JacobianAction jacobian_actions(const GeometryBundle& bundle, const Point& q, const Vector& dq, JacobianForm form);
double evaluate(const JacobianAction& j, const Vector& dq);

// QEP minus affine-trace exponent.
JacobianAction delta_jacobian_action(const GeometryBundle& bundle, const Point& q, const Vector& dq);

struct EffectivePotential {
  double value = 0.0;
  double scalar_curvature = 0.0;
  bool torsion_present = false;
};

// -hbar^2 Rbar / (6 M); flags points where the torsion does not vanish.
EffectivePotential effective_potential(const GeometryBundle& bundle, const Point& q, double mass, double hbar);

// quadratic_{mu nu} <dq^mu dq^nu> with <dq dq> = eps hbar g^{mu nu} / M.
double expectation_contraction(const Matrix& quadratic, const Matrix& g_inv, double eps, double hbar, double mass);

// Free-particle kernel (M / 2 pi hbar t)^{D/2} exp(-M dx^2 / 2 hbar t) on the
// Euclidean contour, and its analytic continuation t -> i t for real time.
std::complex<double> free_particle_kernel(double dx2, int dim, double t, const ParticleParams& p, TimeContour contour);

struct PhaseSpaceCheck {
  double configuration_kernel = 0.0;
  double momentum_kernel = 0.0;
  double residual = 0.0;  // relative difference
};

// Gaussian momentum integral over d^D p / ((2 pi hbar)^D sqrt g(q)) done in
// the eigenbasis of g^{-1}, compared with the quadratic configuration-space
// kernel (2 pi hbar eps / M)^{-D/2} exp(-M g dq dq / 2 hbar eps).
PhaseSpaceCheck phase_space_kernel_check(const GeometryBundle& bundle, const Point& q, const Vector& dq, double eps,
                                         double mass, double hbar);

}  // namespace torsiongeo
