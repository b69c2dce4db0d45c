// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "torsiongeo/short_time.hpp"

#include <cmath>
#include <numbers>

#include "torsiongeo/error.hpp"

namespace torsiongeo {

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::postpoint: return "postpoint";
    case Scheme::prepoint: return "prepoint";
    case Scheme::midpoint: return "midpoint";
  }
  return "postpoint";
}

std::string_view to_string(Measure m) { return m == Measure::qep ? "qep" : "naive-dewitt"; }

std::string_view to_string(TimeContour c) { return c == TimeContour::euclidean ? "euclidean" : "real-time"; }

void SliceConfig::validate() const {
  if (slices < 1) fail(ErrorKind::ValidationError, "'N' must be at least 1");
  if (!(eps > 0.0) || !std::isfinite(eps)) fail(ErrorKind::ValidationError, "'eps' must be positive");
  if (order < 2 || order > 4) fail(ErrorKind::ValidationError, "'order' must be 2, 3 or 4");
  particle.validate();
}

ExpansionCoefficients ExpansionCoefficients::at(const PointGeometry& pg) {
  ExpansionCoefficients c;
  const int d = static_cast<int>(pg.q.size());
  c.base = pg.q;
  c.e = pg.connection.metric.e;
  c.g = pg.connection.metric.g;
  c.gamma = pg.connection.gamma;
  const Tensor& dg = pg.curvature.d_gamma;
  c.third = Tensor({d, d, d, d});
  for (int mu = 0; mu < d; ++mu) {
    for (int nu = 0; nu < d; ++nu) {
      for (int sig = 0; sig < d; ++sig) {
        for (int lam = 0; lam < d; ++lam) {
          double s = dg(sig, mu, nu, lam);
          for (int tau = 0; tau < d; ++tau) {
            s += c.gamma(mu, nu, tau) * 0.5 * (c.gamma(sig, tau, lam) + c.gamma(tau, sig, lam));
          }
          c.third(mu, nu, sig, lam) = s;
        }
      }
    }
  }
  return c;
}

Vector ExpansionCoefficients::gamma_contract(const Vector& a, const Vector& b) const {
  const int d = static_cast<int>(a.size());
  Vector out = Vector::Zero(d);
  for (int mu = 0; mu < d; ++mu) {
    for (int nu = 0; nu < d; ++nu) {
      const double w = a[mu] * b[nu];
      for (int lam = 0; lam < d; ++lam) out[lam] += gamma(mu, nu, lam) * w;
    }
  }
  return out;
}

Vector ExpansionCoefficients::third_contract(const Vector& dq) const {
  const int d = static_cast<int>(dq.size());
  Vector out = Vector::Zero(d);
  for (int mu = 0; mu < d; ++mu) {
    for (int nu = 0; nu < d; ++nu) {
      for (int sig = 0; sig < d; ++sig) {
        const double w = dq[mu] * dq[nu] * dq[sig];
        for (int lam = 0; lam < d; ++lam) out[lam] += third(mu, nu, sig, lam) * w;
      }
    }
  }
  return out;
}

namespace {

// Chart-space step u with Delta x = e u.
Vector chart_step(const ExpansionCoefficients& c, const Vector& dq, int order) {
  Vector u = dq;
  if (order >= 2) u -= 0.5 * c.gamma_contract(dq, dq);
  if (order >= 3) u += c.third_contract(dq) / 6.0;
  return u;
}

}  // namespace

Vector delta_x_expansion(const ExpansionCoefficients& c, const Vector& dq, int order) {
  if (order < 1 || order > 3) fail(ErrorKind::ValidationError, "Delta x expansion order must be 1, 2 or 3");
  return c.e * chart_step(c, dq, order);
}

Vector delta_x_expansion(const GeometryBundle& bundle, const Point& q, const Vector& dq, int order) {
  const auto pg = bundle.at(q);
  return delta_x_expansion(ExpansionCoefficients::at(*pg), dq, order);
}

ActionTerms postpoint_action(const ExpansionCoefficients& c, const Vector& dq, double eps, double mass, int order) {
  const int d = static_cast<int>(dq.size());
  const double pre = mass / (2.0 * eps);
  ActionTerms a;
  a.base = c.base;
  a.dq = dq;
  a.cubic_coefficient = Tensor({d, d, d});
  a.quartic_coefficient = Tensor({d, d, d, d});
  // Gamma_{mu nu lam} = Gamma_{mu nu}^k g_{k lam}
  const Tensor gamma_low = lower_last(c.gamma, c.g);
  for (int mu = 0; mu < d; ++mu) {
    for (int nu = 0; nu < d; ++nu) {
      for (int lam = 0; lam < d; ++lam) a.cubic_coefficient(mu, nu, lam) = -pre * gamma_low(mu, nu, lam);
    }
  }
  // (1/3) g_{mu tau} third(lam, nu, kap, tau) + (1/4) Gamma_{lam kap}^s Gamma_{mu nu s}
  for (int mu = 0; mu < d; ++mu) {
    for (int nu = 0; nu < d; ++nu) {
      for (int lam = 0; lam < d; ++lam) {
        for (int kap = 0; kap < d; ++kap) {
          double s = 0.0;
          for (int tau = 0; tau < d; ++tau) {
            s += c.g(mu, tau) * c.third(lam, nu, kap, tau) / 3.0 + 0.25 * c.gamma(lam, kap, tau) * gamma_low(mu, nu, tau);
          }
          a.quartic_coefficient(mu, nu, lam, kap) = pre * s;
        }
      }
    }
  }
  a.quadratic = pre * dq.dot(c.g * dq);
  if (order >= 3) {
    const Vector u = c.gamma_contract(dq, dq);
    a.cubic = -pre * u.dot(c.g * dq);
  }
  if (order >= 4) {
    const Vector u = c.gamma_contract(dq, dq);
    const Vector w = c.third_contract(dq);
    a.quartic = pre * (dq.dot(c.g * w) / 3.0 + 0.25 * u.dot(c.g * u));
  }
  a.total = a.quadratic + a.cubic + a.quartic;
  return a;
}

ActionTerms midpoint_action(const PointGeometry& mid, const Vector& dq, double eps, double mass, int order) {
  const ExpansionCoefficients c = ExpansionCoefficients::at(mid);
  const int d = static_cast<int>(dq.size());
  const double pre = mass / (2.0 * eps);
  const Tensor& dgam = mid.curvature.d_gamma;
  ActionTerms a;
  a.base = mid.q;
  a.dq = dq;
  a.cubic_coefficient = Tensor({d, d, d});
  a.quartic_coefficient = Tensor({d, d, d, d});
  // (1/12) g_{mu tau} d_kap Gamma_{nu lam}^tau
  //   + (1/6) g_{mu tau} Gamma_{s kap}^tau Gamma_{nu lam}^s
  //   - (1/12) g_{mu tau} Gamma_{kap s}^tau Gamma_{nu lam}^s
  for (int mu = 0; mu < d; ++mu) {
    for (int nu = 0; nu < d; ++nu) {
      for (int lam = 0; lam < d; ++lam) {
        for (int kap = 0; kap < d; ++kap) {
          double s = 0.0;
          for (int tau = 0; tau < d; ++tau) {
            double inner = dgam(kap, nu, lam, tau) / 12.0;
            for (int sg = 0; sg < d; ++sg) {
              inner += c.gamma(nu, lam, sg) * (c.gamma(sg, kap, tau) / 6.0 - c.gamma(kap, sg, tau) / 12.0);
            }
            s += c.g(mu, tau) * inner;
          }
          a.quartic_coefficient(mu, nu, lam, kap) = pre * s;
        }
      }
    }
  }
  a.quadratic = pre * dq.dot(c.g * dq);
  if (order >= 4) {
    const Vector u = c.gamma_contract(dq, dq);
    const Vector gdq = c.g * dq;
    Vector dgam3 = Vector::Zero(d);
    for (int sig = 0; sig < d; ++sig) {
      for (int mu = 0; mu < d; ++mu) {
        for (int nu = 0; nu < d; ++nu) {
          const double w = dq[sig] * dq[mu] * dq[nu];
          for (int lam = 0; lam < d; ++lam) dgam3[lam] += dgam(sig, mu, nu, lam) * w;
        }
      }
    }
    const double x1 = gdq.dot(c.gamma_contract(u, dq));
    const double x2 = gdq.dot(c.gamma_contract(dq, u));
    a.quartic = pre * (gdq.dot(dgam3) / 12.0 + x1 / 6.0 - x2 / 12.0);
  }
  a.total = a.quadratic + a.quartic;
  return a;
}

ActionTerms short_time_action(const GeometryBundle& bundle, const Point& q, const Vector& dq,
                              const SliceConfig& config) {
  config.validate();
  const double eps = config.eps;
  const double mass = config.particle.mass;
  switch (config.scheme) {
    case Scheme::postpoint: {
      const auto pg = bundle.at(q);
      return postpoint_action(ExpansionCoefficients::at(*pg), dq, eps, mass, config.order);
    }
    case Scheme::prepoint: {
      const Point qp = q - dq;
      const auto pg = bundle.at(qp);
      return postpoint_action(ExpansionCoefficients::at(*pg), -dq, eps, mass, config.order);
    }
    case Scheme::midpoint: {
      const auto pg = bundle.at(q - 0.5 * dq);
      return midpoint_action(*pg, dq, eps, mass, config.order);
    }
  }
  fail(ErrorKind::ValidationError, "unknown scheme");
}

// ---------------------------------------------------------------------------

namespace {

// Integrates the autoparallel from (q, v) over time `duration` (may be
// negative) and returns the end point.
Point shoot(const GeometryBundle& bundle, const Point& q0, const Vector& v0, double duration, int substeps) {
  const double h = duration / substeps;
  Point q = q0;
  Vector v = v0;
  auto acc = [&](const Point& at, const Vector& vel) {
    return path_acceleration(bundle.connection(at), PathKind::autoparallel, vel);
  };
  for (int k = 0; k < substeps; ++k) {
    const Vector a1 = acc(q, v);
    const Vector q2 = q + 0.5 * h * v, v2 = v + 0.5 * h * a1;
    const Vector a2 = acc(q2, v2);
    const Vector q3 = q + 0.5 * h * v2, v3 = v + 0.5 * h * a2;
    const Vector a3 = acc(q3, v3);
    const Vector q4 = q + h * v3, v4 = v + h * a3;
    const Vector a4 = acc(q4, v4);
    q += (h / 6.0) * (v + 2.0 * v2 + 2.0 * v3 + v4);
    v += (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
  }
  return q;
}

}  // namespace

Vector classical_orbit_velocity(const GeometryBundle& bundle, const Point& q_from, const Point& q_to, double eps,
                                const OrbitOptions& options) {
  if (!(eps > 0.0)) fail(ErrorKind::ValidationError, "'eps' must be positive");
  const int d = bundle.dimension();
  Vector v = (q_to - q_from) / eps;
  const double scale = (q_to - q_from).norm() + 1e-300;
  for (int it = 0; it < options.max_iterations; ++it) {
    const Vector f = shoot(bundle, q_to, v, -eps, options.substeps) - q_from;
    if (!f.allFinite()) break;
    if (f.norm() <= options.tolerance * scale) return v;
    Matrix jac(d, d);
    for (int a = 0; a < d; ++a) {
      const double h = 1e-7 * (std::abs(v[a]) + v.norm() + 1e-12);
      Vector vp = v, vm = v;
      vp[a] += h;
      vm[a] -= h;
      jac.col(a) = (shoot(bundle, q_to, vp, -eps, options.substeps) - shoot(bundle, q_to, vm, -eps, options.substeps)) /
                   (2.0 * h);
    }
    const Vector step = jac.fullPivLu().solve(f);
    if (!step.allFinite()) break;
    v -= step;
  }
  fail(ErrorKind::NoConvergence, "shooting did not converge; endpoints may lie outside the normal neighbourhood");
}

double classical_orbit_action(const GeometryBundle& bundle, const Point& q_from, const Point& q_to, double eps,
                              double mass, const OrbitOptions& options) {
  const Vector v = classical_orbit_velocity(bundle, q_from, q_to, eps, options);
  return 0.5 * mass * eps * kinetic_invariant(bundle, q_to, v);
}

std::complex<double> free_particle_kernel(double dx2, int dim, double t, const ParticleParams& p,
                                          TimeContour contour) {
  using namespace std::complex_literals;
  // Euclidean time t, or real time t entering as t_E = i t.
  const std::complex<double> te = contour == TimeContour::euclidean ? std::complex<double>(t) : 1i * t;
  const std::complex<double> norm = std::pow(2.0 * std::numbers::pi * p.hbar * te / p.mass, -0.5 * dim);
  return norm * std::exp(-p.mass * dx2 / (2.0 * p.hbar * te));
}

PhaseSpaceCheck phase_space_kernel_check(const GeometryBundle& bundle, const Point& q, const Vector& dq, double eps,
                                         double mass, double hbar) {
  ParticleParams{mass, hbar}.validate();
  const MetricData m = bundle.metric(q);
  const int d = static_cast<int>(dq.size());
  PhaseSpaceCheck out;
  out.configuration_kernel = std::pow(2.0 * std::numbers::pi * hbar * eps / mass, -0.5 * d) *
                             std::exp(-mass * dq.dot(m.g * dq) / (2.0 * hbar * eps));
  // Each eigen-direction of g^{-1} contributes the one-dimensional integral
  // int dp exp(i p y / hbar - eps lam p^2 / 2 M hbar) = sqrt(2 pi M hbar / eps lam) exp(-M y^2 / 2 hbar eps lam).
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.g_inv);
  const Vector y = es.eigenvectors().transpose() * dq;
  double log_integral = 0.0;
  for (int k = 0; k < d; ++k) {
    const double lam = es.eigenvalues()[k];
    log_integral += 0.5 * std::log(2.0 * std::numbers::pi * mass * hbar / (eps * lam)) -
                    mass * y[k] * y[k] / (2.0 * hbar * eps * lam);
  }
  log_integral -= d * std::log(2.0 * std::numbers::pi * hbar) + std::log(m.sqrt_g);
  out.momentum_kernel = std::exp(log_integral);
  out.residual = std::abs(out.momentum_kernel - out.configuration_kernel) / out.configuration_kernel;
  return out;
}

}  // namespace torsiongeo
