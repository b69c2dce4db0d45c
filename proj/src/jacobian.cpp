// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "torsiongeo/short_time.hpp"

#include <cmath>

#include "torsiongeo/error.hpp"

namespace torsiongeo {

std::string_view to_string(JacobianForm f) {
  switch (f) {
    case JacobianForm::affine_trace: return "naive-affine";
    case JacobianForm::christoffel_trace: return "naive-christoffel";
    case JacobianForm::triad_determinant: return "naive-triad";
    case JacobianForm::qep: return "qep";
  }
  return "qep";
}

JacobianAction jacobian_coefficients(const PointGeometry& pg, JacobianForm form, bool symmetrize) {
  const ConnectionData& c = pg.connection;
  const CurvatureData& k = pg.curvature;
  const int d = static_cast<int>(pg.q.size());
  JacobianAction j;
  j.linear = Vector::Zero(d);
  j.quadratic = Matrix::Zero(d, d);
  switch (form) {
    case JacobianForm::affine_trace:
    case JacobianForm::christoffel_trace: {
      const Tensor& gam = form == JacobianForm::affine_trace ? c.gamma : c.christoffel;
      const Tensor& dgam = form == JacobianForm::affine_trace ? k.d_gamma : k.d_christoffel;
      for (int mu = 0; mu < d; ++mu) {
        for (int nu = 0; nu < d; ++nu) j.linear[mu] -= gam(mu, nu, nu);
        for (int nu = 0; nu < d; ++nu) {
          for (int kap = 0; kap < d; ++kap) j.quadratic(mu, nu) += 0.5 * dgam(mu, nu, kap, kap);
        }
      }
      break;
    }
    case JacobianForm::triad_determinant: {
      // log sqrt g(q - dq) - log sqrt g(q) from tr(e^+ d e) and its derivative.
      const int n = static_cast<int>(c.metric.e.rows());
      for (int mu = 0; mu < d; ++mu) {
        for (int kap = 0; kap < d; ++kap) {
          for (int i = 0; i < n; ++i) j.linear[mu] -= c.metric.e_inv(kap, i) * c.de(i, kap, mu);
        }
        for (int nu = 0; nu < d; ++nu) {
          double s = 0.0;
          for (int kap = 0; kap < d; ++kap) {
            for (int i = 0; i < n; ++i) {
              s += c.d_e_inv(kap, i, mu) * c.de(i, kap, nu) + c.metric.e_inv(kap, i) * k.dde(i, kap, nu, mu);
            }
          }
          j.quadratic(mu, nu) = 0.5 * s;
        }
      }
      break;
    }
    case JacobianForm::qep: {
      const ExpansionCoefficients ec = ExpansionCoefficients::at(pg);
      // Gamma_{(mu nu)}^lam, or Gamma itself without symmetrization.
      Tensor gs({d, d, d});
      for (int mu = 0; mu < d; ++mu) {
        for (int nu = 0; nu < d; ++nu) {
          for (int lam = 0; lam < d; ++lam) {
            gs(mu, nu, lam) = symmetrize ? 0.5 * (c.gamma(mu, nu, lam) + c.gamma(nu, mu, lam)) : c.gamma(mu, nu, lam);
          }
        }
      }
      // third symmetrized over its three lower indices.
      Tensor ts({d, d, d, d});
      if (symmetrize) {
        for (int a = 0; a < d; ++a) {
          for (int b = 0; b < d; ++b) {
            for (int s = 0; s < d; ++s) {
              for (int lam = 0; lam < d; ++lam) {
                ts(a, b, s, lam) = (ec.third(a, b, s, lam) + ec.third(a, s, b, lam) + ec.third(b, a, s, lam) +
                                    ec.third(b, s, a, lam) + ec.third(s, a, b, lam) + ec.third(s, b, a, lam)) / 6.0;
              }
            }
          }
        }
      } else {
        for (int a = 0; a < d; ++a) {
          for (int b = 0; b < d; ++b) {
            for (int s = 0; s < d; ++s) {
              for (int lam = 0; lam < d; ++lam) {
                double v = k.d_gamma(s, a, b, lam);
                for (int tau = 0; tau < d; ++tau) v += c.gamma(a, b, tau) * c.gamma(s, tau, lam);
                ts(a, b, s, lam) = v;
              }
            }
          }
        }
      }
      // log det(1 + X), X^lam_mu = -gs(mu nu lam) dq^nu + (1/2) ts(mu nu s lam) dq^nu dq^s
      for (int nu = 0; nu < d; ++nu) {
        for (int lam = 0; lam < d; ++lam) j.linear[nu] -= gs(lam, nu, lam);
        for (int s = 0; s < d; ++s) {
          double v = 0.0;
          for (int lam = 0; lam < d; ++lam) {
            v += 0.5 * ts(lam, nu, s, lam);
            for (int mu = 0; mu < d; ++mu) v -= 0.5 * gs(mu, nu, lam) * gs(lam, s, mu);
          }
          j.quadratic(nu, s) = v;
        }
      }
      break;
    }
  }
  j.quadratic = 0.5 * (j.quadratic + j.quadratic.transpose()).eval();
  return j;
}

double evaluate(const JacobianAction& j, const Vector& dq) { return j.linear.dot(dq) + dq.dot(j.quadratic * dq); }

JacobianAction jacobian_actions(const GeometryBundle& bundle, const Point& q, const Vector& dq, JacobianForm form) {
  const auto pg = bundle.at(q);
  JacobianAction j = jacobian_coefficients(*pg, form);
  j.value = evaluate(j, dq);
  return j;
}

JacobianAction delta_jacobian_action(const GeometryBundle& bundle, const Point& q, const Vector& dq) {
  const auto pg = bundle.at(q);
  const JacobianAction qep = jacobian_coefficients(*pg, JacobianForm::qep);
  const JacobianAction naive = jacobian_coefficients(*pg, JacobianForm::affine_trace);
  JacobianAction diff;
  diff.linear = qep.linear - naive.linear;
  diff.quadratic = qep.quadratic - naive.quadratic;
  diff.value = evaluate(diff, dq);
  return diff;
}

EffectivePotential effective_potential(const GeometryBundle& bundle, const Point& q, double mass, double hbar) {
  ParticleParams{mass, hbar}.validate();
  const auto pg = bundle.at(q);
  EffectivePotential v;
  v.scalar_curvature = pg->curvature.scalar_bar;
  v.value = -hbar * hbar * v.scalar_curvature / (6.0 * mass);
  v.torsion_present = pg->connection.torsion.max_abs() > bundle.tolerances().analytic;
  return v;
}

double expectation_contraction(const Matrix& quadratic, const Matrix& g_inv, double eps, double hbar, double mass) {
  return eps * hbar / mass * quadratic.cwiseProduct(g_inv).sum();
}

}  // namespace torsiongeo
