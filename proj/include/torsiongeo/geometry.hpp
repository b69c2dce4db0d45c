// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

// Metric-affine quantities derived from a triad field.
//
// Index conventions (all tensors are stored in the order written):
//   gamma(mu, nu, lam)            Gamma_{mu nu}^lam = e_i^lam d_mu e^i_nu
//   christoffel(mu, nu, lam)      Christoffel symbol of the induced metric
//   torsion(mu, nu, lam)          S_{mu nu}^lam, antisymmetric in (mu, nu)
//   contortion(mu, nu, lam)       K_{mu nu}^lam; K_{mu nu lam} is
//                                 antisymmetric in (nu, lam)
//   dg(mu, nu, lam)               d_lam g_{mu nu}
//   d_gamma(sig, mu, nu, lam)     d_sig Gamma_{mu nu}^lam
//   cartan / riemann(mu,nu,lam,k) R_{mu nu lam}^k
//                                 = d_mu Gamma_{nu lam}^k - d_nu Gamma_{mu lam}^k
//                                   - (Gamma_{mu lam}^s Gamma_{nu s}^k
//                                      - Gamma_{nu lam}^s Gamma_{mu s}^k)
//   ricci(nu, lam)                R_{mu nu lam}^mu

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <vector>

#include "torsiongeo/tensor.hpp"
#include "torsiongeo/triad.hpp"

namespace torsiongeo {

struct Tolerances {
  double analytic = 1e-10;
  double finite_difference = 1e-5;
};

struct MetricData {
  Matrix e;        // n x D, e^i_mu
  Matrix e_inv;    // D x n, e_inv(mu, i) = e_i^mu
  Matrix g;        // g_{mu nu}
  Matrix g_inv;    // g^{mu nu}
  double det_g = 0.0;
  double sqrt_g = 0.0;
};

struct ConnectionData {
  MetricData metric;
  Tensor de;            // d_eval of the triad
  Tensor d_e_inv;       // (mu, i, lam) = d_lam e_i^mu
  Tensor dg;
  Tensor gamma;
  Tensor gamma_alt;     // -e^i_nu d_mu e_i^lam, equal to gamma
  Tensor christoffel;
  Tensor torsion;
  Vector torsion_vector;  // S_mu = S_{mu lam}^lam
  Tensor contortion;
  bool torsion_defined = true;
};

struct CurvatureData {
  Tensor dde;
  Tensor ddg;               // (mu, nu, lam, sig) = d_lam d_sig g_{mu nu}
  Tensor d_gamma;
  Tensor d_christoffel;
  Tensor cartan;            // from the affine connection
  Tensor riemann;           // from the Christoffel symbol
  Matrix ricci;
  Matrix ricci_bar;
  double scalar = 0.0;
  double scalar_bar = 0.0;
  Matrix einstein;
  Matrix einstein_bar;
};

struct PointGeometry {
  Point q;
  ConnectionData connection;
  CurvatureData curvature;
};

// e_i^mu as a D x n matrix. Throws SingularTriad below the triad's threshold.
Matrix reciprocal_triad(const TriadField& triad, const Point& q);
MetricData induced_metric(const TriadField& triad, const Point& q);
ConnectionData connection_bundle(const TriadField& triad, const Point& q);
CurvatureData curvature_bundle(const TriadField& triad, const Point& q, const ConnectionData& conn);
PointGeometry point_geometry(const TriadField& triad, const Point& q);

// Right-hand side of R = Rbar + Dbar K - Dbar K - [K, K] evaluated from the
// Christoffel curvature and contortion derivatives obtained directly from
// the triad (torsion derivatives are not routed through d_gamma).
Tensor curvature_from_decomposition(const TriadField& triad, const PointGeometry& pg);

// Explicit index helpers. lower_last: T_{.. lam} = T_{..}^k g_{k lam};
// raise_last is the inverse.
Tensor lower_last(const Tensor& t, const Matrix& g);
Tensor raise_last(const Tensor& t, const Matrix& g_inv);

// Thread-safe per-point evaluator. With caching enabled, results are keyed by
// the exact coordinates and shared between readers.
class GeometryBundle {
 public:
  explicit GeometryBundle(TriadPtr triad, bool cache = false, Tolerances tol = {});

  const TriadField& triad() const { return *triad_; }
  const TriadPtr& triad_ptr() const { return triad_; }
  int dimension() const { return triad_->dimension(); }
  const Tolerances& tolerances() const { return tol_; }

  MetricData metric(const Point& q) const { return induced_metric(*triad_, q); }
  ConnectionData connection(const Point& q) const { return connection_bundle(*triad_, q); }
  std::shared_ptr<const PointGeometry> at(const Point& q) const;

  bool caching() const { return cache_enabled_; }
  std::size_t cache_size() const;
  void clear_cache() const;

 private:
  TriadPtr triad_;
  bool cache_enabled_;
  Tolerances tol_;
  mutable std::shared_mutex mutex_;
  mutable std::map<std::vector<double>, std::shared_ptr<const PointGeometry>> cache_;
};

enum class ConnectionKind { riemann, affine };

// Tensor field of rank 0..3. `gradient`, when present, returns
// (sig, slots...) = d_sig T(slots...); otherwise central differences with
// step h (1 + |q_sig|) are used.
struct TensorField {
  std::vector<IndexPosition> signature;
  std::function<Tensor(const Point&)> value;
  std::function<Tensor(const Point&)> gradient;
};

// Covariant derivative with the Christoffel symbol (riemann) or the affine
// connection (affine). The result carries an extra lower index in front:
// out(sig, slots...) = D_sig T(slots...).
TensorValue covariant_derivative(const GeometryBundle& bundle, const TensorField& field, const Point& q,
                                 ConnectionKind mode, double fd_step = kDefaultFdStep);

// g_{mu nu} as a field with its analytic gradient.
TensorField metric_field(const GeometryBundle& bundle);

}  // namespace torsiongeo
