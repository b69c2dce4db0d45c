// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

// Built-in geometries with hand-coded analytic derivatives.
//
//   flat-cartesian(D)       identity triad
//   polar                   x = (r cos phi, r sin phi), chart (r, phi)
//   sphere(a)               embedding in R^3, chart (theta, phi)
//   circle(a)               embedding in R^2, chart (phi)
//   dislocation(epsilon)    x^2 = q^2 + (epsilon / 2 pi) phi(q)
//   disclination(Omega)     x^i = q^i + Omega eps_{i nu} q^nu phi(q)
//   constant-torsion-toy(S0) curvilinear chart plus a constant anholonomy
//                           in the (q1, q2) plane of the third flat direction

#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "torsiongeo/triad.hpp"

namespace torsiongeo {

// Triad given by the derivatives of a chart map x^i(q). Subclasses supply
// mixed partials of x^i; orders[a] is the number of derivatives along axis a.
class ChartMapTriad : public TriadField {
 public:
  Matrix eval(const Point& q) const override;
  Tensor d_eval(const Point& q) const override;
  Tensor dd_eval(const Point& q) const override;

  virtual double partial(const Point& q, int i, const std::array<int, 3>& orders) const = 0;
};

// Partial derivatives of the polar angle phi = atan2(y, x) at (x, y):
// jet[a][b] = d^a/dx^a d^b/dy^b phi for 1 <= a + b <= 4; jet[0][0] is the
// principal value.
using AngleJet = std::array<std::array<double, 5>, 5>;
AngleJet angle_jet(double x, double y);

class DisclinationTriad final : public ChartMapTriad {
 public:
  explicit DisclinationTriad(double omega) : omega_(omega) {}

  std::string name() const override { return "disclination"; }
  int dimension() const override { return 2; }
  bool holonomic() const override { return false; }
  double partial(const Point& q, int i, const std::array<int, 3>& orders) const override;

  // Triad with the angle replaced by a continued branch value `phi`.
  Matrix eval_on_branch(const Point& q, double phi) const;
  double omega() const { return omega_; }

 private:
  double partial_on_branch(const Point& q, double phi, int i, const std::array<int, 3>& orders) const;

  double omega_;
};

// Disclination metric g = delta - 2 Omega t t^T / |q|^2, t = (q2, -q1),
// exact to first order in Omega.
Matrix disclination_metric(double omega, const Point& q);

TriadPtr flat_cartesian(int dim);
TriadPtr polar();
TriadPtr sphere(double a);
TriadPtr circle(double a);
TriadPtr dislocation(double epsilon);
TriadPtr disclination(double omega);
TriadPtr constant_torsion_toy(double s0);

struct CatalogEntry {
  std::string name;
  std::vector<std::string> parameters;
};

const std::vector<CatalogEntry>& catalog();

// Builds a catalog triad from its name and named parameters. Unknown names
// and out-of-range parameters raise ValidationError naming the key.
TriadPtr make_catalog_triad(const std::string& name, const std::map<std::string, double>& params);

}  // namespace torsiongeo
