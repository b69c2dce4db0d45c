// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "torsiongeo/tensor.hpp"

namespace torsiongeo {

enum class DerivativeMode { analytic, finite_difference };

// A basis field e^i_mu(q) mapping chart differentials dq^mu to flat
// differentials dx^i. The triad may be square (flat_dimension == dimension)
// or an embedding with more rows than chart dimensions; in the latter case
// e_i^mu is the pseudo-inverse (e^T e)^{-1} e^T.
//
// Derivative layout:
//   d_eval(q)(i, mu, nu)        = d_nu e^i_mu
//   dd_eval(q)(i, mu, nu, lam)  = d_nu d_lam e^i_mu
class TriadField {
 public:
  virtual ~TriadField() = default;

  virtual std::string name() const = 0;
  virtual int dimension() const = 0;
  virtual int flat_dimension() const { return dimension(); }
  virtual Matrix eval(const Point& q) const = 0;
  virtual Tensor d_eval(const Point& q) const;
  virtual Tensor dd_eval(const Point& q) const;
  virtual DerivativeMode derivative_mode() const { return DerivativeMode::analytic; }
  virtual bool holonomic() const = 0;
  // False for metric-only geometries, whose square-root triad is a gauge
  // choice and therefore carries no meaningful torsion.
  virtual bool torsion_defined() const { return true; }
  // Minimum |det e| (sqrt(det g) for embeddings) accepted as a regular point.
  virtual double singular_threshold() const { return 1e-12; }
};

using TriadPtr = std::shared_ptr<const TriadField>;

// Default relative step for finite differences: h_nu = step * (1 + |q_nu|).
inline constexpr double kDefaultFdStep = 1e-5;

// Replaces the derivatives of `base` by central differences of base->eval.
// Mixed second partials use the four-point stencil, diagonal ones the
// three-point stencil; both are O(h^2).
class FiniteDifferenceTriad final : public TriadField {
 public:
  explicit FiniteDifferenceTriad(TriadPtr base, double step = kDefaultFdStep);

  std::string name() const override;
  int dimension() const override { return base_->dimension(); }
  int flat_dimension() const override { return base_->flat_dimension(); }
  Matrix eval(const Point& q) const override { return base_->eval(q); }
  Tensor d_eval(const Point& q) const override;
  Tensor dd_eval(const Point& q) const override;
  DerivativeMode derivative_mode() const override { return DerivativeMode::finite_difference; }
  bool holonomic() const override { return base_->holonomic(); }
  bool torsion_defined() const override { return base_->torsion_defined(); }
  double singular_threshold() const override { return base_->singular_threshold(); }

  double step() const { return step_; }

 private:
  double axis_step(const Point& q, int axis) const;

  TriadPtr base_;
  double step_;
};

// Triad sampled on a uniform rectilinear grid and interpolated with
// tensor-product cubic Lagrange polynomials. Derivatives are not provided;
// wrap in FiniteDifferenceTriad.
class GridTriad final : public TriadField {
 public:
  // `values[k]` holds the row-major D x D triad at grid node k, with the
  // first chart axis varying slowest.
  GridTriad(std::vector<double> lower, std::vector<double> spacing, std::vector<int> counts,
            std::vector<std::vector<double>> values, bool holonomic);

  std::string name() const override { return "grid"; }
  int dimension() const override { return static_cast<int>(lower_.size()); }
  Matrix eval(const Point& q) const override;
  bool holonomic() const override { return holonomic_; }

 private:
  std::vector<double> lower_;
  std::vector<double> spacing_;
  std::vector<int> counts_;
  std::vector<std::vector<double>> values_;
  bool holonomic_;
};

// Reads the CSV schema `q1..qD,e_1_1..e_D_D` (row-major triad entries, one
// grid node per row, uniform rectilinear grid) and returns a
// finite-difference-wrapped GridTriad. Throws ParseError / ValidationError.
TriadPtr load_grid_triad_csv(const std::string& path, double fd_step = kDefaultFdStep);

// Geometry given only by a metric. The triad is the upper Cholesky factor
// (the diagonal square root for diagonal metrics), so only Riemannian
// quantities are meaningful; torsion operations throw TorsionUndefined.
class MetricOnlyTriad final : public TriadField {
 public:
  using MetricFn = std::function<Matrix(const Point&)>;

  MetricOnlyTriad(std::string name, int dimension, MetricFn metric);

  std::string name() const override { return name_; }
  int dimension() const override { return dim_; }
  Matrix eval(const Point& q) const override;
  bool holonomic() const override { return false; }
  bool torsion_defined() const override { return false; }
  Matrix metric(const Point& q) const { return metric_(q); }

 private:
  std::string name_;
  int dim_;
  MetricFn metric_;
};

// Convenience: a metric-only geometry with finite-difference derivatives.
TriadPtr make_metric_geometry(std::string name, int dimension, MetricOnlyTriad::MetricFn metric,
                              double fd_step = kDefaultFdStep);

}  // namespace torsiongeo
