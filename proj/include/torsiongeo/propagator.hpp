// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

// Euclidean time-sliced propagator on a grid. Each slice kernel is the
// short-time action of the configured scheme plus either the QEP Jacobian
// exponent or the naive sqrt(g) measure, assembled into a symmetric transfer
// matrix whose powers compose finite-time amplitudes.

#pragma once

#include <string>
#include <vector>

#include "torsiongeo/geometry.hpp"
#include "torsiongeo/short_time.hpp"
#include "torsiongeo/spectrum.hpp"

namespace torsiongeo {

enum class GridKind {
  line,    // one-dimensional flat chart, truncated grid with absorbing ends
  circle,  // periodic angle, images summed
  sphere,  // (theta, phi) chart, reduced to azimuthal sectors
};

std::string_view to_string(GridKind kind);

// Grid family for a catalog geometry: flat-cartesian with D = 1, circle and
// sphere. Throws Unsupported for everything else.
GridKind grid_kind_for(const GeometryBundle& bundle);

struct GridSpec {
  // Nodes along the chart coordinate (theta on the sphere). 0 picks the
  // smallest count that resolves the kernel width with 8 points.
  int points = 0;
  double center = 0.0;  // line only
  double extent = 5.0;  // line only: half-width
  int azimuthal_points = 0;  // sphere only, 0 = automatic
  int sectors = 4;           // sphere only: m = 0 .. sectors - 1
  // Kernel support in units of the slice width sqrt(eps hbar / M).
  double cutoff_widths = 12.0;
};

struct PropagateOptions {
  GridSpec grid;
  // Slice counts k at which amplitudes K(q, q'; k eps) are kept; empty keeps
  // only k = N.
  std::vector<int> amplitude_steps;
  bool fit_spectrum = true;
  FitOptions fit;
};

struct SectorResult {
  int m = 0;
  int degeneracy = 1;
  Vector eigenvalues;          // of the symmetric transfer matrix, descending
  std::vector<double> trace;   // Tr S^k for k = 1..N, from matrix products
  std::vector<Matrix> amplitude;  // one per amplitude step, invariant density
  double asymmetry = 0.0;      // max |k(q,q') - k(q',q)| / max |k|
};

struct EnergyLevel {
  int label = 0;  // level index (circle) or angular momentum L (sphere)
  double energy = 0.0;
  double amplitude = 0.0;
  double residual = 0.0;  // relative rms of the fit that produced it
};

struct PropagatorResult {
  GridKind kind = GridKind::line;
  Measure measure = Measure::qep;
  Scheme scheme = Scheme::postpoint;
  bool effective_potential = false;
  int slices = 0;
  double eps = 0.0;
  std::vector<Point> grid;  // chart nodes (theta only on the sphere)
  Vector weights;           // sqrt(g) times the quadrature weight
  std::vector<int> amplitude_steps;
  std::vector<SectorResult> sectors;
  std::vector<double> tau;    // k eps, k = 1..N (compact grids)
  std::vector<double> trace;  // sum over sectors of degeneracy * Tr S^k
  std::vector<EnergyLevel> levels;
};

// Throws GridResolutionInsufficient when a grid step exceeds 1/8 of the
// slice width, Unsupported for the real-time contour and for geometries
// other than the one-dimensional flat chart, the circle and the sphere.
PropagatorResult propagate(const GeometryBundle& bundle, const SliceConfig& config, const PropagateOptions& options);

// Levels of a finished result, refit from its traces over `tau` window
// settings in `fit`.
std::vector<EnergyLevel> extract_levels(const PropagatorResult& result, const FitOptions& fit);

struct MeasureComparison {
  PropagatorResult qep;
  PropagatorResult naive;
  std::vector<double> shift;  // naive minus qep, per common level
  double reference_shift = 0.0;  // hbar^2 Rbar / (6 M) at a grid point
};

MeasureComparison compare_measures(const GeometryBundle& bundle, const SliceConfig& config,
                                   const PropagateOptions& options);

// Exact flat-space Euclidean kernel in one dimension.
double gaussian_kernel(double dx, double tau, const ParticleParams& p);

}  // namespace torsiongeo
