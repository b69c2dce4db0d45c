// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

// Extraction of decay rates from Euclidean-time data Z(tau) = sum_n c_n
// exp(-E_n tau): nonnegative least squares over a trial energy grid, then
// variable-projection refinement of the clustered energies.

#pragma once

#include <limits>
#include <vector>

#include "torsiongeo/tensor.hpp"

namespace torsiongeo {

// Lawson-Hanson active-set solver for min |A x - b| subject to x >= 0.
Vector nnls(const Matrix& A, const Vector& b, int max_iterations = 0);

struct FitOptions {
  // Only samples with tau_min <= tau <= tau_max enter the fit.
  double tau_min = 0.0;
  double tau_max = std::numeric_limits<double>::infinity();
  int max_levels = 6;
  int trial_points = 600;
  // Relative rms residual above which the fit is rejected.
  double residual_threshold = 1e-4;
};

struct FittedLevel {
  double energy = 0.0;
  double amplitude = 0.0;
};

struct SpectrumFit {
  std::vector<FittedLevel> levels;  // ascending energy
  double residual = 0.0;            // relative rms over the fitted samples
  int samples = 0;
};

// Needs at least four samples in the window with tau_max / tau_min >= 2 and
// positive values (ValidationError otherwise). Throws IllConditionedFit when
// no model order reaches the residual threshold.
SpectrumFit extract_spectrum(const std::vector<double>& tau, const std::vector<double>& values,
                             const FitOptions& options = {});

}  // namespace torsiongeo
