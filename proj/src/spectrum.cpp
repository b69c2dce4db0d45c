// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "torsiongeo/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "torsiongeo/error.hpp"

namespace torsiongeo {

Vector nnls(const Matrix& A, const Vector& b, int max_iterations) {
  const int n = static_cast<int>(A.cols());
  if (max_iterations <= 0) max_iterations = 3 * n + 30;
  Vector x = Vector::Zero(n);
  std::vector<bool> passive(n, false);
  const double tol = 10.0 * std::numeric_limits<double>::epsilon() * A.norm() * std::max<double>(A.rows(), n);

  auto solve_passive = [&](Vector& z) {
    std::vector<int> idx;
    for (int j = 0; j < n; ++j) {
      if (passive[j]) idx.push_back(j);
    }
    Matrix sub(A.rows(), static_cast<int>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) sub.col(static_cast<int>(k)) = A.col(idx[k]);
    const Vector zs = sub.colPivHouseholderQr().solve(b);
    z = Vector::Zero(n);
    for (std::size_t k = 0; k < idx.size(); ++k) z[idx[k]] = zs[static_cast<int>(k)];
  };

  for (int outer = 0; outer < max_iterations; ++outer) {
    const Vector w = A.transpose() * (b - A * x);
    int best = -1;
    double wmax = tol;
    for (int j = 0; j < n; ++j) {
      if (!passive[j] && w[j] > wmax) {
        wmax = w[j];
        best = j;
      }
    }
    if (best < 0) break;
    passive[best] = true;
    Vector z;
    for (int inner = 0; inner < max_iterations; ++inner) {
      solve_passive(z);
      bool feasible = true;
      for (int j = 0; j < n; ++j) {
        if (passive[j] && z[j] <= 0.0) feasible = false;
      }
      if (feasible) break;
      double alpha = 1.0;
      for (int j = 0; j < n; ++j) {
        if (passive[j] && z[j] <= 0.0) alpha = std::min(alpha, x[j] / (x[j] - z[j]));
      }
      x += alpha * (z - x);
      for (int j = 0; j < n; ++j) {
        if (passive[j] && x[j] <= tol) {
          passive[j] = false;
          x[j] = 0.0;
        }
      }
    }
    x = z;
  }
  return x;
}

namespace {

struct Samples {
  Vector tau;
  Vector y;
};

// Linear amplitudes for fixed energies, relative weighting.
Vector amplitudes_for(const Samples& s, const Vector& energies) {
  const int m = static_cast<int>(s.tau.size());
  const int k = static_cast<int>(energies.size());
  Matrix a(m, k);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < k; ++j) a(i, j) = std::exp(-energies[j] * s.tau[i]) / s.y[i];
  }
  return a.colPivHouseholderQr().solve(Vector::Ones(m));
}

Vector residuals_for(const Samples& s, const Vector& energies, const Vector& amps) {
  const int m = static_cast<int>(s.tau.size());
  Vector r(m);
  for (int i = 0; i < m; ++i) {
    double model = 0.0;
    for (int j = 0; j < energies.size(); ++j) model += amps[j] * std::exp(-energies[j] * s.tau[i]);
    r[i] = model / s.y[i] - 1.0;
  }
  return r;
}

struct VarProFunctor {
  using Scalar = double;
  using InputType = Vector;
  using ValueType = Vector;
  using JacobianType = Matrix;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  const Samples* s;
  int k;

  int inputs() const { return k; }
  int values() const { return static_cast<int>(s->tau.size()); }

  int operator()(const Vector& energies, Vector& r) const {
    r = residuals_for(*s, energies, amplitudes_for(*s, energies));
    return 0;
  }
};

struct Candidate {
  Vector energies;
  Vector amplitudes;
  double residual = std::numeric_limits<double>::infinity();
  bool valid = false;
};

double rms(const Vector& r) { return std::sqrt(r.squaredNorm() / static_cast<double>(r.size())); }

// Damped Gauss-Newton on energies and amplitudes jointly with the analytic
// Jacobian. The projected problem above stalls once its finite-difference
// Jacobian hits rounding noise; this removes the last digits.
void polish(const Samples& s, Vector& energies, Vector& amps) {
  const int m = static_cast<int>(s.tau.size());
  const int k = static_cast<int>(energies.size());
  double current = rms(residuals_for(s, energies, amps));
  for (int iter = 0; iter < 50; ++iter) {
    Matrix jac(m, 2 * k);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < k; ++j) {
        const double e = std::exp(-energies[j] * s.tau[i]) / s.y[i];
        jac(i, j) = -s.tau[i] * amps[j] * e;
        jac(i, k + j) = e;
      }
    }
    const Vector step = jac.colPivHouseholderQr().solve(-residuals_for(s, energies, amps));
    bool improved = false;
    for (double damp = 1.0; damp > 1e-4; damp *= 0.5) {
      const Vector e2 = energies + damp * step.head(k);
      const Vector a2 = amps + damp * step.tail(k);
      const double trial = rms(residuals_for(s, e2, a2));
      if (std::isfinite(trial) && trial < current) {
        improved = current - trial > 1e-3 * current;
        energies = e2;
        amps = a2;
        current = trial;
        break;
      }
    }
    if (!improved) break;
  }
}

Candidate refine(const Samples& s, Vector energies) {
  VarProFunctor f{&s, static_cast<int>(energies.size())};
  Eigen::NumericalDiff<VarProFunctor, Eigen::Central> nd(f);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<VarProFunctor, Eigen::Central>> lm(nd);
  lm.parameters.xtol = 1e-15;
  lm.parameters.ftol = 1e-15;
  lm.parameters.maxfev = 4000;
  lm.minimize(energies);
  Candidate c;
  Vector amps = amplitudes_for(s, energies);
  if (energies.allFinite() && amps.allFinite()) polish(s, energies, amps);
  std::vector<int> idx(energies.size());
  for (int j = 0; j < energies.size(); ++j) idx[j] = j;
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return energies[a] < energies[b]; });
  c.energies = Vector(energies.size());
  c.amplitudes = Vector(energies.size());
  for (int j = 0; j < energies.size(); ++j) {
    c.energies[j] = energies[idx[j]];
    c.amplitudes[j] = amps[idx[j]];
  }
  energies = c.energies;
  c.residual = rms(residuals_for(s, c.energies, c.amplitudes));
  c.valid = energies.allFinite() && c.amplitudes.allFinite() && std::isfinite(c.residual);
  for (int j = 0; j < energies.size() && c.valid; ++j) {
    if (c.amplitudes[j] <= 0.0) c.valid = false;
    if (j > 0 && energies[j] - energies[j - 1] < 1e-6 * (1.0 + std::abs(energies[j]))) c.valid = false;
  }
  return c;
}

}  // namespace

SpectrumFit extract_spectrum(const std::vector<double>& tau, const std::vector<double>& values,
                             const FitOptions& options) {
  if (tau.size() != values.size()) fail(ErrorKind::GridMismatch, "tau and value lists differ in length");
  std::vector<double> t, y;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (tau[i] >= options.tau_min && tau[i] <= options.tau_max) {
      if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
        fail(ErrorKind::ValidationError, "spectrum data must be positive at tau = " + std::to_string(tau[i]));
      }
      t.push_back(tau[i]);
      y.push_back(values[i]);
    }
  }
  if (t.size() < 4) fail(ErrorKind::ValidationError, "spectrum fit needs at least 4 samples in the tau window");
  const double tmin = *std::min_element(t.begin(), t.end());
  const double tmax = *std::max_element(t.begin(), t.end());
  if (!(tmin > 0.0) || tmax < 2.0 * tmin) {
    fail(ErrorKind::ValidationError, "spectrum fit window must satisfy 0 < tau_min and tau_max >= 2 tau_min");
  }
  if (options.max_levels < 1) fail(ErrorKind::ValidationError, "'fit_max_levels' must be at least 1");

  Samples s;
  s.tau = Eigen::Map<const Vector>(t.data(), static_cast<int>(t.size()));
  s.y = Eigen::Map<const Vector>(y.data(), static_cast<int>(y.size()));
  const int m = static_cast<int>(t.size());

  // Trial grid around the late-time effective energy.
  std::vector<int> order(m);
  for (int i = 0; i < m; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return s.tau[a] < s.tau[b]; });
  const int last = order[m - 1], prev = order[m - 2];
  const double e_eff = -std::log(s.y[last] / s.y[prev]) / (s.tau[last] - s.tau[prev]);
  const double span = 40.0 / tmin;
  const double e_lo = e_eff - 0.05 * span - 1e-3;
  const double e_hi = e_eff + span;
  const int nt = std::max(options.trial_points, 10);
  Vector grid(nt);
  Matrix a(m, nt);
  for (int j = 0; j < nt; ++j) {
    grid[j] = e_lo + (e_hi - e_lo) * j / (nt - 1);
    for (int i = 0; i < m; ++i) a(i, j) = std::exp(-grid[j] * s.tau[i]) / s.y[i];
  }
  Vector scale(nt);
  for (int j = 0; j < nt; ++j) {
    scale[j] = a.col(j).norm();
    if (scale[j] > 0.0) a.col(j) /= scale[j];
  }
  const Vector x = nnls(a, Vector::Ones(m));

  // Contiguous runs of active grid energies form clusters.
  std::vector<std::pair<double, double>> clusters;  // (energy, weight)
  for (int j = 0; j < nt;) {
    if (x[j] <= 0.0) {
      ++j;
      continue;
    }
    double w = 0.0, we = 0.0;
    while (j < nt && x[j] > 0.0) {
      const double c = x[j] / scale[j];
      w += c;
      we += c * grid[j];
      ++j;
    }
    clusters.emplace_back(we / w, w);
  }
  if (clusters.empty()) clusters.emplace_back(e_eff, 1.0);

  Candidate best, previous;
  const int kmax = std::min<int>(options.max_levels, m / 2);
  for (int k = 1; k <= kmax; ++k) {
    Vector init(k);
    const int nc = static_cast<int>(clusters.size());
    for (int j = 0; j < k; ++j) {
      if (j < nc) {
        init[j] = clusters[j].first;
      } else {
        // Fewer clusters than levels: spread extra levels above the last one.
        init[j] = clusters[nc - 1].first + (j - nc + 1) * 2.0 / tmin;
      }
    }
    if (k < nc) {
      // Fold the remaining clusters into the highest level.
      double w = 0.0, we = 0.0;
      for (int j = k - 1; j < nc; ++j) {
        w += clusters[j].second;
        we += clusters[j].second * clusters[j].first;
      }
      init[k - 1] = we / w;
    }
    const Candidate c = refine(s, init);
    if (!c.valid) continue;
    if (!best.valid || c.residual < best.residual / 3.0) best = c;
  }
  if (!best.valid || best.residual > options.residual_threshold) {
    fail(ErrorKind::IllConditionedFit, "no exponential model reached the residual threshold (best residual " +
                                           std::to_string(best.residual) + ")");
  }
  SpectrumFit out;
  out.residual = best.residual;
  out.samples = m;
  for (int j = 0; j < best.energies.size(); ++j) out.levels.push_back({best.energies[j], best.amplitudes[j]});
  return out;
}

}  // namespace torsiongeo
