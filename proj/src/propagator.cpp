// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "torsiongeo/propagator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "torsiongeo/error.hpp"
#include "torsiongeo/parallel.hpp"
#include "torsiongeo/simd/kernels.hpp"

namespace torsiongeo {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxDim = 2;
// Largest geodesic step (radians) kept in the rotated sphere chart, well
// inside the distance pi/2 to its poles.
constexpr double kSphereMaxStep = 1.4;

// Action polynomial in dq with coefficients frozen at one base point.
struct SlicePolynomial {
  int d = 0;
  int order = 4;
  double quad[kMaxDim][kMaxDim] = {};
  double cubic[kMaxDim][kMaxDim][kMaxDim] = {};
  double quartic[kMaxDim][kMaxDim][kMaxDim][kMaxDim] = {};

  static SlicePolynomial from(const ActionTerms& t, const Matrix& g, double pre, int order) {
    SlicePolynomial p;
    p.d = static_cast<int>(g.rows());
    p.order = order;
    for (int a = 0; a < p.d; ++a) {
      for (int b = 0; b < p.d; ++b) {
        p.quad[a][b] = pre * g(a, b);
        for (int c = 0; c < p.d; ++c) {
          p.cubic[a][b][c] = t.cubic_coefficient(a, b, c);
          for (int e = 0; e < p.d; ++e) p.quartic[a][b][c][e] = t.quartic_coefficient(a, b, c, e);
        }
      }
    }
    return p;
  }

  double operator()(const double* dq) const {
    double s2 = 0.0, s3 = 0.0, s4 = 0.0;
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        const double ab = dq[a] * dq[b];
        s2 += quad[a][b] * ab;
        for (int c = 0; c < d; ++c) {
          const double abc = ab * dq[c];
          s3 += cubic[a][b][c] * abc;
          for (int e = 0; e < d; ++e) s4 += quartic[a][b][c][e] * abc * dq[e];
        }
      }
    }
    return s2 + (order >= 3 ? s3 : 0.0) + (order >= 4 ? s4 : 0.0);
  }
};

struct SliceJacobian {
  int d = 0;
  double linear[kMaxDim] = {};
  double quad[kMaxDim][kMaxDim] = {};

  static SliceJacobian from(const JacobianAction& j) {
    SliceJacobian s;
    s.d = static_cast<int>(j.linear.size());
    for (int a = 0; a < s.d; ++a) {
      s.linear[a] = j.linear[a];
      for (int b = 0; b < s.d; ++b) s.quad[a][b] = j.quadratic(a, b);
    }
    return s;
  }

  double operator()(const double* dq) const {
    double v = 0.0;
    for (int a = 0; a < d; ++a) {
      v += linear[a] * dq[a];
      for (int b = 0; b < d; ++b) v += quad[a][b] * dq[a] * dq[b];
    }
    return v;
  }
};

SlicePolynomial postpoint_polynomial(const PointGeometry& pg, const SliceConfig& cfg) {
  const ExpansionCoefficients c = ExpansionCoefficients::at(pg);
  const Vector zero = Vector::Zero(pg.q.size());
  const ActionTerms t = postpoint_action(c, zero, cfg.eps, cfg.particle.mass, 4);
  return SlicePolynomial::from(t, c.g, cfg.particle.mass / (2.0 * cfg.eps), cfg.order);
}

double midpoint_value(const GeometryBundle& bundle, const Point& mid, const Vector& dq, const SliceConfig& cfg) {
  return midpoint_action(*bundle.at(mid), dq, cfg.eps, cfg.particle.mass, cfg.order).total;
}

double slice_width(const SliceConfig& cfg) { return std::sqrt(cfg.eps * cfg.particle.hbar / cfg.particle.mass); }

void check_resolution(const std::string& axis, double step, double width) {
  if (step > width / 8.0) {
    fail(ErrorKind::GridResolutionInsufficient,
         axis + " step " + std::to_string(step) + " exceeds 1/8 of the slice width " + std::to_string(width));
  }
}

// Coordinates of (theta, phi) in the rotated chart that carries
// (base_theta, base_phi) to the equator point (pi/2, 0). Also returns the
// cosine of the great-circle distance to the base point.
std::array<double, 3> rotate_to_equator(double base_theta, double base_phi, double theta, double phi) {
  const double gam = 0.5 * kPi - base_theta;
  const double st = std::sin(theta), ct = std::cos(theta);
  const double x = st * std::cos(phi - base_phi), y = st * std::sin(phi - base_phi), z = ct;
  const double xr = x * std::cos(gam) + z * std::sin(gam);
  const double zr = -x * std::sin(gam) + z * std::cos(gam);
  return {std::acos(std::clamp(zr, -1.0, 1.0)), std::atan2(y, xr), xr};
}

// Row-major view of a symmetric-product: with column-major buffers,
// simd::gemm(P, S) returns S P, which equals P S for powers of S.
void multiply(const Matrix& p, const Matrix& s, Matrix& out) {
  out.resize(p.rows(), s.cols());
  simd::gemm(p.data(), s.data(), out.data(), static_cast<std::size_t>(p.rows()), static_cast<std::size_t>(p.cols()),
             static_cast<std::size_t>(s.cols()));
}

struct Setup {
  SliceConfig cfg;
  double norm = 0.0;    // (2 pi hbar eps / M)^{-D/2}
  double width = 0.0;   // sqrt(eps hbar / M)
  double cutoff = 0.0;  // kernel support, physical distance
  std::vector<Point> nodes;
  Vector weights;       // sqrt(g) times quadrature weight
  std::vector<double> sqrt_g;
};

// k(q_i, q_j) for the line and the circle; period > 0 adds the images.
Matrix assemble_chart_kernel(const GeometryBundle& bundle, const Setup& st, double period) {
  const int n = static_cast<int>(st.nodes.size());
  const SliceConfig& cfg = st.cfg;
  const double hbar = cfg.particle.hbar;
  std::vector<SlicePolynomial> poly(n);
  std::vector<SliceJacobian> jac(n);
  std::vector<double> veff(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const auto pg = bundle.at(st.nodes[i]);
    poly[i] = postpoint_polynomial(*pg, cfg);
    jac[i] = SliceJacobian::from(jacobian_coefficients(*pg, JacobianForm::qep));
    if (cfg.measure == Measure::naive_dewitt && cfg.effective_potential) {
      veff[i] = effective_potential(bundle, st.nodes[i], cfg.particle.mass, hbar).value;
    }
  }
  const int images = period > 0.0 ? static_cast<int>(std::ceil(st.cutoff / (period * st.sqrt_g[0]))) + 1 : 0;
  Matrix k = Matrix::Zero(n, n);
  parallel_for(0, static_cast<std::size_t>(n), [&](std::size_t row) {
    const int i = static_cast<int>(row);
    for (int j = 0; j < n; ++j) {
      double total = 0.0;
      for (int img = -images; img <= images; ++img) {
        const double dq = st.nodes[i][0] - st.nodes[j][0] + img * period;
        if (std::abs(dq) * st.sqrt_g[i] > st.cutoff) continue;
        double action = 0.0;
        switch (cfg.scheme) {
          case Scheme::postpoint: action = poly[i](&dq); break;
          case Scheme::prepoint: {
            const double back = -dq;
            action = poly[j](&back);
            break;
          }
          case Scheme::midpoint: {
            Vector v(1);
            v[0] = dq;
            Point mid(1);
            mid[0] = st.nodes[i][0] - 0.5 * dq;
            action = midpoint_value(bundle, mid, v, cfg);
            break;
          }
        }
        double expo = -action / hbar;
        double pref = st.norm;
        if (cfg.measure == Measure::qep) {
          expo += jac[i](&dq);
          pref *= st.sqrt_g[i] / st.sqrt_g[j];
        } else if (cfg.effective_potential) {
          expo -= cfg.eps * veff[i] / hbar;
        }
        total += pref * std::exp(expo);
      }
      k(i, j) = total;
    }
  });
  return k;
}

// Azimuthal sector kernels K_m(theta_i, theta_j) on the sphere. Every pair is
// evaluated in the chart rotated so that the postpoint sits on the equator,
// where the (theta, phi) chart is regular; the rotation is an isometry, so
// the kernel density is unchanged.
std::vector<Matrix> assemble_sphere_sectors(const GeometryBundle& bundle, const Setup& st, int n_phi, int sectors) {
  const int n = static_cast<int>(st.nodes.size());
  const SliceConfig& cfg = st.cfg;
  const double hbar = cfg.particle.hbar;
  Point e0(2);
  e0 << 0.5 * kPi, 0.0;
  const auto pg0 = bundle.at(e0);
  const SlicePolynomial poly = postpoint_polynomial(*pg0, cfg);
  const SliceJacobian jac = SliceJacobian::from(jacobian_coefficients(*pg0, JacobianForm::qep));
  const double sqrt_g0 = pg0->connection.metric.sqrt_g;
  const double radius = std::sqrt(pg0->connection.metric.g(0, 0));
  double veff = 0.0;
  if (cfg.measure == Measure::naive_dewitt && cfg.effective_potential) {
    veff = effective_potential(bundle, e0, cfg.particle.mass, hbar).value;
  }
  const double cos_cut = std::cos(std::min(st.cutoff / radius, kSphereMaxStep));
  const double h_phi = 2.0 * kPi / n_phi;
  std::vector<double> phi(n_phi);
  std::vector<std::vector<double>> harmonic(sectors, std::vector<double>(n_phi));
  for (int j = 0; j < n_phi; ++j) {
    phi[j] = j * h_phi;
    if (phi[j] > kPi) phi[j] -= 2.0 * kPi;
    for (int m = 0; m < sectors; ++m) harmonic[m][j] = h_phi * std::cos(m * phi[j]);
  }
  std::vector<Matrix> out(sectors, Matrix::Zero(n, n));
  parallel_for(0, static_cast<std::size_t>(n), [&](std::size_t row) {
    const int i = static_cast<int>(row);
    const double theta = st.nodes[i][0];
    std::vector<double> acc(sectors);
    for (int jt = 0; jt < n; ++jt) {
      const double theta_p = st.nodes[jt][0];
      std::fill(acc.begin(), acc.end(), 0.0);
      for (int j = 0; j < n_phi; ++j) {
        const auto r = rotate_to_equator(theta, 0.0, theta_p, phi[j]);
        if (r[2] < cos_cut) continue;
        const double dq[2] = {0.5 * kPi - r[0], -r[1]};
        double action = 0.0;
        switch (cfg.scheme) {
          case Scheme::postpoint: action = poly(dq); break;
          case Scheme::prepoint: {
            const auto b = rotate_to_equator(theta_p, phi[j], theta, 0.0);
            const double back[2] = {0.5 * kPi - b[0], -b[1]};
            action = poly(back);
            break;
          }
          case Scheme::midpoint: {
            Vector v(2);
            v << dq[0], dq[1];
            Point mid = e0 - 0.5 * v;
            action = midpoint_value(bundle, mid, v, cfg);
            break;
          }
        }
        double value;
        if (cfg.measure == Measure::qep) {
          const double sqrt_g_r = radius * radius * std::sin(r[0]);
          value = st.norm * sqrt_g0 / sqrt_g_r * std::exp(jac(dq) - action / hbar);
        } else {
          value = st.norm * std::exp(-action / hbar - cfg.eps * veff / hbar);
        }
        for (int m = 0; m < sectors; ++m) acc[m] += value * harmonic[m][j];
      }
      for (int m = 0; m < sectors; ++m) out[m](i, jt) = acc[m];
    }
  });
  return out;
}

// Symmetric transfer matrix, its powers, traces and eigenvalues.
SectorResult compose(const Matrix& kernel, const Vector& weights, int slices, const std::vector<int>& steps,
                     bool compact) {
  SectorResult sr;
  const double kmax = kernel.cwiseAbs().maxCoeff();
  sr.asymmetry = kmax > 0.0 ? (kernel - kernel.transpose()).cwiseAbs().maxCoeff() / kmax : 0.0;
  const Vector root = weights.cwiseSqrt();
  const Matrix s = root.asDiagonal() * (0.5 * (kernel + kernel.transpose())) * root.asDiagonal();
  const Vector inv_root = root.cwiseInverse();
  auto amplitude_of = [&](const Matrix& p) -> Matrix { return inv_root.asDiagonal() * p * inv_root.asDiagonal(); };

  if (compact) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
    sr.eigenvalues = es.eigenvalues().reverse();
    Matrix p = s, next;
    std::size_t want = 0;
    for (int k = 1; k <= slices; ++k) {
      if (k > 1) {
        multiply(p, s, next);
        p.swap(next);
      }
      sr.trace.push_back(p.trace());
      while (want < steps.size() && steps[want] == k) {
        sr.amplitude.push_back(amplitude_of(p));
        ++want;
      }
    }
    return sr;
  }
  // Open grids only need the requested powers: square and multiply.
  std::map<int, Matrix> cache;
  for (int k : steps) {
    Matrix result, square = s, tmp;
    bool have = false;
    for (int e = k; e > 0; e >>= 1) {
      if (e & 1) {
        if (have) {
          multiply(result, square, tmp);
          result.swap(tmp);
        } else {
          result = square;
          have = true;
        }
      }
      if (e > 1) {
        multiply(square, square, tmp);
        square.swap(tmp);
      }
    }
    sr.amplitude.push_back(amplitude_of(result));
  }
  return sr;
}

int auto_points(double length, double width) {
  return static_cast<int>(std::ceil(length / (width / 8.0) - 1e-9));
}

}  // namespace

std::string_view to_string(GridKind kind) {
  switch (kind) {
    case GridKind::line: return "line";
    case GridKind::circle: return "circle";
    case GridKind::sphere: return "sphere";
  }
  return "line";
}

GridKind grid_kind_for(const GeometryBundle& bundle) {
  const std::string name = bundle.triad().name();
  if (name == "flat-cartesian" && bundle.dimension() == 1) return GridKind::line;
  if (name == "circle") return GridKind::circle;
  if (name == "sphere") return GridKind::sphere;
  fail(ErrorKind::Unsupported, "propagate supports flat-cartesian with D = 1, circle and sphere, not '" + name +
                                   "' (D = " + std::to_string(bundle.dimension()) + ")");
}

double gaussian_kernel(double dx, double tau, const ParticleParams& p) {
  return std::sqrt(p.mass / (2.0 * kPi * p.hbar * tau)) * std::exp(-p.mass * dx * dx / (2.0 * p.hbar * tau));
}

std::vector<EnergyLevel> extract_levels(const PropagatorResult& result, const FitOptions& fit) {
  std::vector<EnergyLevel> levels;
  if (result.kind == GridKind::line) return levels;
  if (result.kind == GridKind::circle) {
    const SpectrumFit f = extract_spectrum(result.tau, result.trace, fit);
    for (std::size_t l = 0; l < f.levels.size(); ++l) {
      levels.push_back({static_cast<int>(l), f.levels[l].energy, f.levels[l].amplitude, f.residual});
    }
    return levels;
  }
  // Sphere: the lowest level of sector m has angular momentum L = m.
  for (const SectorResult& sr : result.sectors) {
    const SpectrumFit f = extract_spectrum(result.tau, sr.trace, fit);
    levels.push_back({sr.m, f.levels.front().energy, f.levels.front().amplitude, f.residual});
  }
  return levels;
}

PropagatorResult propagate(const GeometryBundle& bundle, const SliceConfig& config, const PropagateOptions& options) {
  config.validate();
  if (config.contour == TimeContour::real_time) {
    fail(ErrorKind::Unsupported,
         "numerical propagation runs on the Euclidean contour; real time is available only through free_particle_kernel");
  }
  const GridKind kind = grid_kind_for(bundle);
  const GridSpec& gs = options.grid;
  if (!(gs.cutoff_widths >= 6.0)) fail(ErrorKind::ValidationError, "'cutoff_widths' must be at least 6");

  Setup st;
  st.cfg = config;
  st.width = slice_width(config);
  st.cutoff = gs.cutoff_widths * st.width;
  const int dim = kind == GridKind::sphere ? 2 : 1;
  st.norm = std::pow(2.0 * kPi * config.particle.hbar * config.eps / config.particle.mass, -0.5 * dim);

  std::vector<int> steps = options.amplitude_steps;
  if (steps.empty()) steps.push_back(config.slices);
  std::sort(steps.begin(), steps.end());
  steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
  for (int k : steps) {
    if (k < 1 || k > config.slices) {
      fail(ErrorKind::ValidationError, "'amplitude_steps' entries must lie in 1..N, got " + std::to_string(k));
    }
  }

  PropagatorResult res;
  res.kind = kind;
  res.measure = config.measure;
  res.scheme = config.scheme;
  res.effective_potential = config.effective_potential;
  res.slices = config.slices;
  res.eps = config.eps;
  res.amplitude_steps = steps;

  if (kind == GridKind::line || kind == GridKind::circle) {
    Point probe(1);
    probe[0] = gs.center;
    const double scale = bundle.metric(probe).sqrt_g;
    const double length = kind == GridKind::line ? 2.0 * gs.extent : 2.0 * kPi;
    if (!(length > 0.0)) fail(ErrorKind::ValidationError, "'extent' must be positive");
    int n = gs.points > 0 ? gs.points : auto_points(length * scale, st.width) + (kind == GridKind::line ? 1 : 0);
    if (kind == GridKind::circle && n % 2) ++n;
    if (n < 4) fail(ErrorKind::ValidationError, "'grid_points' must be at least 4");
    const double h = kind == GridKind::line ? length / (n - 1) : length / n;
    check_resolution(kind == GridKind::line ? "line" : "angle", h * scale, st.width);
    if (kind == GridKind::line && gs.extent * scale < st.cutoff) {
      fail(ErrorKind::GridResolutionInsufficient, "line extent is narrower than the kernel support");
    }
    st.weights.resize(n);
    for (int i = 0; i < n; ++i) {
      Point q(1);
      q[0] = kind == GridKind::line ? gs.center - gs.extent + i * h : i * h;
      st.nodes.push_back(q);
      st.sqrt_g.push_back(bundle.metric(q).sqrt_g);
      st.weights[i] = st.sqrt_g.back() * h;
    }
    const Matrix k = assemble_chart_kernel(bundle, st, kind == GridKind::circle ? 2.0 * kPi : 0.0);
    SectorResult sr = compose(k, st.weights, config.slices, steps, kind == GridKind::circle);
    res.sectors.push_back(std::move(sr));
  } else {
    Point e0(2);
    e0 << 0.5 * kPi, 0.0;
    const double radius = std::sqrt(bundle.metric(e0).g(0, 0));
    if (st.cutoff / radius > kSphereMaxStep && 6.0 * st.width / radius > kSphereMaxStep) {
      fail(ErrorKind::ParameterOutOfRange, "slice width too large compared with the sphere radius");
    }
    const int n = gs.points > 0 ? gs.points : auto_points(kPi * radius, st.width);
    int n_phi = gs.azimuthal_points > 0 ? gs.azimuthal_points : auto_points(2.0 * kPi * radius, st.width);
    n_phi += (4 - n_phi % 4) % 4;
    if (n < 4) fail(ErrorKind::ValidationError, "'grid_points' must be at least 4");
    if (gs.sectors < 1 || gs.sectors > n_phi / 2) {
      fail(ErrorKind::ValidationError, "'sectors' must lie in 1..azimuthal_points/2");
    }
    const double h = kPi / n;
    check_resolution("theta", h * radius, st.width);
    check_resolution("phi", 2.0 * kPi / n_phi * radius, st.width);
    st.weights.resize(n);
    for (int i = 0; i < n; ++i) {
      Point q(2);
      q << (i + 0.5) * h, 0.0;
      st.sqrt_g.push_back(radius * radius * std::sin(q[0]));
      st.weights[i] = st.sqrt_g.back() * h;
      Point theta(1);
      theta[0] = q[0];
      st.nodes.push_back(theta);
    }
    const std::vector<Matrix> kernels = assemble_sphere_sectors(bundle, st, n_phi, gs.sectors);
    for (int m = 0; m < gs.sectors; ++m) {
      SectorResult sr = compose(kernels[m], st.weights, config.slices, steps, true);
      sr.m = m;
      sr.degeneracy = m == 0 ? 1 : 2;
      res.sectors.push_back(std::move(sr));
    }
  }
  res.grid = st.nodes;
  res.weights = st.weights;

  if (kind != GridKind::line) {
    res.tau.resize(config.slices);
    res.trace.assign(config.slices, 0.0);
    for (int k = 0; k < config.slices; ++k) {
      res.tau[k] = (k + 1) * config.eps;
      for (const SectorResult& sr : res.sectors) res.trace[k] += sr.degeneracy * sr.trace[k];
    }
    if (options.fit_spectrum) {
      FitOptions fit = options.fit;
      if (!(fit.tau_min > 0.0)) fit.tau_min = std::max(config.eps, 0.25 * res.tau.back());
      res.levels = extract_levels(res, fit);
    }
  }
  return res;
}

MeasureComparison compare_measures(const GeometryBundle& bundle, const SliceConfig& config,
                                   const PropagateOptions& options) {
  MeasureComparison out;
  SliceConfig qep = config;
  qep.measure = Measure::qep;
  qep.effective_potential = false;
  SliceConfig naive = config;
  naive.measure = Measure::naive_dewitt;
  naive.effective_potential = false;
  out.qep = propagate(bundle, qep, options);
  out.naive = propagate(bundle, naive, options);
  std::map<int, double> qep_levels;
  for (const EnergyLevel& l : out.qep.levels) qep_levels[l.label] = l.energy;
  for (const EnergyLevel& l : out.naive.levels) {
    const auto it = qep_levels.find(l.label);
    if (it != qep_levels.end()) out.shift.push_back(l.energy - it->second);
  }
  const Point probe = out.qep.kind == GridKind::sphere ? Point((Point(2) << 0.5 * kPi, 0.0).finished())
                                                        : out.qep.grid.front();
  const auto pg = bundle.at(probe);
  out.reference_shift =
      config.particle.hbar * config.particle.hbar * pg->curvature.scalar_bar / (6.0 * config.particle.mass);
  return out;
}

}  // namespace torsiongeo
