// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "torsiongeo/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>

#include <Eigen/Core>

#include "json.hpp"
#include "torsiongeo/catalog.hpp"
#include "torsiongeo/error.hpp"
#include "torsiongeo/io.hpp"
#include "torsiongeo/parallel.hpp"
#include "torsiongeo/simd/kernels.hpp"

#ifndef TORSIONGEO_VERSION
#define TORSIONGEO_VERSION "0.0.0"
#endif

namespace torsiongeo {

using ojson = nlohmann::ordered_json;

namespace {

ojson num(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

ojson vec(const Vector& v) {
  ojson a = ojson::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(num(v[i]));
  return a;
}

ojson mat(const Matrix& m) {
  ojson a = ojson::array();
  for (int i = 0; i < m.rows(); ++i) a.push_back(vec(m.row(i).transpose()));
  return a;
}

ojson tensor(const Tensor& t) {
  const auto& d = t.data();
  std::function<ojson(int, std::size_t)> build = [&](int axis, std::size_t offset) -> ojson {
    if (axis == t.rank()) return num(d[offset]);
    std::size_t stride = 1;
    for (int k = axis + 1; k < t.rank(); ++k) stride *= static_cast<std::size_t>(t.extent(k));
    ojson a = ojson::array();
    for (int i = 0; i < t.extent(axis); ++i) a.push_back(build(axis + 1, offset + i * stride));
    return a;
  };
  return t.rank() == 0 ? num(d.empty() ? 0.0 : d[0]) : build(0, 0);
}

ojson header(const RunConfig& c) {
  ojson h;
  h["command"] = std::string(to_string(c.command));
  h["geometry"] = c.geometry;
  ojson p = ojson::object();
  for (const auto& [k, v] : c.geometry_params) p[k] = v;
  h["parameters"] = p;
  return h;
}

double antisymmetry(const Tensor& t) {
  // max |T_{mu nu ..} + T_{nu mu ..}| over the first two slots
  const int d = t.extent(0);
  double worst = 0.0;
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      for (int l = 0; l < d; ++l) worst = std::max(worst, std::abs(t(a, b, l) + t(b, a, l)));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------

RunArtifacts run_geom(const RunConfig& c, std::uint64_t seed) {
  const GeometryBundle bundle(make_geometry(c));
  ojson out = header(c);
  ojson points = ojson::array();
  CsvTable csv;
  const int d = bundle.dimension();
  for (int a = 0; a < d; ++a) csv.header.push_back("q" + std::to_string(a + 1));
  for (const char* h : {"sqrt_g", "scalar_curvature", "scalar_curvature_bar", "torsion_max", "effective_potential"}) {
    csv.header.push_back(h);
  }
  for (const Point& q : c.points) {
    const auto pg = bundle.at(q);
    const ConnectionData& cn = pg->connection;
    const CurvatureData& cv = pg->curvature;
    const EffectivePotential v = effective_potential(bundle, q, c.particle.mass, c.particle.hbar);
    ojson p;
    p["q"] = vec(q);
    p["sqrt_g"] = cn.metric.sqrt_g;
    p["metric"] = mat(cn.metric.g);
    p["torsion_defined"] = cn.torsion_defined;
    p["connection"] = tensor(cn.gamma);
    p["christoffel"] = tensor(cn.christoffel);
    p["ricci_bar"] = mat(cv.ricci_bar);
    p["scalar_curvature_bar"] = num(cv.scalar_bar);
    p["effective_potential"] = num(v.value);
    ojson checks;
    if (cn.torsion_defined) {
      p["torsion"] = tensor(cn.torsion);
      p["torsion_vector"] = vec(cn.torsion_vector);
      p["scalar_curvature"] = num(cv.scalar);
      p["torsion_present"] = v.torsion_present;
      checks["torsion_antisymmetry"] = antisymmetry(cn.torsion);
      checks["decomposition"] = max_abs_diff(cn.gamma, cn.christoffel + cn.contortion);
      checks["connection_forms"] = max_abs_diff(cn.gamma, cn.gamma_alt);
      checks["curvature_decomposition"] = max_abs_diff(curvature_from_decomposition(bundle.triad(), *pg), cv.cartan);
    }
    // <Delta A_J> with <dq dq> = eps hbar g^{-1} / M against -eps V_eff / hbar.
    const JacobianAction dj = jacobian_coefficients(*pg, JacobianForm::qep);
    const JacobianAction j0 = jacobian_coefficients(*pg, JacobianForm::affine_trace);
    checks["delta_jacobian_expectation"] = expectation_contraction(dj.quadratic - j0.quadratic, cn.metric.g_inv,
                                                                   c.slice.eps, c.particle.hbar, c.particle.mass);
    checks["effective_potential_exponent"] = -c.slice.eps * v.value / c.particle.hbar;
    p["checks"] = checks;
    points.push_back(p);

    std::vector<double> row(q.data(), q.data() + d);
    row.push_back(cn.metric.sqrt_g);
    row.push_back(cn.torsion_defined ? cv.scalar : std::nan(""));
    row.push_back(cv.scalar_bar);
    row.push_back(cn.torsion_defined ? cn.torsion.max_abs() : std::nan(""));
    row.push_back(v.value);
    csv.rows.push_back(std::move(row));
  }
  out["points"] = points;

  if (c.mc_samples > 0) {
    // Sample dq = sqrt(eps hbar / M) L^{-T} z with g = L L^T at the first
    // point, then compare the sample second moment with eps hbar g^{-1} / M.
    const MetricData m = bundle.metric(c.points.front());
    const Eigen::LLT<Matrix> llt(m.g);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    const double s = std::sqrt(c.slice.eps * c.particle.hbar / c.particle.mass);
    Matrix second = Matrix::Zero(d, d);
    Matrix fourth = Matrix::Zero(d, d);
    for (int k = 0; k < c.mc_samples; ++k) {
      Vector z(d);
      for (int a = 0; a < d; ++a) z[a] = normal(rng);
      const Vector dq = s * llt.matrixU().solve(z);
      const Matrix outer = dq * dq.transpose();
      second += outer;
      fourth += outer.cwiseProduct(outer);
    }
    second /= c.mc_samples;
    fourth /= c.mc_samples;
    const Matrix expected = c.slice.eps * c.particle.hbar / c.particle.mass * m.g_inv;
    const Matrix stderr_ = ((fourth - second.cwiseProduct(second)) / c.mc_samples).cwiseSqrt();
    double z_max = 0.0;
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) z_max = std::max(z_max, std::abs(second(a, b) - expected(a, b)) / stderr_(a, b));
    }
    ojson e;
    e["samples"] = c.mc_samples;
    e["seed"] = seed;
    e["sample_moment"] = mat(second);
    e["expected_moment"] = mat(expected);
    e["max_standard_errors"] = z_max;
    out["expectation_check"] = e;
  }
  RunArtifacts art;
  art.result_json = out.dump(2) + "\n";
  art.files["geometry.csv"] = to_csv(csv);
  return art;
}

// ---------------------------------------------------------------------------

RunArtifacts run_traj(const RunConfig& c) {
  const TriadPtr triad = make_geometry(c);
  const GeometryBundle bundle(triad);
  IntegrationOptions opts;
  opts.drift_tolerance = c.drift_tolerance;
  const Trajectory traj = integrate_trajectory(bundle, c.kind, c.q0, c.v0, c.duration, c.dt, opts);
  const int d = bundle.dimension();
  const auto* chart = dynamic_cast<const ChartMapTriad*>(triad.get());

  CsvTable csv;
  csv.header.push_back("t");
  for (int a = 0; a < d; ++a) csv.header.push_back("q" + std::to_string(a + 1));
  for (int a = 0; a < d; ++a) csv.header.push_back("qdot" + std::to_string(a + 1));
  const int n_flat = chart ? triad->flat_dimension() : 0;
  for (int i = 0; i < n_flat; ++i) csv.header.push_back("x" + std::to_string(i + 1));
  std::vector<Vector> mapped;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    std::vector<double> row{traj.t[k]};
    row.insert(row.end(), traj.q[k].data(), traj.q[k].data() + d);
    row.insert(row.end(), traj.qdot[k].data(), traj.qdot[k].data() + d);
    if (chart) {
      Vector x(n_flat);
      for (int i = 0; i < n_flat; ++i) x[i] = chart->partial(traj.q[k], i, {0, 0, 0});
      row.insert(row.end(), x.data(), x.data() + n_flat);
      mapped.push_back(x);
    }
    csv.rows.push_back(std::move(row));
  }

  ojson out = header(c);
  out["kind"] = std::string(to_string(c.kind));
  out["samples"] = traj.size();
  out["dt"] = traj.dt;
  out["final_q"] = vec(traj.q.back());
  out["final_qdot"] = vec(traj.qdot.back());
  const double k0 = kinetic_invariant(bundle, traj.q.front(), traj.qdot.front());
  double drift = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    drift = std::max(drift, std::abs(kinetic_invariant(bundle, traj.q[k], traj.qdot[k]) - k0) / std::max(k0, 1e-300));
  }
  out["kinetic_invariant"] = k0;
  out["kinetic_drift"] = drift;
  out["action"] = evaluate_action(bundle, traj, c.particle.mass);
  out["step_doubling_error"] = step_doubling_error(bundle, c.kind, c.q0, c.v0, c.duration, c.dt);
  if (traj.size() >= 5) out["el_residual_max"] = modified_el_residual(bundle, traj, c.particle.mass).max_norm;
  if (chart && triad->flat_dimension() == d && mapped.size() >= 2) {
    // Distance of the flat images from the chord through the end points.
    const Vector a = mapped.front(), dir = (mapped.back() - a);
    const double len = dir.norm();
    double worst = 0.0;
    if (len > 0.0) {
      const Vector u = dir / len;
      for (const Vector& x : mapped) {
        const Vector r = x - a;
        worst = std::max(worst, (r - r.dot(u) * u).norm());
      }
    }
    out["straightness_residual"] = worst;
  }
  RunArtifacts art;
  art.result_json = out.dump(2) + "\n";
  art.files["trajectory.csv"] = to_csv(csv);
  return art;
}

// ---------------------------------------------------------------------------

RunArtifacts run_defect(const RunConfig& c) {
  const TriadPtr triad = make_geometry(c);
  Contour contour;
  if (!c.contour.csv.empty()) {
    const CsvTable t = read_csv(c.contour.csv);
    const int i1 = t.column("q1"), i2 = t.column("q2");
    if (i1 < 0 || i2 < 0) fail(ErrorKind::ParseError, c.contour.csv + ": contour CSV needs columns q1,q2");
    for (const auto& r : t.rows) contour.vertices.push_back((Point(2) << r[i1], r[i2]).finished());
  } else {
    contour = circle_contour(c.contour.center, c.contour.radius, c.contour.segments, c.contour.turns);
  }
  validate_contour(contour);

  ojson out = header(c);
  out["vertices"] = contour.vertices.size();
  out["winding"] = contour.winding;
  out["burgers_vector"] = vec(burgers_vector(*triad, contour));
  if (c.geometry == "dislocation") {
    const double eps = c.geometry_params.count("epsilon") ? c.geometry_params.at("epsilon") : 0.01;
    const DefectGeometry dg = dislocation_geometry(eps);
    out["reciprocal_burgers_vector"] = vec(reciprocal_burgers_vector(dg, contour));
    out["expected_burgers_vector"] = vec((Vector(2) << 0.0, contour.winding * eps).finished());
  }
  if (c.geometry == "disclination") {
    const double omega = c.geometry_params.count("Omega") ? c.geometry_params.at("Omega") : 0.05;
    const DefectGeometry dg = disclination_geometry(omega);
    out["frank_deficit"] = frank_rotation_deficit(dg, contour);
    out["expected_frank_deficit"] = -2.0 * std::numbers::pi * omega * contour.winding;
  }
  const GeometryBundle bundle(triad);
  if (bundle.connection(contour.vertices.front()).torsion_defined) {
    out["holonomy_affine"] = holonomy_rotation_angle(bundle, contour, ConnectionKind::affine, c.holonomy_substeps);
  }
  out["holonomy_riemann"] = holonomy_rotation_angle(bundle, contour, ConnectionKind::riemann, c.holonomy_substeps);

  CsvTable csv;
  csv.header = {"q1", "q2"};
  for (const Point& p : contour.vertices) csv.rows.push_back({p[0], p[1]});
  RunArtifacts art;
  art.result_json = out.dump(2) + "\n";
  art.files["contour.csv"] = to_csv(csv);
  return art;
}

// ---------------------------------------------------------------------------

ojson slice_json(const RunConfig& c) {
  ojson s;
  s["N"] = c.slice.slices;
  s["eps"] = c.slice.eps;
  s["scheme"] = std::string(to_string(c.slice.scheme));
  s["order"] = c.slice.order;
  return s;
}

ojson levels_json(const PropagatorResult& r) {
  ojson e = ojson::array(), res = ojson::array(), lv = ojson::array();
  for (const EnergyLevel& l : r.levels) {
    e.push_back(l.energy);
    res.push_back(l.residual);
    lv.push_back({{"label", l.label}, {"energy", l.energy}, {"amplitude", l.amplitude}, {"residual", l.residual}});
  }
  ojson o;
  o["energies"] = e;
  o["residuals"] = res;
  o["levels"] = lv;
  return o;
}

ojson sectors_json(const PropagatorResult& r) {
  ojson a = ojson::array();
  for (const SectorResult& s : r.sectors) {
    ojson o;
    o["m"] = s.m;
    o["degeneracy"] = s.degeneracy;
    o["asymmetry"] = s.asymmetry;
    ojson ev = ojson::array();
    for (int k = 0; k < std::min<int>(4, static_cast<int>(s.eigenvalues.size())); ++k) {
      ev.push_back(s.eigenvalues[k] > 0.0 ? num(-std::log(s.eigenvalues[k]) / r.eps) : ojson(nullptr));
    }
    o["eigenvalue_energies"] = ev;
    a.push_back(o);
  }
  return a;
}

CsvTable trace_table(const PropagatorResult& r) {
  CsvTable t;
  t.header = {"tau", "trace"};
  for (const SectorResult& s : r.sectors) t.header.push_back("trace_m" + std::to_string(s.m));
  for (std::size_t k = 0; k < r.tau.size(); ++k) {
    std::vector<double> row{r.tau[k], r.trace[k]};
    for (const SectorResult& s : r.sectors) row.push_back(s.trace[k]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable amplitude_table(const PropagatorResult& r) {
  CsvTable t;
  t.header = {"sector", "tau", "q", "q_prime", "K"};
  const int n = static_cast<int>(r.grid.size());
  const int stride = std::max(1, (n + 199) / 200);
  for (const SectorResult& s : r.sectors) {
    for (std::size_t a = 0; a < s.amplitude.size(); ++a) {
      const double tau = r.amplitude_steps[a] * r.eps;
      for (int i = 0; i < n; i += stride) {
        for (int j = 0; j < n; j += stride) {
          t.rows.push_back({static_cast<double>(s.m), tau, r.grid[i][0], r.grid[j][0], s.amplitude[a](i, j)});
        }
      }
    }
  }
  return t;
}

RunArtifacts run_propagate(const RunConfig& c) {
  const GeometryBundle bundle(make_geometry(c));
  const PropagatorResult r = propagate(bundle, c.slice, c.propagate);
  ojson out = header(c);
  out["measure"] = std::string(to_string(r.measure));
  out["veff"] = r.effective_potential;
  const ojson slice = slice_json(c);
  for (const auto& [k, v] : slice.items()) out[k] = v;
  out["grid"] = {{"kind", std::string(to_string(r.kind))}, {"points", r.grid.size()}};
  ojson tau = ojson::array(), trace = ojson::array();
  for (std::size_t k = 0; k < r.tau.size(); ++k) {
    tau.push_back(r.tau[k]);
    trace.push_back(r.trace[k]);
  }
  out["tau"] = tau;
  out["trace"] = trace;
  const ojson levels = levels_json(r);
  for (const auto& [k, v] : levels.items()) out[k] = v;
  out["sectors"] = sectors_json(r);
  if (r.kind == GridKind::line) {
    // Exact Gaussian over the interior nodes, one kernel support away from the ends.
    const double support = c.propagate.grid.cutoff_widths * std::sqrt(r.amplitude_steps.back() * r.eps *
                                                                      c.particle.hbar / c.particle.mass);
    const double lo = r.grid.front()[0] + support, hi = r.grid.back()[0] - support;
    double worst = 0.0;
    const Matrix& k = r.sectors.front().amplitude.back();
    for (std::size_t i = 0; i < r.grid.size(); ++i) {
      for (std::size_t j = 0; j < r.grid.size(); ++j) {
        const double x = r.grid[i][0], y = r.grid[j][0];
        if (x < lo || x > hi || y < lo || y > hi) continue;
        const double exact = gaussian_kernel(x - y, r.amplitude_steps.back() * r.eps, c.particle);
        if (exact < 1e-8 * gaussian_kernel(0.0, r.amplitude_steps.back() * r.eps, c.particle)) continue;
        worst = std::max(worst, std::abs(k(i, j) / exact - 1.0));
      }
    }
    out["gaussian_max_relative_error"] = worst;
  }
  RunArtifacts art;
  art.result_json = out.dump(2) + "\n";
  if (!r.tau.empty()) art.files["trace.csv"] = to_csv(trace_table(r));
  art.files["amplitude.csv"] = to_csv(amplitude_table(r));
  return art;
}

RunArtifacts run_compare(const RunConfig& c) {
  const GeometryBundle bundle(make_geometry(c));
  const MeasureComparison m = compare_measures(bundle, c.slice, c.propagate);
  ojson out = header(c);
  const ojson slice = slice_json(c);
  for (const auto& [k, v] : slice.items()) out[k] = v;
  out["reference_shift"] = m.reference_shift;
  out["qep"] = levels_json(m.qep);
  out["naive-dewitt"] = levels_json(m.naive);
  ojson rows = ojson::array();
  CsvTable csv;
  csv.header = {"label", "energy_qep", "energy_naive", "shift", "reference_shift"};
  std::size_t s = 0;
  for (const EnergyLevel& lq : m.qep.levels) {
    for (const EnergyLevel& ln : m.naive.levels) {
      if (ln.label != lq.label) continue;
      rows.push_back({{"label", lq.label}, {"qep", lq.energy}, {"naive-dewitt", ln.energy}, {"shift", m.shift[s]}});
      csv.rows.push_back({static_cast<double>(lq.label), lq.energy, ln.energy, m.shift[s], m.reference_shift});
      ++s;
    }
  }
  out["comparison"] = rows;
  double mean = 0.0;
  for (double v : m.shift) mean += v;
  out["mean_shift"] = m.shift.empty() ? ojson(nullptr) : ojson(mean / m.shift.size());
  RunArtifacts art;
  art.result_json = out.dump(2) + "\n";
  art.files["comparison.csv"] = to_csv(csv);
  return art;
}

}  // namespace

std::string version() { return TORSIONGEO_VERSION; }

RunArtifacts run(const RunConfig& config, std::uint64_t seed) {
  switch (config.command) {
    case Command::geom: return run_geom(config, seed);
    case Command::traj: return run_traj(config);
    case Command::defect: return run_defect(config);
    case Command::propagate: return run_propagate(config);
    case Command::compare_measures: return run_compare(config);
  }
  fail(ErrorKind::ValidationError, "unknown command");
}

void write_artifacts(const RunArtifacts& artifacts, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::ValidationError, "cannot create output directory '" + dir + "': " + ec.message());
  const auto base = std::filesystem::path(dir);
  write_text_file((base / "result.json").string(), artifacts.result_json);
  for (const auto& [name, content] : artifacts.files) write_text_file((base / name).string(), content);
}

std::string manifest_json(const RunConfig& config, const RunArtifacts& artifacts, const ManifestInfo& info) {
  char hash[17];
  std::snprintf(hash, sizeof(hash), "%016llx", fnv1a64(config.canonical));
  ojson m;
  m["tool"] = "torsiongeo";
  m["version"] = version();
  m["command"] = std::string(to_string(config.command));
  m["config_hash"] = std::string("fnv1a64:") + hash;
  m["config"] = nlohmann::json::parse(config.canonical);
  m["seed"] = info.seed;
  m["threads"] = thread_count();
  m["simd"] = std::string(simd::isa_name(simd::active_isa()));
  m["versions"] = {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                   {"compiler", __VERSION__}};
  ojson files = ojson::array({"result.json"});
  for (const auto& [name, content] : artifacts.files) files.push_back(name);
  m["artifacts"] = files;
  m["volatile"] = {{"wall_time_seconds", info.wall_time_seconds}, {"timestamp", info.timestamp}};
  return m.dump(2) + "\n";
}

}  // namespace torsiongeo
