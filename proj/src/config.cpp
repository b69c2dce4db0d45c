// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "torsiongeo/config.hpp"

#include <cmath>
#include <filesystem>
#include <set>

#include "json.hpp"
#include "torsiongeo/catalog.hpp"
#include "torsiongeo/error.hpp"
#include "torsiongeo/io.hpp"

namespace torsiongeo {

using nlohmann::json;

namespace {

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"geom", "traj", "defect", "propagate", "compare-measures"};
  return names;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

const std::set<std::string> kCommon = {"command", "geometry", "a",   "D",    "epsilon", "Omega",
                                       "S0",      "triad_csv", "fd_step", "hbar", "M"};
const std::set<std::string> kGeom = {"points", "eps", "mc_samples"};
const std::set<std::string> kTraj = {"kind", "q0", "v0", "T", "dt", "drift_tolerance"};
const std::set<std::string> kDefect = {"contour", "contour_csv", "holonomy_substeps"};
const std::set<std::string> kSlice = {"N",          "eps",           "scheme",        "order",
                                      "time_contour", "grid_points",   "azimuthal_points", "sectors",
                                      "extent",     "center",        "cutoff_widths", "amplitude_steps",
                                      "fit_spectrum", "fit_tau_min",   "fit_tau_max",   "fit_max_levels",
                                      "fit_residual_threshold"};
const std::set<std::string> kMeasure = {"measure", "veff"};
const std::set<std::string> kGeometryParams = {"a", "D", "epsilon", "Omega", "S0"};

std::set<std::string> allowed_keys(Command c) {
  std::set<std::string> keys = kCommon;
  auto add = [&](const std::set<std::string>& s) { keys.insert(s.begin(), s.end()); };
  switch (c) {
    case Command::geom: add(kGeom); break;
    case Command::traj: add(kTraj); break;
    case Command::defect: add(kDefect); break;
    case Command::propagate:
      add(kSlice);
      add(kMeasure);
      break;
    case Command::compare_measures: add(kSlice); break;
  }
  return keys;
}

[[noreturn]] void invalid(const std::string& key, const std::string& what) {
  fail(ErrorKind::ValidationError, "'" + key + "' " + what);
}

double number(const json& j, const std::string& key) {
  if (!j.is_number()) invalid(key, "must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) invalid(key, "must be finite");
  return v;
}

double number_or(const json& doc, const std::string& key, double fallback) {
  return doc.contains(key) ? number(doc.at(key), key) : fallback;
}

long integer(const json& j, const std::string& key) {
  const double v = number(j, key);
  if (v != std::floor(v) || std::abs(v) > 1e15) invalid(key, "must be an integer");
  return static_cast<long>(v);
}

long integer_or(const json& doc, const std::string& key, long fallback) {
  return doc.contains(key) ? integer(doc.at(key), key) : fallback;
}

bool boolean_or(const json& doc, const std::string& key, bool fallback) {
  if (!doc.contains(key)) return fallback;
  if (!doc.at(key).is_boolean()) invalid(key, "must be true or false");
  return doc.at(key).get<bool>();
}

std::string string_or(const json& doc, const std::string& key, const std::string& fallback) {
  if (!doc.contains(key)) return fallback;
  if (!doc.at(key).is_string()) invalid(key, "must be a string");
  return doc.at(key).get<std::string>();
}

Vector vector_of(const json& j, const std::string& key) {
  if (!j.is_array() || j.empty()) invalid(key, "must be a non-empty array of numbers");
  Vector v(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = number(j[i], key);
  return v;
}

template <typename E>
E choose(const json& doc, const std::string& key, const std::vector<std::pair<std::string, E>>& options, E fallback) {
  const std::string value = string_or(doc, key, "");
  if (value.empty() && !doc.contains(key)) return fallback;
  std::vector<std::string> names;
  for (const auto& [name, e] : options) {
    if (name == value) return e;
    names.push_back(name);
  }
  invalid(key, "must be one of: " + join(names) + " (got '" + value + "')");
}

json vec_json(const Vector& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

}  // namespace

std::string_view to_string(Command c) {
  switch (c) {
    case Command::geom: return "geom";
    case Command::traj: return "traj";
    case Command::defect: return "defect";
    case Command::propagate: return "propagate";
    case Command::compare_measures: return "compare-measures";
  }
  return "geom";
}

Command parse_command(std::string_view name) {
  const auto& names = command_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<Command>(i);
  }
  fail(ErrorKind::ValidationError, "'command' must be one of: " + join(names) + " (got '" + std::string(name) + "')");
}

TriadPtr make_geometry(const RunConfig& config) {
  if (config.geometry == "grid") return load_grid_triad_csv(config.triad_csv, config.fd_step);
  return make_catalog_triad(config.geometry, config.geometry_params);
}

RunConfig parse_config(const std::string& text, std::optional<Command> command_override, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::ParseError, origin + ": " + e.what());
  }
  if (!doc.is_object()) fail(ErrorKind::ParseError, origin + ": top level must be a JSON object");

  RunConfig c;
  if (doc.contains("command")) {
    if (!doc.at("command").is_string()) invalid("command", "must be a string");
    c.command = parse_command(doc.at("command").get<std::string>());
    if (command_override && *command_override != c.command) {
      invalid("command", "is '" + std::string(to_string(c.command)) + "' but the command line asks for '" +
                             std::string(to_string(*command_override)) + "'");
    }
  } else if (command_override) {
    c.command = *command_override;
  } else {
    invalid("command", "is required");
  }
  const auto allowed = allowed_keys(c.command);
  for (const auto& [key, value] : doc.items()) {
    if (!allowed.count(key)) {
      fail(ErrorKind::ValidationError,
           "unknown key '" + key + "' for command " + std::string(to_string(c.command)));
    }
  }

  json canon;
  canon["command"] = std::string(to_string(c.command));

  // Geometry.
  c.geometry = string_or(doc, "geometry", "");
  if (c.geometry.empty()) invalid("geometry", "is required");
  canon["geometry"] = c.geometry;
  c.fd_step = number_or(doc, "fd_step", kDefaultFdStep);
  if (!(c.fd_step > 0.0 && c.fd_step < 0.1)) invalid("fd_step", "must lie in (0, 0.1)");
  if (c.geometry == "grid") {
    c.triad_csv = string_or(doc, "triad_csv", "");
    if (c.triad_csv.empty()) invalid("triad_csv", "is required for geometry 'grid'");
    for (const auto& k : kGeometryParams) {
      if (doc.contains(k)) invalid(k, "does not apply to geometry grid");
    }
    canon["triad_csv"] = c.triad_csv;
    canon["fd_step"] = c.fd_step;
  } else {
    if (doc.contains("triad_csv")) invalid("triad_csv", "applies only to geometry 'grid'");
    if (doc.contains("fd_step")) invalid("fd_step", "applies only to geometry 'grid'");
    for (const auto& k : kGeometryParams) {
      if (doc.contains(k)) {
        c.geometry_params[k] = number(doc.at(k), k);
        canon[k] = c.geometry_params[k];
      }
    }
  }
  c.particle.hbar = number_or(doc, "hbar", 1.0);
  c.particle.mass = number_or(doc, "M", 1.0);
  if (!(c.particle.hbar > 0.0)) invalid("hbar", "must be positive");
  if (!(c.particle.mass > 0.0)) invalid("M", "must be positive");
  canon["hbar"] = c.particle.hbar;
  canon["M"] = c.particle.mass;
  c.slice.particle = c.particle;

  switch (c.command) {
    case Command::geom: {
      if (!doc.contains("points") || !doc.at("points").is_array() || doc.at("points").empty()) {
        invalid("points", "must be a non-empty array of points");
      }
      json pts = json::array();
      for (const auto& p : doc.at("points")) {
        c.points.push_back(vector_of(p, "points"));
        pts.push_back(vec_json(c.points.back()));
      }
      canon["points"] = pts;
      c.mc_samples = static_cast<int>(integer_or(doc, "mc_samples", 0));
      if (c.mc_samples < 0 || c.mc_samples > 100000000) invalid("mc_samples", "must lie in [0, 1e8]");
      canon["mc_samples"] = c.mc_samples;
      c.slice.eps = number_or(doc, "eps", 0.01);
      if (!(c.slice.eps > 0.0)) invalid("eps", "must be positive");
      canon["eps"] = c.slice.eps;
      break;
    }
    case Command::traj: {
      c.kind = choose<PathKind>(doc, "kind", {{"autoparallel", PathKind::autoparallel}, {"geodesic", PathKind::geodesic}},
                                PathKind::autoparallel);
      if (!doc.contains("q0")) invalid("q0", "is required");
      if (!doc.contains("v0")) invalid("v0", "is required");
      c.q0 = vector_of(doc.at("q0"), "q0");
      c.v0 = vector_of(doc.at("v0"), "v0");
      if (c.q0.size() != c.v0.size()) invalid("v0", "must have the same length as q0");
      c.duration = number_or(doc, "T", 1.0);
      c.dt = number_or(doc, "dt", 1e-3);
      c.drift_tolerance = number_or(doc, "drift_tolerance", 1e-8);
      if (!(c.duration > 0.0)) invalid("T", "must be positive");
      if (!(c.dt > 0.0) || c.dt > c.duration) invalid("dt", "must lie in (0, T]");
      if (!(c.drift_tolerance > 0.0)) invalid("drift_tolerance", "must be positive");
      canon["kind"] = std::string(to_string(c.kind));
      canon["q0"] = vec_json(c.q0);
      canon["v0"] = vec_json(c.v0);
      canon["T"] = c.duration;
      canon["dt"] = c.dt;
      canon["drift_tolerance"] = c.drift_tolerance;
      break;
    }
    case Command::defect: {
      if (doc.contains("contour") && doc.contains("contour_csv")) {
        invalid("contour_csv", "cannot be combined with 'contour'");
      }
      if (doc.contains("contour_csv")) {
        c.contour.csv = string_or(doc, "contour_csv", "");
        canon["contour_csv"] = c.contour.csv;
      } else {
        const json cj = doc.contains("contour") ? doc.at("contour") : json::object();
        if (!cj.is_object()) invalid("contour", "must be an object {center, radius, segments, turns}");
        for (const auto& [key, value] : cj.items()) {
          if (key != "center" && key != "radius" && key != "segments" && key != "turns") {
            fail(ErrorKind::ValidationError, "unknown key 'contour." + key + "'");
          }
        }
        if (cj.contains("center")) c.contour.center = vector_of(cj.at("center"), "contour.center");
        if (c.contour.center.size() != 2) invalid("contour.center", "must have two entries");
        c.contour.radius = number_or(cj, "radius", 1.0);
        c.contour.segments = static_cast<int>(integer_or(cj, "segments", 10000));
        c.contour.turns = static_cast<int>(integer_or(cj, "turns", 1));
        if (!(c.contour.radius > 0.0)) invalid("contour.radius", "must be positive");
        if (c.contour.segments < 3) invalid("contour.segments", "must be at least 3");
        if (c.contour.turns == 0) invalid("contour.turns", "must be nonzero");
        canon["contour"] = {{"center", vec_json(c.contour.center)},
                            {"radius", c.contour.radius},
                            {"segments", c.contour.segments},
                            {"turns", c.contour.turns}};
      }
      c.holonomy_substeps = static_cast<int>(integer_or(doc, "holonomy_substeps", 4));
      if (c.holonomy_substeps < 1) invalid("holonomy_substeps", "must be at least 1");
      canon["holonomy_substeps"] = c.holonomy_substeps;
      break;
    }
    case Command::propagate:
    case Command::compare_measures: {
      if (!doc.contains("N")) invalid("N", "is required");
      if (!doc.contains("eps")) invalid("eps", "is required");
      const long n = integer(doc.at("N"), "N");
      if (n < 1 || n > 100000) invalid("N", "must lie in [1, 100000]");
      c.slice.slices = static_cast<int>(n);
      c.slice.eps = number(doc.at("eps"), "eps");
      if (!(c.slice.eps > 0.0)) invalid("eps", "must be positive");
      c.slice.scheme = choose<Scheme>(
          doc, "scheme",
          {{"postpoint", Scheme::postpoint}, {"prepoint", Scheme::prepoint}, {"midpoint", Scheme::midpoint}},
          Scheme::postpoint);
      c.slice.order = static_cast<int>(integer_or(doc, "order", 4));
      if (c.slice.order < 2 || c.slice.order > 4) invalid("order", "must be 2, 3 or 4");
      c.slice.contour = choose<TimeContour>(
          doc, "time_contour", {{"euclidean", TimeContour::euclidean}, {"real-time", TimeContour::real_time}},
          TimeContour::euclidean);
      if (c.command == Command::propagate) {
        c.slice.measure = choose<Measure>(doc, "measure", {{"qep", Measure::qep}, {"naive-dewitt", Measure::naive_dewitt}},
                                          Measure::qep);
        c.slice.effective_potential = boolean_or(doc, "veff", false);
        if (c.slice.effective_potential && c.slice.measure == Measure::qep) {
          invalid("veff", "applies only to measure 'naive-dewitt'");
        }
        canon["measure"] = std::string(to_string(c.slice.measure));
        canon["veff"] = c.slice.effective_potential;
      }
      GridSpec& g = c.propagate.grid;
      g.points = static_cast<int>(integer_or(doc, "grid_points", 0));
      g.azimuthal_points = static_cast<int>(integer_or(doc, "azimuthal_points", 0));
      g.sectors = static_cast<int>(integer_or(doc, "sectors", 4));
      g.extent = number_or(doc, "extent", 5.0);
      g.center = number_or(doc, "center", 0.0);
      g.cutoff_widths = number_or(doc, "cutoff_widths", 12.0);
      if (g.points < 0 || g.points > 20000) invalid("grid_points", "must lie in [0, 20000]");
      if (g.azimuthal_points < 0 || g.azimuthal_points > 100000) invalid("azimuthal_points", "must lie in [0, 100000]");
      if (g.sectors < 1) invalid("sectors", "must be at least 1");
      if (!(g.extent > 0.0)) invalid("extent", "must be positive");
      if (!(g.cutoff_widths >= 6.0)) invalid("cutoff_widths", "must be at least 6");
      if (doc.contains("amplitude_steps")) {
        const Vector s = vector_of(doc.at("amplitude_steps"), "amplitude_steps");
        for (int i = 0; i < s.size(); ++i) {
          if (s[i] != std::floor(s[i]) || s[i] < 1 || s[i] > n) invalid("amplitude_steps", "entries must be integers in [1, N]");
          c.propagate.amplitude_steps.push_back(static_cast<int>(s[i]));
        }
      }
      c.propagate.fit_spectrum = boolean_or(doc, "fit_spectrum", true);
      FitOptions& f = c.propagate.fit;
      f.tau_min = number_or(doc, "fit_tau_min", 0.0);
      f.tau_max = doc.contains("fit_tau_max") ? number(doc.at("fit_tau_max"), "fit_tau_max")
                                              : std::numeric_limits<double>::infinity();
      f.max_levels = static_cast<int>(integer_or(doc, "fit_max_levels", 6));
      f.residual_threshold = number_or(doc, "fit_residual_threshold", 1e-4);
      if (f.tau_min < 0.0) invalid("fit_tau_min", "must be nonnegative");
      if (!(f.tau_max > f.tau_min)) invalid("fit_tau_max", "must exceed fit_tau_min");
      if (f.max_levels < 1 || f.max_levels > 12) invalid("fit_max_levels", "must lie in [1, 12]");
      if (!(f.residual_threshold > 0.0)) invalid("fit_residual_threshold", "must be positive");

      canon["N"] = c.slice.slices;
      canon["eps"] = c.slice.eps;
      canon["scheme"] = std::string(to_string(c.slice.scheme));
      canon["order"] = c.slice.order;
      canon["time_contour"] = std::string(to_string(c.slice.contour));
      canon["grid_points"] = g.points;
      canon["azimuthal_points"] = g.azimuthal_points;
      canon["sectors"] = g.sectors;
      canon["extent"] = g.extent;
      canon["center"] = g.center;
      canon["cutoff_widths"] = g.cutoff_widths;
      json steps = json::array();
      for (int k : c.propagate.amplitude_steps) steps.push_back(k);
      canon["amplitude_steps"] = steps;
      canon["fit_spectrum"] = c.propagate.fit_spectrum;
      canon["fit_tau_min"] = f.tau_min;
      canon["fit_tau_max"] = std::isinf(f.tau_max) ? json(nullptr) : json(f.tau_max);
      canon["fit_max_levels"] = f.max_levels;
      canon["fit_residual_threshold"] = f.residual_threshold;
      break;
    }
  }

  // Build the geometry once so that parameter and file errors surface as
  // configuration errors, and check point dimensions against it.
  const TriadPtr triad = make_geometry(c);
  const int d = triad->dimension();
  for (const Point& p : c.points) {
    if (p.size() != d) invalid("points", "entries must have " + std::to_string(d) + " coordinates");
  }
  if (c.command == Command::traj && c.q0.size() != d) invalid("q0", "must have " + std::to_string(d) + " coordinates");
  if (c.command == Command::defect && d != 2) invalid("geometry", "defect runs need a two-dimensional geometry");

  c.canonical = canon.dump();
  return c;
}

RunConfig load_config(const std::string& path, std::optional<Command> command_override) {
  const std::string text = read_text_file(path);
  // Relative data paths are taken relative to the config file.
  const auto base = std::filesystem::path(path).parent_path();
  auto resolve = [&](std::string& p) {
    if (!p.empty() && std::filesystem::path(p).is_relative()) p = (base / p).lexically_normal().string();
  };
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::ParseError, path + ": " + e.what());
  }
  bool changed = false;
  for (const char* key : {"triad_csv", "contour_csv"}) {
    if (doc.is_object() && doc.contains(key) && doc.at(key).is_string()) {
      std::string p = doc.at(key).get<std::string>();
      resolve(p);
      doc[key] = p;
      changed = true;
    }
  }
  return parse_config(changed ? doc.dump() : text, command_override, path);
}

}  // namespace torsiongeo
