// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "torsiongeo/report.hpp"

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>

#include "json.hpp"
#include "torsiongeo/error.hpp"

namespace torsiongeo {

namespace {

using nlohmann::json;

std::string line(const char* fmt, ...) __attribute__((format(printf, 1, 2)));

std::string line(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return std::string(buf) + "\n";
}

double value_or_nan(const json& j) { return j.is_number() ? j.get<double>() : std::nan(""); }

std::string levels_table(const json& doc) {
  if (!doc.contains("levels") || doc["levels"].empty()) return "no results\n";
  std::string out = line("%-6s %18s %12s", "level", "energy", "residual");
  for (const auto& l : doc["levels"]) {
    out += line("%-6d %18.10f %12.3e", l["label"].get<int>(), value_or_nan(l["energy"]), value_or_nan(l["residual"]));
  }
  return out;
}

}  // namespace

std::string format_report(const std::string& result_json) {
  json doc;
  try {
    doc = json::parse(result_json);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::ParseError, std::string("result document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("command")) return "no results\n";
  const std::string cmd = doc["command"].get<std::string>();
  std::string out = line("%s on %s", cmd.c_str(), doc.value("geometry", std::string("?")).c_str());

  if (cmd == "propagate") {
    out += line("measure %s, scheme %s, N = %d, eps = %g", doc.value("measure", std::string()).c_str(),
                doc.value("scheme", std::string()).c_str(), doc.value("N", 0), doc.value("eps", 0.0));
    if (doc.contains("gaussian_max_relative_error")) {
      out += line("max relative deviation from the exact Gaussian: %.3e",
                  value_or_nan(doc["gaussian_max_relative_error"]));
      return out;
    }
    return out + levels_table(doc);
  }
  if (cmd == "compare-measures") {
    if (!doc.contains("comparison") || doc["comparison"].empty()) return out + "no results\n";
    const double ref = value_or_nan(doc["reference_shift"]);
    out += line("%-6s %16s %16s %12s %12s", "level", "E_qep", "E_naive", "dE", "hbar^2R/6M");
    for (const auto& r : doc["comparison"]) {
      out += line("%-6d %16.10f %16.10f %12.6f %12.6f", r["label"].get<int>(), value_or_nan(r["qep"]),
                  value_or_nan(r["naive-dewitt"]), value_or_nan(r["shift"]), ref);
    }
    return out;
  }
  if (cmd == "defect") {
    const auto& b = doc["burgers_vector"];
    out += line("%-28s (%.12g, %.12g)", "Burgers vector", value_or_nan(b[0]), value_or_nan(b[1]));
    if (doc.contains("expected_burgers_vector")) {
      const auto& e = doc["expected_burgers_vector"];
      out += line("%-28s (%.12g, %.12g)", "expected", value_or_nan(e[0]), value_or_nan(e[1]));
    }
    if (doc.contains("frank_deficit")) {
      out += line("%-28s %.12g (expected %.12g)", "Frank rotation deficit", value_or_nan(doc["frank_deficit"]),
                  value_or_nan(doc["expected_frank_deficit"]));
    }
    out += line("%-28s %d", "winding", doc.value("winding", 0));
    return out;
  }
  if (cmd == "geom") {
    if (!doc.contains("points") || doc["points"].empty()) return out + "no results\n";
    out += line("%-5s %14s %14s %14s", "point", "sqrt_g", "R_bar", "V_eff");
    int i = 0;
    for (const auto& p : doc["points"]) {
      out += line("%-5d %14.8g %14.8g %14.8g", i++, value_or_nan(p["sqrt_g"]), value_or_nan(p["scalar_curvature_bar"]),
                  value_or_nan(p["effective_potential"]));
    }
    return out;
  }
  if (cmd == "traj") {
    out += line("%-24s %s", "kind", doc.value("kind", std::string()).c_str());
    for (const char* k : {"samples", "action", "kinetic_drift", "el_residual_max", "straightness_residual"}) {
      if (doc.contains(k)) out += line("%-24s %.6g", k, value_or_nan(doc[k]));
    }
    return out;
  }
  return "no results\n";
}

}  // namespace torsiongeo
