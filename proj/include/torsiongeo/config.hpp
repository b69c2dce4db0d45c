// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

// Run configuration: one flat JSON object per run. The recognised keys and
// their defaults are listed in the README; unknown keys and keys that do not
// apply to the selected command are rejected by name.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "torsiongeo/defects.hpp"
#include "torsiongeo/dynamics.hpp"
#include "torsiongeo/propagator.hpp"
#include "torsiongeo/short_time.hpp"

namespace torsiongeo {

enum class Command { geom, traj, defect, propagate, compare_measures };

std::string_view to_string(Command c);
// Throws ValidationError listing the allowed commands.
Command parse_command(std::string_view name);

struct ContourSpec {
  Point center = Point::Zero(2);
  double radius = 1.0;
  int segments = 10000;
  int turns = 1;
  std::string csv;  // when set, vertices come from this file (q1, q2 columns)
};

struct RunConfig {
  Command command = Command::geom;
  std::string geometry;
  std::map<std::string, double> geometry_params;
  std::string triad_csv;
  double fd_step = kDefaultFdStep;
  ParticleParams particle;

  // geom
  std::vector<Point> points;
  int mc_samples = 0;

  // traj
  PathKind kind = PathKind::autoparallel;
  Point q0;
  Vector v0;
  double duration = 1.0;
  double dt = 1e-3;
  double drift_tolerance = 1e-8;

  // defect
  ContourSpec contour;
  int holonomy_substeps = 4;

  // propagate, compare-measures (and eps for the geom expectation check)
  SliceConfig slice;
  PropagateOptions propagate;

  // Sorted-key JSON of the validated configuration with defaults applied;
  // the manifest hash is taken over this string.
  std::string canonical;
};

// Parses and validates a JSON document. `command_override`, when given,
// must agree with a "command" key if the file has one.
RunConfig parse_config(const std::string& text, std::optional<Command> command_override = std::nullopt,
                       const std::string& origin = "<config>");
RunConfig load_config(const std::string& path, std::optional<Command> command_override = std::nullopt);

// Builds the geometry named by the config (catalog entry or "grid").
TriadPtr make_geometry(const RunConfig& config);

}  // namespace torsiongeo
