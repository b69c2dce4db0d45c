// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

// torsiongeo <command> --config <path> [--out <dir>] [--seed <u64>]
//
// Exit status: 0 success, 1 computation error, 2 configuration error.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "torsiongeo/config.hpp"
#include "torsiongeo/error.hpp"
#include "torsiongeo/io.hpp"
#include "torsiongeo/report.hpp"
#include "torsiongeo/run.hpp"

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace torsiongeo;
  CLI::App app{"Geometry, defects and time-sliced path integrals in spaces with curvature and torsion"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "torsiongeo-out";
  std::uint64_t seed = 0;
  for (const char* name : {"geom", "traj", "defect", "propagate", "compare-measures"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "seed for Monte Carlo checks")->capture_default_str();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  const auto start = std::chrono::steady_clock::now();
  try {
    const RunConfig config = load_config(config_path, parse_command(command));
    const RunArtifacts artifacts = run(config, seed);
    write_artifacts(artifacts, out_dir);
    ManifestInfo info;
    info.seed = seed;
    info.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    info.timestamp = utc_timestamp();
    write_text_file(out_dir + "/manifest.json", manifest_json(config, artifacts, info));
    std::cout << format_report(artifacts.result_json);
    return 0;
  } catch (const Error& e) {
    std::cerr << "torsiongeo: " << e.what() << "\n";
    return is_config_error(e.kind()) ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "torsiongeo: error: " << e.what() << "\n";
    return 1;
  }
}
