// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

// Batch execution of one configured command. run() is pure: it returns the
// artifact contents, and write_artifacts() puts them on disk.

#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "torsiongeo/config.hpp"

namespace torsiongeo {

struct RunArtifacts {
  std::string result_json;                   // result.json
  std::map<std::string, std::string> files;  // extra files (CSV) by name
};

RunArtifacts run(const RunConfig& config, std::uint64_t seed = 0);

// Creates `dir` if needed and writes result.json plus the extra files.
// Throws ValidationError when the directory is not writable.
void write_artifacts(const RunArtifacts& artifacts, const std::string& dir);

struct ManifestInfo {
  std::uint64_t seed = 0;
  double wall_time_seconds = 0.0;
  std::string timestamp;  // ISO 8601 UTC
};

// Manifest document: tool and library versions, config hash, seed, thread
// count, SIMD path, the artifact list, and a "volatile" object holding the
// wall time and timestamp (the only fields that change between runs).
std::string manifest_json(const RunConfig& config, const RunArtifacts& artifacts, const ManifestInfo& info);

std::string version();

}  // namespace torsiongeo
