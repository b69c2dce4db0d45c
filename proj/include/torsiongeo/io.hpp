// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

// Plain-text artifact formats. Numbers are written in the shortest form
// that parses back to the same double, so every emitted file is
// byte-stable and re-ingests exactly.

#pragma once

#include <string>
#include <vector>

#include "torsiongeo/triad.hpp"

namespace torsiongeo {

std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  // Index of a header column; -1 when absent.
  int column(const std::string& name) const;
};

std::string to_csv(const CsvTable& table);
void write_csv(const std::string& path, const CsvTable& table);

// Numeric CSV with one header row. Throws ParseError naming the line on
// malformed input or ragged rows.
CsvTable parse_csv(const std::string& text, const std::string& origin = "<string>");
CsvTable read_csv(const std::string& path);

std::string read_text_file(const std::string& path);
// Throws ValidationError when the file cannot be written.
void write_text_file(const std::string& path, const std::string& content);

// Samples a triad on a uniform rectilinear grid in the schema read by
// load_grid_triad_csv: q1..qD, e_1_1..e_D_D (row-major, square triads).
CsvTable sample_triad_grid(const TriadField& triad, const std::vector<double>& lower,
                           const std::vector<double>& upper, const std::vector<int>& counts);

// 64-bit FNV-1a.
unsigned long long fnv1a64(const std::string& data);

}  // namespace torsiongeo
