// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "torsiongeo/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "torsiongeo/error.hpp"

namespace torsiongeo {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

std::string to_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out += ',';
    out += table.header[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::string& path, const CsvTable& table) { write_text_file(path, to_csv(table)); }

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  for (auto& f : fields) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
  }
  return fields;
}

}  // namespace

CsvTable parse_csv(const std::string& text, const std::string& origin) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_fields(line);
    if (table.header.empty()) {
      table.header = fields;
      continue;
    }
    if (fields.size() != table.header.size()) {
      fail(ErrorKind::ParseError, origin + ":" + std::to_string(lineno) + ": expected " +
                                      std::to_string(table.header.size()) + " fields, found " +
                                      std::to_string(fields.size()));
    }
    std::vector<double> row;
    for (const auto& f : fields) {
      double v = 0.0;
      const auto r = std::from_chars(f.data(), f.data() + f.size(), v);
      if (r.ec != std::errc() || r.ptr != f.data() + f.size()) {
        fail(ErrorKind::ParseError, origin + ":" + std::to_string(lineno) + ": '" + f + "' is not a number");
      }
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) fail(ErrorKind::ParseError, origin + ": missing header row");
  return table;
}

CsvTable read_csv(const std::string& path) { return parse_csv(read_text_file(path), path); }

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::ParseError, "cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::ValidationError, "cannot write '" + path + "'");
  out << content;
  if (!out) fail(ErrorKind::ValidationError, "short write to '" + path + "'");
}

CsvTable sample_triad_grid(const TriadField& triad, const std::vector<double>& lower, const std::vector<double>& upper,
                           const std::vector<int>& counts) {
  const int d = triad.dimension();
  if (static_cast<int>(lower.size()) != d || static_cast<int>(upper.size()) != d ||
      static_cast<int>(counts.size()) != d) {
    fail(ErrorKind::GridMismatch, "grid bounds do not match the triad dimension");
  }
  if (triad.flat_dimension() != d) fail(ErrorKind::Unsupported, "grid export needs a square triad");
  CsvTable t;
  for (int a = 0; a < d; ++a) t.header.push_back("q" + std::to_string(a + 1));
  for (int i = 0; i < d; ++i) {
    for (int mu = 0; mu < d; ++mu) t.header.push_back("e_" + std::to_string(i + 1) + "_" + std::to_string(mu + 1));
  }
  std::vector<int> idx(d, 0);
  long total = 1;
  for (int c : counts) {
    if (c < 2) fail(ErrorKind::ValidationError, "grid needs at least two nodes per axis");
    total *= c;
  }
  for (long n = 0; n < total; ++n) {
    long rem = n;
    Point q(d);
    // Last axis varies fastest.
    for (int a = d - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(rem % counts[a]);
      rem /= counts[a];
      q[a] = lower[a] + (upper[a] - lower[a]) * idx[a] / (counts[a] - 1);
    }
    const Matrix e = triad.eval(q);
    std::vector<double> row(q.data(), q.data() + d);
    for (int i = 0; i < d; ++i) {
      for (int mu = 0; mu < d; ++mu) row.push_back(e(i, mu));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

unsigned long long fnv1a64(const std::string& data) {
  unsigned long long h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace torsiongeo
