// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "torsiongeo/triad.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "torsiongeo/error.hpp"

namespace torsiongeo {

Tensor TriadField::d_eval(const Point&) const {
  fail(ErrorKind::DerivativeUnavailable, name() + " provides no first derivatives");
}

Tensor TriadField::dd_eval(const Point&) const {
  fail(ErrorKind::DerivativeUnavailable, name() + " provides no second derivatives");
}

// ---------------------------------------------------------------------------

FiniteDifferenceTriad::FiniteDifferenceTriad(TriadPtr base, double step)
    : base_(std::move(base)), step_(step) {
  if (!base_) fail(ErrorKind::ValidationError, "finite-difference wrapper needs a triad");
  if (!(step_ > 0.0)) fail(ErrorKind::ValidationError, "finite-difference step must be positive");
}

std::string FiniteDifferenceTriad::name() const { return base_->name(); }

double FiniteDifferenceTriad::axis_step(const Point& q, int axis) const {
  return step_ * (1.0 + std::abs(q[axis]));
}

Tensor FiniteDifferenceTriad::d_eval(const Point& q) const {
  const int n = flat_dimension();
  const int d = dimension();
  Tensor out({n, d, d});
  for (int nu = 0; nu < d; ++nu) {
    const double h = axis_step(q, nu);
    Point qp = q, qm = q;
    qp[nu] += h;
    qm[nu] -= h;
    const Matrix diff = (base_->eval(qp) - base_->eval(qm)) / (2.0 * h);
    for (int i = 0; i < n; ++i) {
      for (int mu = 0; mu < d; ++mu) out(i, mu, nu) = diff(i, mu);
    }
  }
  return out;
}

Tensor FiniteDifferenceTriad::dd_eval(const Point& q) const {
  const int n = flat_dimension();
  const int d = dimension();
  Tensor out({n, d, d, d});
  const Matrix e0 = base_->eval(q);
  for (int nu = 0; nu < d; ++nu) {
    const double hn = axis_step(q, nu);
    for (int lam = nu; lam < d; ++lam) {
      Matrix second;
      if (lam == nu) {
        Point qp = q, qm = q;
        qp[nu] += hn;
        qm[nu] -= hn;
        second = (base_->eval(qp) - 2.0 * e0 + base_->eval(qm)) / (hn * hn);
      } else {
        const double hl = axis_step(q, lam);
        Point pp = q, pm = q, mp = q, mm = q;
        pp[nu] += hn; pp[lam] += hl;
        pm[nu] += hn; pm[lam] -= hl;
        mp[nu] -= hn; mp[lam] += hl;
        mm[nu] -= hn; mm[lam] -= hl;
        second = (base_->eval(pp) - base_->eval(pm) - base_->eval(mp) + base_->eval(mm)) /
                 (4.0 * hn * hl);
      }
      for (int i = 0; i < n; ++i) {
        for (int mu = 0; mu < d; ++mu) {
          out(i, mu, nu, lam) = second(i, mu);
          out(i, mu, lam, nu) = second(i, mu);
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

GridTriad::GridTriad(std::vector<double> lower, std::vector<double> spacing, std::vector<int> counts,
                     std::vector<std::vector<double>> values, bool holonomic)
    : lower_(std::move(lower)),
      spacing_(std::move(spacing)),
      counts_(std::move(counts)),
      values_(std::move(values)),
      holonomic_(holonomic) {
  const std::size_t d = lower_.size();
  if (d == 0 || spacing_.size() != d || counts_.size() != d) {
    fail(ErrorKind::ValidationError, "grid axes are inconsistent");
  }
  std::size_t total = 1;
  for (int c : counts_) total *= static_cast<std::size_t>(c);
  if (values_.size() != total) fail(ErrorKind::ValidationError, "grid node count mismatch");
  for (const auto& v : values_) {
    if (v.size() != d * d) fail(ErrorKind::ValidationError, "grid triad entry count mismatch");
  }
}

namespace {

// Lagrange weights on the (up to) four nodes nearest to fractional index u.
int lagrange_stencil(double u, int count, double* w) {
  const int width = std::min(count, 4);
  int first = static_cast<int>(std::floor(u)) - (width - 1) / 2;
  first = std::clamp(first, 0, count - width);
  for (int a = 0; a < width; ++a) {
    double prod = 1.0;
    for (int b = 0; b < width; ++b) {
      if (b != a) prod *= (u - (first + b)) / static_cast<double>(a - b);
    }
    w[a] = prod;
  }
  return first;
}

}  // namespace

Matrix GridTriad::eval(const Point& q) const {
  const int d = dimension();
  if (q.size() != d) fail(ErrorKind::ValidationError, "point dimension differs from grid dimension");
  std::vector<int> first(d), width(d);
  std::vector<std::array<double, 4>> weights(d);
  for (int a = 0; a < d; ++a) {
    const double u = (q[a] - lower_[a]) / spacing_[a];
    if (u < -1.0 || u > counts_[a]) {
      fail(ErrorKind::ParameterOutOfRange, "point outside the triad grid on axis " + std::to_string(a + 1));
    }
    width[a] = std::min(counts_[a], 4);
    first[a] = lagrange_stencil(u, counts_[a], weights[a].data());
  }
  Matrix e = Matrix::Zero(d, d);
  std::vector<int> idx(d, 0);
  while (true) {
    double w = 1.0;
    std::size_t node = 0;
    for (int a = 0; a < d; ++a) {
      w *= weights[a][idx[a]];
      node = node * static_cast<std::size_t>(counts_[a]) + static_cast<std::size_t>(first[a] + idx[a]);
    }
    const auto& v = values_[node];
    for (int i = 0; i < d; ++i) {
      for (int mu = 0; mu < d; ++mu) e(i, mu) += w * v[i * d + mu];
    }
    int a = d - 1;
    while (a >= 0 && ++idx[a] == width[a]) idx[a--] = 0;
    if (a < 0) break;
  }
  return e;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    cell.erase(0, cell.find_first_not_of(" \t\r"));
    cell.erase(cell.find_last_not_of(" \t\r") + 1);
    cells.push_back(cell);
  }
  return cells;
}

double parse_cell(const std::string& cell, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    fail(ErrorKind::ParseError, "non-numeric value '" + cell + "' at " + where);
  }
  if (used != cell.size()) fail(ErrorKind::ParseError, "trailing characters in '" + cell + "' at " + where);
  return v;
}

}  // namespace

TriadPtr load_grid_triad_csv(const std::string& path, double fd_step) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ParseError, "cannot open triad grid '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::ParseError, "empty triad grid file '" + path + "'");
  const auto header = split_csv_line(line);
  int d = 0;
  while (d < static_cast<int>(header.size()) && header[d] == "q" + std::to_string(d + 1)) ++d;
  if (d == 0 || static_cast<int>(header.size()) != d + d * d) {
    fail(ErrorKind::ParseError, "triad grid header must be q1..qD,e_1_1..e_D_D");
  }
  for (int i = 0; i < d; ++i) {
    for (int mu = 0; mu < d; ++mu) {
      const std::string expect = "e_" + std::to_string(i + 1) + "_" + std::to_string(mu + 1);
      if (header[d + i * d + mu] != expect) {
        fail(ErrorKind::ParseError, "triad grid column '" + header[d + i * d + mu] + "', expected '" + expect + "'");
      }
    }
  }
  std::vector<std::vector<double>> coords;
  std::vector<std::vector<double>> entries;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      fail(ErrorKind::ParseError, "row " + std::to_string(row) + " has " + std::to_string(cells.size()) + " columns");
    }
    std::vector<double> c(d), e(d * d);
    for (int a = 0; a < d; ++a) c[a] = parse_cell(cells[a], "row " + std::to_string(row));
    for (int k = 0; k < d * d; ++k) e[k] = parse_cell(cells[d + k], "row " + std::to_string(row));
    coords.push_back(std::move(c));
    entries.push_back(std::move(e));
  }
  if (coords.empty()) fail(ErrorKind::ParseError, "triad grid has no data rows");

  std::vector<double> lower(d), spacing(d);
  std::vector<int> counts(d);
  for (int a = 0; a < d; ++a) {
    std::vector<double> axis;
    for (const auto& c : coords) axis.push_back(c[a]);
    std::sort(axis.begin(), axis.end());
    axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
    if (axis.size() < 2) fail(ErrorKind::ValidationError, "triad grid axis q" + std::to_string(a + 1) + " needs two or more nodes");
    const double h = (axis.back() - axis.front()) / static_cast<double>(axis.size() - 1);
    for (std::size_t k = 1; k < axis.size(); ++k) {
      if (std::abs(axis[k] - axis[k - 1] - h) > 1e-9 * (1.0 + std::abs(h))) {
        fail(ErrorKind::ValidationError, "triad grid axis q" + std::to_string(a + 1) + " is not uniform");
      }
    }
    lower[a] = axis.front();
    spacing[a] = h;
    counts[a] = static_cast<int>(axis.size());
  }
  std::size_t total = 1;
  for (int c : counts) total *= static_cast<std::size_t>(c);
  if (total != coords.size()) fail(ErrorKind::ValidationError, "triad grid is not a complete rectilinear grid");
  std::vector<std::vector<double>> values(total);
  for (std::size_t r = 0; r < coords.size(); ++r) {
    std::size_t node = 0;
    for (int a = 0; a < d; ++a) {
      const long k = std::lround((coords[r][a] - lower[a]) / spacing[a]);
      node = node * static_cast<std::size_t>(counts[a]) + static_cast<std::size_t>(k);
    }
    if (!values[node].empty()) fail(ErrorKind::ValidationError, "duplicate triad grid node");
    values[node] = std::move(entries[r]);
  }
  auto grid = std::make_shared<GridTriad>(lower, spacing, counts, std::move(values), false);
  return std::make_shared<FiniteDifferenceTriad>(grid, fd_step);
}

// ---------------------------------------------------------------------------

MetricOnlyTriad::MetricOnlyTriad(std::string name, int dimension, MetricFn metric)
    : name_(std::move(name)), dim_(dimension), metric_(std::move(metric)) {}

Matrix MetricOnlyTriad::eval(const Point& q) const {
  const Matrix g = metric_(q);
  Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success) {
    fail(ErrorKind::MetricNotPositiveDefinite, name_ + " metric is not positive definite at the queried point");
  }
  return llt.matrixU();
}

TriadPtr make_metric_geometry(std::string name, int dimension, MetricOnlyTriad::MetricFn metric,
                              double fd_step) {
  auto base = std::make_shared<MetricOnlyTriad>(std::move(name), dimension, std::move(metric));
  return std::make_shared<FiniteDifferenceTriad>(base, fd_step);
}

}  // namespace torsiongeo
