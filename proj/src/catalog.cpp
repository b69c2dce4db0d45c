// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "torsiongeo/catalog.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "torsiongeo/error.hpp"

namespace torsiongeo {

namespace {

// d^k/dt^k sin(t) and cos(t) without the rounding of sin(t + k pi / 2).
double sin_derivative(double t, int k) {
  switch (k % 4) {
    case 0: return std::sin(t);
    case 1: return std::cos(t);
    case 2: return -std::sin(t);
    default: return -std::cos(t);
  }
}

double cos_derivative(double t, int k) {
  switch (k % 4) {
    case 0: return std::cos(t);
    case 1: return -std::sin(t);
    case 2: return -std::cos(t);
    default: return std::sin(t);
  }
}

std::array<int, 3> unit_orders(int a) {
  std::array<int, 3> o{0, 0, 0};
  o[a] = 1;
  return o;
}

}  // namespace

Matrix ChartMapTriad::eval(const Point& q) const {
  const int n = flat_dimension();
  const int d = dimension();
  Matrix e(n, d);
  for (int i = 0; i < n; ++i) {
    for (int mu = 0; mu < d; ++mu) e(i, mu) = partial(q, i, unit_orders(mu));
  }
  return e;
}

Tensor ChartMapTriad::d_eval(const Point& q) const {
  const int n = flat_dimension();
  const int d = dimension();
  Tensor out({n, d, d});
  for (int i = 0; i < n; ++i) {
    for (int mu = 0; mu < d; ++mu) {
      for (int nu = mu; nu < d; ++nu) {
        auto o = unit_orders(mu);
        ++o[nu];
        const double v = partial(q, i, o);
        out(i, mu, nu) = v;
        out(i, nu, mu) = v;
      }
    }
  }
  return out;
}

Tensor ChartMapTriad::dd_eval(const Point& q) const {
  const int n = flat_dimension();
  const int d = dimension();
  Tensor out({n, d, d, d});
  for (int i = 0; i < n; ++i) {
    for (int mu = 0; mu < d; ++mu) {
      for (int nu = 0; nu < d; ++nu) {
        for (int lam = 0; lam < d; ++lam) {
          auto o = unit_orders(mu);
          ++o[nu];
          ++o[lam];
          out(i, mu, nu, lam) = partial(q, i, o);
        }
      }
    }
  }
  return out;
}

AngleJet angle_jet(double x, double y) {
  AngleJet jet{};
  const std::complex<double> z(x, y);
  const std::complex<double> inv = 1.0 / z;
  // n-th derivative of log z.
  const std::array<std::complex<double>, 5> f{std::log(z), inv, -inv * inv, 2.0 * inv * inv * inv,
                                              -6.0 * inv * inv * inv * inv};
  const std::array<std::complex<double>, 5> ipow{1.0, {0.0, 1.0}, -1.0, {0.0, -1.0}, 1.0};
  for (int a = 0; a <= 4; ++a) {
    for (int b = 0; a + b <= 4; ++b) jet[a][b] = (ipow[b] * f[a + b]).imag();
  }
  jet[0][0] = std::atan2(y, x);
  return jet;
}

namespace {

class FlatCartesian final : public ChartMapTriad {
 public:
  explicit FlatCartesian(int dim) : dim_(dim) {}
  std::string name() const override { return "flat-cartesian"; }
  int dimension() const override { return dim_; }
  bool holonomic() const override { return true; }
  double partial(const Point&, int i, const std::array<int, 3>& o) const override {
    int total = 0;
    for (int a = 0; a < 3; ++a) total += o[a];
    return (total == 1 && o[i] == 1) ? 1.0 : 0.0;
  }
  // Higher derivatives vanish identically; skip the generic loops.
  Tensor d_eval(const Point&) const override { return Tensor({dim_, dim_, dim_}); }
  Tensor dd_eval(const Point&) const override { return Tensor({dim_, dim_, dim_, dim_}); }

 private:
  int dim_;
};

class Polar final : public ChartMapTriad {
 public:
  std::string name() const override { return "polar"; }
  int dimension() const override { return 2; }
  bool holonomic() const override { return true; }
  double partial(const Point& q, int i, const std::array<int, 3>& o) const override {
    const double radial = o[0] == 0 ? q[0] : (o[0] == 1 ? 1.0 : 0.0);
    const double angular = i == 0 ? cos_derivative(q[1], o[1]) : sin_derivative(q[1], o[1]);
    return radial * angular;
  }
};

class Sphere final : public ChartMapTriad {
 public:
  explicit Sphere(double a) : a_(a) {}
  std::string name() const override { return "sphere"; }
  int dimension() const override { return 2; }
  int flat_dimension() const override { return 3; }
  bool holonomic() const override { return true; }
  double singular_threshold() const override { return 1e-10 * a_ * a_; }
  double partial(const Point& q, int i, const std::array<int, 3>& o) const override {
    const double th = q[0], ph = q[1];
    switch (i) {
      case 0: return a_ * sin_derivative(th, o[0]) * cos_derivative(ph, o[1]);
      case 1: return a_ * sin_derivative(th, o[0]) * sin_derivative(ph, o[1]);
      default: return o[1] > 0 ? 0.0 : a_ * cos_derivative(th, o[0]);
    }
  }

 private:
  double a_;
};

class Circle final : public ChartMapTriad {
 public:
  explicit Circle(double a) : a_(a) {}
  std::string name() const override { return "circle"; }
  int dimension() const override { return 1; }
  int flat_dimension() const override { return 2; }
  bool holonomic() const override { return true; }
  double partial(const Point& q, int i, const std::array<int, 3>& o) const override {
    return i == 0 ? a_ * cos_derivative(q[0], o[0]) : a_ * sin_derivative(q[0], o[0]);
  }

 private:
  double a_;
};

class Dislocation final : public ChartMapTriad {
 public:
  explicit Dislocation(double epsilon) : beta_(epsilon / (2.0 * std::numbers::pi)) {}
  std::string name() const override { return "dislocation"; }
  int dimension() const override { return 2; }
  bool holonomic() const override { return false; }
  double partial(const Point& q, int i, const std::array<int, 3>& o) const override {
    const bool first_x = o[0] == 1 && o[1] == 0;
    const bool first_y = o[0] == 0 && o[1] == 1;
    if (i == 0) return first_x ? 1.0 : 0.0;
    const AngleJet jet = angle_jet(q[0], q[1]);
    return (first_y ? 1.0 : 0.0) + beta_ * jet[o[0]][o[1]];
  }

 private:
  double beta_;
};

// e^1 = dX^1, e^2 = dX^2, e^3 = dX^3 + (S0/2)(q1 dq2 - q2 dq1) with the
// curvilinear chart X = (q1 + c sin q2, q2 + c sin q3, q3 + c sin q1).
class ConstantTorsionToy final : public TriadField {
 public:
  explicit ConstantTorsionToy(double s0) : s0_(s0) {}
  std::string name() const override { return "constant-torsion-toy"; }
  int dimension() const override { return 3; }
  bool holonomic() const override { return s0_ == 0.0; }

  Matrix eval(const Point& q) const override {
    Matrix e = Matrix::Identity(3, 3);
    e(0, 1) = kChart * std::cos(q[1]);
    e(1, 2) = kChart * std::cos(q[2]);
    e(2, 0) = kChart * std::cos(q[0]) - 0.5 * s0_ * q[1];
    e(2, 1) = 0.5 * s0_ * q[0];
    return e;
  }
  Tensor d_eval(const Point& q) const override {
    Tensor de({3, 3, 3});
    de(0, 1, 1) = -kChart * std::sin(q[1]);
    de(1, 2, 2) = -kChart * std::sin(q[2]);
    de(2, 0, 0) = -kChart * std::sin(q[0]);
    de(2, 0, 1) = -0.5 * s0_;
    de(2, 1, 0) = 0.5 * s0_;
    return de;
  }
  Tensor dd_eval(const Point& q) const override {
    Tensor dde({3, 3, 3, 3});
    dde(0, 1, 1, 1) = -kChart * std::cos(q[1]);
    dde(1, 2, 2, 2) = -kChart * std::cos(q[2]);
    dde(2, 0, 0, 0) = -kChart * std::cos(q[0]);
    return dde;
  }

 private:
  static constexpr double kChart = 0.25;
  double s0_;
};

}  // namespace

double DisclinationTriad::partial_on_branch(const Point& q, double phi, int i,
                                            const std::array<int, 3>& o) const {
  AngleJet jet = angle_jet(q[0], q[1]);
  jet[0][0] = phi;
  const int a = o[0], b = o[1];
  const double identity = (o[i] == 1 && a + b == 1) ? 1.0 : 0.0;
  // x^1 = q1 + Omega q2 phi, x^2 = q2 - Omega q1 phi; Leibniz on the linear factor.
  if (i == 0) {
    const double term = q[1] * jet[a][b] + (b > 0 ? b * jet[a][b - 1] : 0.0);
    return identity + omega_ * term;
  }
  const double term = q[0] * jet[a][b] + (a > 0 ? a * jet[a - 1][b] : 0.0);
  return identity - omega_ * term;
}

double DisclinationTriad::partial(const Point& q, int i, const std::array<int, 3>& orders) const {
  return partial_on_branch(q, std::atan2(q[1], q[0]), i, orders);
}

Matrix DisclinationTriad::eval_on_branch(const Point& q, double phi) const {
  Matrix e(2, 2);
  for (int i = 0; i < 2; ++i) {
    for (int mu = 0; mu < 2; ++mu) e(i, mu) = partial_on_branch(q, phi, i, unit_orders(mu));
  }
  return e;
}

Matrix disclination_metric(double omega, const Point& q) {
  const double r2 = q.squaredNorm();
  Eigen::Vector2d t(q[1], -q[0]);
  Matrix g = Matrix::Identity(2, 2) - (2.0 * omega / r2) * (t * t.transpose());
  return g;
}

TriadPtr flat_cartesian(int dim) { return std::make_shared<FlatCartesian>(dim); }
TriadPtr polar() { return std::make_shared<Polar>(); }
TriadPtr sphere(double a) { return std::make_shared<Sphere>(a); }
TriadPtr circle(double a) { return std::make_shared<Circle>(a); }
TriadPtr dislocation(double epsilon) { return std::make_shared<Dislocation>(epsilon); }
TriadPtr disclination(double omega) { return std::make_shared<DisclinationTriad>(omega); }
TriadPtr constant_torsion_toy(double s0) { return std::make_shared<ConstantTorsionToy>(s0); }

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries{
      {"flat-cartesian", {"D"}},     {"polar", {}},
      {"sphere", {"a"}},             {"circle", {"a"}},
      {"dislocation", {"epsilon"}},  {"disclination", {"Omega"}},
      {"constant-torsion-toy", {"S0"}},
  };
  return entries;
}

namespace {

double param_or(const std::map<std::string, double>& params, const std::string& key, double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

}  // namespace

TriadPtr make_catalog_triad(const std::string& name, const std::map<std::string, double>& params) {
  const CatalogEntry* entry = nullptr;
  for (const auto& e : catalog()) {
    if (e.name == name) entry = &e;
  }
  if (!entry) {
    std::ostringstream os;
    os << "geometry '" << name << "' is not in the catalog; allowed:";
    for (const auto& e : catalog()) os << ' ' << e.name;
    fail(ErrorKind::ValidationError, os.str());
  }
  for (const auto& [key, value] : params) {
    bool known = false;
    for (const auto& p : entry->parameters) known = known || p == key;
    if (!known) fail(ErrorKind::ValidationError, "parameter '" + key + "' does not apply to geometry " + name);
    if (!std::isfinite(value)) fail(ErrorKind::ValidationError, "parameter '" + key + "' must be finite");
  }
  if (name == "flat-cartesian") {
    const double d = param_or(params, "D", 2.0);
    if (d != std::floor(d) || d < 1 || d > 4) fail(ErrorKind::ValidationError, "'D' must be an integer in [1, 4]");
    return flat_cartesian(static_cast<int>(d));
  }
  if (name == "polar") return polar();
  if (name == "sphere" || name == "circle") {
    const double a = param_or(params, "a", 1.0);
    if (!(a > 0.0)) fail(ErrorKind::ValidationError, "'a' must be positive");
    return name == "sphere" ? sphere(a) : circle(a);
  }
  if (name == "dislocation") return dislocation(param_or(params, "epsilon", 0.01));
  if (name == "disclination") {
    const double omega = param_or(params, "Omega", 0.05);
    if (!(std::abs(omega) < 0.1)) fail(ErrorKind::ValidationError, "'Omega' must satisfy |Omega| < 0.1");
    return disclination(omega);
  }
  return constant_torsion_toy(param_or(params, "S0", 0.2));
}

}  // namespace torsiongeo
