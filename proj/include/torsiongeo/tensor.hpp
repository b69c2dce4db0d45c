// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace torsiongeo {

using Point = Eigen::VectorXd;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Dense row-major array of rank 0..4. Index order follows the symbol as
// written: Gamma_{mu nu}^lambda is stored at (mu, nu, lambda).
class Tensor {
 public:
  static constexpr int kMaxRank = 4;

  Tensor() = default;
  explicit Tensor(std::initializer_list<int> extents);
  explicit Tensor(const std::vector<int>& extents);

  // All extents equal to `dim`.
  static Tensor cube(int dim, int rank);

  int rank() const { return rank_; }
  int extent(int axis) const { return ext_[axis]; }
  std::size_t size() const { return data_.size(); }

  double& operator()(int i) { return data_[i]; }
  double operator()(int i) const { return data_[i]; }
  double& operator()(int i, int j) { return data_[i * st_[0] + j]; }
  double operator()(int i, int j) const { return data_[i * st_[0] + j]; }
  double& operator()(int i, int j, int k) { return data_[i * st_[0] + j * st_[1] + k]; }
  double operator()(int i, int j, int k) const { return data_[i * st_[0] + j * st_[1] + k]; }
  double& operator()(int i, int j, int k, int l) {
    return data_[i * st_[0] + j * st_[1] + k * st_[2] + l];
  }
  double operator()(int i, int j, int k, int l) const {
    return data_[i * st_[0] + j * st_[1] + k * st_[2] + l];
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool same_shape(const Tensor& other) const;
  double max_abs() const;

  Tensor& operator+=(const Tensor& other);
  Tensor& operator-=(const Tensor& other);
  Tensor& operator*=(double s);

 private:
  void init(const std::vector<int>& extents);

  int rank_ = 0;
  std::array<int, kMaxRank> ext_{};
  std::array<std::size_t, kMaxRank> st_{};
  std::vector<double> data_ = std::vector<double>(1, 0.0);
};

Tensor operator+(Tensor a, const Tensor& b);
Tensor operator-(Tensor a, const Tensor& b);
Tensor operator*(double s, Tensor a);

double max_abs_diff(const Tensor& a, const Tensor& b);

enum class IndexPosition { upper, lower };

// A tensor evaluated at a chart point, carrying its index placement.
struct TensorValue {
  std::vector<IndexPosition> signature;
  Tensor values;
  Point base;

  int dim() const { return static_cast<int>(base.size()); }
  // Throws ValidationError if extents differ from dim() or the signature
  // length differs from the array rank.
  void validate() const;
};

}  // namespace torsiongeo
