// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "torsiongeo/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "torsiongeo/error.hpp"

namespace torsiongeo {

Tensor::Tensor(std::initializer_list<int> extents) { init(std::vector<int>(extents)); }

Tensor::Tensor(const std::vector<int>& extents) { init(extents); }

Tensor Tensor::cube(int dim, int rank) { return Tensor(std::vector<int>(rank, dim)); }

void Tensor::init(const std::vector<int>& extents) {
  if (extents.size() > static_cast<std::size_t>(kMaxRank)) {
    fail(ErrorKind::Unsupported, "tensor rank above 4");
  }
  rank_ = static_cast<int>(extents.size());
  std::size_t n = 1;
  for (int a = 0; a < rank_; ++a) {
    if (extents[a] <= 0) fail(ErrorKind::Unsupported, "tensor extent must be positive");
    ext_[a] = extents[a];
    n *= static_cast<std::size_t>(extents[a]);
  }
  // st_[a] is the stride of axis a; the last axis is contiguous.
  std::size_t s = 1;
  for (int a = rank_ - 1; a >= 1; --a) {
    s *= static_cast<std::size_t>(ext_[a]);
    st_[a - 1] = s;
  }
  data_.assign(n, 0.0);
}

bool Tensor::same_shape(const Tensor& other) const {
  if (rank_ != other.rank_) return false;
  for (int a = 0; a < rank_; ++a) {
    if (ext_[a] != other.ext_[a]) return false;
  }
  return true;
}

double Tensor::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

Tensor& Tensor::operator+=(const Tensor& other) {
  if (!same_shape(other)) fail(ErrorKind::GridMismatch, "tensor shape mismatch in +=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Tensor& Tensor::operator-=(const Tensor& other) {
  if (!same_shape(other)) fail(ErrorKind::GridMismatch, "tensor shape mismatch in -=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Tensor& Tensor::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
Tensor operator*(double s, Tensor a) { return a *= s; }

double max_abs_diff(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) fail(ErrorKind::GridMismatch, "tensor shape mismatch in comparison");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

void TensorValue::validate() const {
  if (static_cast<int>(signature.size()) != values.rank()) {
    fail(ErrorKind::ValidationError, "signature length " + std::to_string(signature.size()) +
                                         " differs from rank " + std::to_string(values.rank()));
  }
  for (int a = 0; a < values.rank(); ++a) {
    if (values.extent(a) != dim()) {
      fail(ErrorKind::ValidationError, "tensor extent differs from base point dimension");
    }
  }
}

}  // namespace torsiongeo
