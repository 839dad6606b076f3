// Copyright 2026 The jim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "jim/numeric/tensor.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "jim/errors.h"

namespace jim::numeric {
namespace {

std::size_t Product(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), values_(Product(shape_), fill) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(values.begin(), values.end()) {
  if (Product(shape_) != values_.size()) {
    throw DimensionError("tensor shape " + ShapeString(shape_) + " holds " +
                         std::to_string(Product(shape_)) + " values, got " +
                         std::to_string(values_.size()));
  }
}

Tensor Tensor::Vector(std::vector<double> values) {
  const std::size_t n = values.size();
  return Tensor({n}, std::move(values));
}

Tensor Tensor::Matrix(std::size_t rows, std::size_t cols,
                      std::vector<double> values) {
  return Tensor({rows, cols}, std::move(values));
}

Tensor Tensor::Zeros(std::size_t rows, std::size_t cols) {
  return Tensor({rows, cols}, 0.0);
}

Tensor Tensor::FromMatrix(const RowMatrix& m) {
  Tensor t = Zeros(static_cast<std::size_t>(m.rows()),
                   static_cast<std::size_t>(m.cols()));
  t.AsMatrix() = m;
  return t;
}

std::size_t Tensor::rows() const {
  if (shape_.empty()) return 0;
  return shape_.size() == 1 ? 1 : shape_[0];
}

std::size_t Tensor::cols() const {
  if (shape_.empty()) return 0;
  return shape_.size() == 1 ? shape_[0] : size() / shape_[0];
}

std::span<double> Tensor::row(std::size_t r) {
  return std::span<double>(values_).subspan(r * cols(), cols());
}

std::span<const double> Tensor::row(std::size_t r) const {
  return std::span<const double>(values_).subspan(r * cols(), cols());
}

MatrixMap Tensor::AsMatrix() {
  return MatrixMap(values_.data(), static_cast<Eigen::Index>(rows()),
                   static_cast<Eigen::Index>(cols()));
}

ConstMatrixMap Tensor::AsMatrix() const {
  return ConstMatrixMap(values_.data(), static_cast<Eigen::Index>(rows()),
                        static_cast<Eigen::Index>(cols()));
}

void Tensor::Fill(double v) { std::fill(values_.begin(), values_.end(), v); }

bool Tensor::AllFinite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

void Tensor::CheckFinite(std::string_view where) const {
  if (!AllFinite()) {
    throw NumericError("non-finite value in " + std::string(where));
  }
}

std::string ShapeString(const std::vector<std::size_t>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

}  // namespace jim::numeric
