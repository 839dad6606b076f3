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

#ifndef JIM_NUMERIC_TENSOR_H_
#define JIM_NUMERIC_TENSOR_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/StdVector>

namespace jim::numeric {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;

// Dense row-major array of doubles. Rank-1 tensors behave as a single row
// when viewed as a matrix; rank-2 tensors are [rows x cols].
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);
  Tensor(std::vector<std::size_t> shape, std::vector<double> values);

  static Tensor Vector(std::vector<double> values);
  static Tensor Matrix(std::size_t rows, std::size_t cols,
                       std::vector<double> values);
  static Tensor Zeros(std::size_t rows, std::size_t cols);
  static Tensor FromMatrix(const RowMatrix& m);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  // Matrix view: rank-1 is 1 x n, rank-2 is shape[0] x shape[1].
  std::size_t rows() const;
  std::size_t cols() const;

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& at(std::size_t r, std::size_t c) { return values_[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const {
    return values_[r * cols() + c];
  }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::span<double> row(std::size_t r);
  std::span<const double> row(std::size_t r) const;
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }

  MatrixMap AsMatrix();
  ConstMatrixMap AsMatrix() const;

  void Fill(double v);
  bool AllFinite() const;
  // Throws NumericError naming `where` if any value is NaN or Inf.
  void CheckFinite(std::string_view where) const;
  Tensor ZerosLike() const { return Tensor(shape_, 0.0); }

  bool operator==(const Tensor& other) const = default;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double, Eigen::aligned_allocator<double>> values_;
};

std::string ShapeString(const std::vector<std::size_t>& shape);

// Named reference to a parameter (or gradient) block owned elsewhere.
struct NamedTensor {
  std::string name;
  Tensor* tensor;
};
struct ConstNamedTensor {
  std::string name;
  const Tensor* tensor;
};

}  // namespace jim::numeric

#endif  // JIM_NUMERIC_TENSOR_H_
