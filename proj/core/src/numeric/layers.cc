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

#include "jim/numeric/layers.h"

#include <cmath>
#include <string>

#include "jim/errors.h"

namespace jim::numeric {
namespace {

Tensor ShapedLike(const Tensor& input, std::size_t rows, std::size_t cols) {
  if (input.rank() == 1) return Tensor({cols}, 0.0);
  return Tensor::Zeros(rows, cols);
}

void RequireCols(const Tensor& t, std::size_t cols, const char* what) {
  if (t.cols() != cols) {
    throw DimensionError(std::string(what) + ": expected last dim " +
                         std::to_string(cols) + ", got " +
                         ShapeString(t.shape()));
  }
}

Eigen::Map<const Eigen::RowVectorXd> RowVec(const Tensor& t) {
  return Eigen::Map<const Eigen::RowVectorXd>(
      t.data(), static_cast<Eigen::Index>(t.size()));
}

Eigen::Map<Eigen::RowVectorXd> RowVec(Tensor& t) {
  return Eigen::Map<Eigen::RowVectorXd>(t.data(),
                                        static_cast<Eigen::Index>(t.size()));
}

}  // namespace

std::string_view ActivationName(Activation a) {
  switch (a) {
    case Activation::kIdentity:
      return "identity";
    case Activation::kRelu:
      return "relu";
    case Activation::kTanh:
      return "tanh";
  }
  return "unknown";
}

void InitUniformFanIn(Tensor& t, std::size_t fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (double& v : t.values()) v = dist(rng);
}

DenseLayer::DenseLayer(std::size_t in_dim, std::size_t out_dim,
                       Activation act)
    : weight(Tensor::Zeros(in_dim, out_dim)),
      bias(Tensor({out_dim}, 0.0)),
      activation(act) {}

void DenseLayer::Initialize(Rng& rng) {
  InitUniformFanIn(weight, in_dim(), rng);
  InitUniformFanIn(bias, in_dim(), rng);
}

Tensor DenseLayer::Forward(const Tensor& x, DenseCache* cache) const {
  RequireCols(x, in_dim(), "dense_forward");
  Tensor y = ShapedLike(x, x.rows(), out_dim());
  auto out = y.AsMatrix();
  out.noalias() = x.AsMatrix() * weight.AsMatrix();
  out.rowwise() += RowVec(bias);
  switch (activation) {
    case Activation::kIdentity:
      break;
    case Activation::kRelu:
      out = out.cwiseMax(0.0);
      break;
    case Activation::kTanh:
      out = out.array().tanh().matrix();
      break;
  }
  y.CheckFinite("dense_forward output");
  if (cache != nullptr) {
    cache->input = x;
    cache->output = y;
  }
  return y;
}

Tensor DenseLayer::Backward(const Tensor& grad_out, const DenseCache& cache,
                            DenseLayer* grads) const {
  RequireCols(grad_out, out_dim(), "dense_backward");
  RowMatrix dz = grad_out.AsMatrix();
  const auto y = cache.output.AsMatrix();
  switch (activation) {
    case Activation::kIdentity:
      break;
    case Activation::kRelu:
      dz = (y.array() > 0.0).select(dz, 0.0);
      break;
    case Activation::kTanh:
      dz.array() *= 1.0 - y.array().square();
      break;
  }
  const auto x = cache.input.AsMatrix();
  grads->weight.AsMatrix().noalias() += x.transpose() * dz;
  RowVec(grads->bias) += dz.colwise().sum();
  Tensor dx = ShapedLike(cache.input, cache.input.rows(), in_dim());
  dx.AsMatrix().noalias() = dz * weight.AsMatrix().transpose();
  return dx;
}

GruCell::GruCell(std::size_t input_dim, std::size_t hidden_dim)
    : w_input(Tensor::Zeros(input_dim, 3 * hidden_dim)),
      b_input(Tensor({3 * hidden_dim}, 0.0)),
      w_hidden(Tensor::Zeros(hidden_dim, 3 * hidden_dim)),
      b_hidden(Tensor({3 * hidden_dim}, 0.0)) {}

void GruCell::Initialize(Rng& rng) {
  const std::size_t fan_in = hidden_dim();
  InitUniformFanIn(w_input, fan_in, rng);
  InitUniformFanIn(b_input, fan_in, rng);
  InitUniformFanIn(w_hidden, fan_in, rng);
  InitUniformFanIn(b_hidden, fan_in, rng);
}

Tensor GruCell::Step(const Tensor& x, const Tensor& h, GruCache* cache) const {
  RequireCols(x, input_dim(), "gru_step input");
  RequireCols(h, hidden_dim(), "gru_step hidden");
  if (x.rows() != h.rows()) {
    throw DimensionError("gru_step: batch mismatch between input and hidden");
  }
  const auto H = static_cast<Eigen::Index>(hidden_dim());
  const auto B = static_cast<Eigen::Index>(x.rows());
  RowMatrix gx = x.AsMatrix() * w_input.AsMatrix();
  gx.rowwise() += RowVec(b_input);
  RowMatrix gh = h.AsMatrix() * w_hidden.AsMatrix();
  gh.rowwise() += RowVec(b_hidden);

  auto sigmoid = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  RowMatrix r = (gx.leftCols(H) + gh.leftCols(H)).unaryExpr(sigmoid);
  RowMatrix u = (gx.middleCols(H, H) + gh.middleCols(H, H)).unaryExpr(sigmoid);
  RowMatrix hn = gh.rightCols(H);
  RowMatrix n =
      (gx.rightCols(H).array() + r.array() * hn.array()).tanh().matrix();
  const auto hm = h.AsMatrix();
  Tensor next = ShapedLike(h, static_cast<std::size_t>(B), hidden_dim());
  next.AsMatrix() =
      ((1.0 - u.array()) * n.array() + u.array() * hm.array()).matrix();
  next.CheckFinite("gru_step hidden");
  if (cache != nullptr) {
    cache->input = x;
    cache->hidden = h;
    cache->reset = Tensor::FromMatrix(r);
    cache->update = Tensor::FromMatrix(u);
    cache->candidate = Tensor::FromMatrix(n);
    cache->hidden_candidate = Tensor::FromMatrix(hn);
  }
  return next;
}

std::pair<Tensor, Tensor> GruCell::Backward(const Tensor& grad_next,
                                            const GruCache& cache,
                                            GruCell* grads) const {
  RequireCols(grad_next, hidden_dim(), "gru_backward");
  const auto H = static_cast<Eigen::Index>(hidden_dim());
  const auto dh_next = grad_next.AsMatrix();
  const auto r = cache.reset.AsMatrix();
  const auto u = cache.update.AsMatrix();
  const auto n = cache.candidate.AsMatrix();
  const auto hn = cache.hidden_candidate.AsMatrix();
  const auto h = cache.hidden.AsMatrix();
  const auto x = cache.input.AsMatrix();
  const Eigen::Index B = dh_next.rows();

  RowMatrix dn_pre =
      (dh_next.array() * (1.0 - u.array()) * (1.0 - n.array().square()))
          .matrix();
  RowMatrix du_pre = (dh_next.array() * (h.array() - n.array()) * u.array() *
                      (1.0 - u.array()))
                         .matrix();
  RowMatrix dr_pre =
      (dn_pre.array() * hn.array() * r.array() * (1.0 - r.array())).matrix();

  RowMatrix dgx(B, 3 * H);
  dgx << dr_pre, du_pre, dn_pre;
  RowMatrix dgh(B, 3 * H);
  dgh << dr_pre, du_pre, (dn_pre.array() * r.array()).matrix();

  grads->w_input.AsMatrix().noalias() += x.transpose() * dgx;
  RowVec(grads->b_input) += dgx.colwise().sum();
  grads->w_hidden.AsMatrix().noalias() += h.transpose() * dgh;
  RowVec(grads->b_hidden) += dgh.colwise().sum();

  Tensor dx = ShapedLike(cache.input, cache.input.rows(), input_dim());
  dx.AsMatrix().noalias() = dgx * w_input.AsMatrix().transpose();
  Tensor dh = ShapedLike(cache.hidden, cache.hidden.rows(), hidden_dim());
  dh.AsMatrix() = (dh_next.array() * u.array()).matrix();
  dh.AsMatrix().noalias() += dgh * w_hidden.AsMatrix().transpose();
  return {std::move(dx), std::move(dh)};
}

}  // namespace jim::numeric
