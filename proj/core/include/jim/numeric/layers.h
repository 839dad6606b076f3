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

#ifndef JIM_NUMERIC_LAYERS_H_
#define JIM_NUMERIC_LAYERS_H_

#include <cstddef>
#include <string_view>
#include <utility>

#include "jim/numeric/params.h"
#include "jim/numeric/tensor.h"
#include "jim/rng.h"

namespace jim::numeric {

enum class Activation { kIdentity, kRelu, kTanh };

std::string_view ActivationName(Activation a);

// Fills t with uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) draws.
void InitUniformFanIn(Tensor& t, std::size_t fan_in, Rng& rng);

struct DenseCache {
  Tensor input;
  Tensor output;
};

// y = activation(x W + b), batched over the rows of x.
class DenseLayer {
 public:
  DenseLayer() = default;
  DenseLayer(std::size_t in_dim, std::size_t out_dim, Activation activation);

  std::size_t in_dim() const { return weight.rows(); }
  std::size_t out_dim() const { return weight.cols(); }

  void Initialize(Rng& rng);

  // x is [batch x in_dim] (or a rank-1 vector of length in_dim).
  Tensor Forward(const Tensor& x, DenseCache* cache = nullptr) const;
  // Accumulates parameter gradients into *grads and returns dL/dx.
  Tensor Backward(const Tensor& grad_out, const DenseCache& cache,
                  DenseLayer* grads) const;

  template <typename Fn>
  void Visit(Fn&& fn) {
    fn("weight", weight);
    fn("bias", bias);
  }
  template <typename Fn>
  void Visit(Fn&& fn) const {
    fn("weight", weight);
    fn("bias", bias);
  }

  Tensor weight;  // [in x out]
  Tensor bias;    // [out]
  Activation activation = Activation::kIdentity;
};

struct GruCache {
  Tensor input;
  Tensor hidden;
  Tensor reset;
  Tensor update;
  Tensor candidate;
  Tensor hidden_candidate;  // h W_hn + b_hn, before the reset gate
};

// Gated recurrent cell, gate order (reset, update, candidate):
//   r  = sigmoid(x W_r + b_ir + h U_r + b_hr)
//   u  = sigmoid(x W_u + b_iu + h U_u + b_hu)
//   n  = tanh(x W_n + b_in + r * (h U_n + b_hn))
//   h' = (1 - u) * n + u * h
class GruCell {
 public:
  GruCell() = default;
  GruCell(std::size_t input_dim, std::size_t hidden_dim);

  std::size_t input_dim() const { return w_input.rows(); }
  std::size_t hidden_dim() const { return w_hidden.rows(); }

  void Initialize(Rng& rng);

  Tensor Step(const Tensor& x, const Tensor& h, GruCache* cache = nullptr) const;
  // Returns (dL/dx, dL/dh) given dL/dh'.
  std::pair<Tensor, Tensor> Backward(const Tensor& grad_next,
                                     const GruCache& cache,
                                     GruCell* grads) const;

  template <typename Fn>
  void Visit(Fn&& fn) {
    fn("w_input", w_input);
    fn("b_input", b_input);
    fn("w_hidden", w_hidden);
    fn("b_hidden", b_hidden);
  }
  template <typename Fn>
  void Visit(Fn&& fn) const {
    fn("w_input", w_input);
    fn("b_input", b_input);
    fn("w_hidden", w_hidden);
    fn("b_hidden", b_hidden);
  }

  Tensor w_input;   // [in x 3H]
  Tensor b_input;   // [3H]
  Tensor w_hidden;  // [H x 3H]
  Tensor b_hidden;  // [3H]
};

}  // namespace jim::numeric

#endif  // JIM_NUMERIC_LAYERS_H_
