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

#ifndef JIM_MIXER_MONOTONIC_MIXER_H_
#define JIM_MIXER_MONOTONIC_MIXER_H_

#include <cstddef>
#include <span>

#include "jim/numeric/layers.h"
#include "jim/numeric/tensor.h"
#include "jim/rng.h"

namespace jim::mixer {

using numeric::DenseCache;
using numeric::DenseLayer;
using numeric::Tensor;

enum class MixerActivation { kElu, kIdentity };

struct MixerShape {
  std::size_t n_agents = 0;
  std::size_t state_dim = 0;
  std::size_t embed_dim = 32;
  MixerActivation activation = MixerActivation::kElu;
};

// Two-layer mixing network whose weights are produced from the global state
// by hypernetworks and made non-negative with an absolute value, so the joint
// value is monotone in every per-agent value.
class MonotonicMixer {
 public:
  struct Cache {
    Tensor agent_qs;  // [B x n]
    DenseCache w1, b1, w2, b2_hidden, b2_out;
    Tensor w1_raw;    // [B x n*E]
    Tensor w2_raw;    // [B x E]
    Tensor pre;       // [B x E] hidden pre-activation
    Tensor hidden;    // [B x E]
  };

  MonotonicMixer() = default;
  explicit MonotonicMixer(const MixerShape& shape);

  void Initialize(Rng& rng);
  const MixerShape& shape() const { return shape_; }

  // agent_qs: [B x n], states: [B x state_dim]. Returns Q_tot as [B x 1].
  Tensor Forward(const Tensor& agent_qs, const Tensor& states,
                 Cache* cache = nullptr) const;
  // grad_qtot: [B x 1]. Accumulates hypernetwork gradients and returns
  // dL/dagent_qs.
  Tensor Backward(const Tensor& grad_qtot, const Cache& cache,
                  MonotonicMixer* grads) const;

  // Hypernetwork heads, exposed so tests can construct exact mixers.
  DenseLayer& hyper_w1() { return hyper_w1_; }
  DenseLayer& hyper_b1() { return hyper_b1_; }
  DenseLayer& hyper_w2() { return hyper_w2_; }
  DenseLayer& hyper_b2_hidden() { return hyper_b2_hidden_; }
  DenseLayer& hyper_b2_out() { return hyper_b2_out_; }

  template <typename Fn>
  void Visit(Fn&& fn) {
    hyper_w1_.Visit(numeric::Prefixed("hyper_w1/", fn));
    hyper_b1_.Visit(numeric::Prefixed("hyper_b1/", fn));
    hyper_w2_.Visit(numeric::Prefixed("hyper_w2/", fn));
    hyper_b2_hidden_.Visit(numeric::Prefixed("hyper_b2_hidden/", fn));
    hyper_b2_out_.Visit(numeric::Prefixed("hyper_b2_out/", fn));
  }
  template <typename Fn>
  void Visit(Fn&& fn) const {
    hyper_w1_.Visit(numeric::Prefixed("hyper_w1/", fn));
    hyper_b1_.Visit(numeric::Prefixed("hyper_b1/", fn));
    hyper_w2_.Visit(numeric::Prefixed("hyper_w2/", fn));
    hyper_b2_hidden_.Visit(numeric::Prefixed("hyper_b2_hidden/", fn));
    hyper_b2_out_.Visit(numeric::Prefixed("hyper_b2_out/", fn));
  }

 private:
  MixerShape shape_;
  DenseLayer hyper_w1_;
  DenseLayer hyper_b1_;
  DenseLayer hyper_w2_;
  DenseLayer hyper_b2_hidden_;
  DenseLayer hyper_b2_out_;
};

// Joint value of a single sample.
double QmixMix(const MonotonicMixer& mixer, std::span<const double> agent_qs,
               std::span<const double> state);

}  // namespace jim::mixer

#endif  // JIM_MIXER_MONOTONIC_MIXER_H_
