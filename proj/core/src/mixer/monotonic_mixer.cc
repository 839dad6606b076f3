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

#include "jim/mixer/monotonic_mixer.h"

#include <cmath>
#include <string>
#include <vector>

#include "jim/errors.h"

namespace jim::mixer {
namespace {

using numeric::Activation;

double Act(MixerActivation a, double x) {
  if (a == MixerActivation::kIdentity || x > 0.0) return x;
  return std::expm1(x);
}

double ActGrad(MixerActivation a, double x) {
  if (a == MixerActivation::kIdentity || x > 0.0) return 1.0;
  return std::exp(x);
}

double Sign(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

MonotonicMixer::MonotonicMixer(const MixerShape& shape)
    : shape_(shape),
      hyper_w1_(shape.state_dim, shape.n_agents * shape.embed_dim,
                Activation::kIdentity),
      hyper_b1_(shape.state_dim, shape.embed_dim, Activation::kIdentity),
      hyper_w2_(shape.state_dim, shape.embed_dim, Activation::kIdentity),
      hyper_b2_hidden_(shape.state_dim, shape.embed_dim, Activation::kRelu),
      hyper_b2_out_(shape.embed_dim, 1, Activation::kIdentity) {}

void MonotonicMixer::Initialize(Rng& rng) {
  hyper_w1_.Initialize(rng);
  hyper_b1_.Initialize(rng);
  hyper_w2_.Initialize(rng);
  hyper_b2_hidden_.Initialize(rng);
  hyper_b2_out_.Initialize(rng);
}

Tensor MonotonicMixer::Forward(const Tensor& agent_qs, const Tensor& states,
                               Cache* cache) const {
  const std::size_t n = shape_.n_agents;
  const std::size_t e = shape_.embed_dim;
  if (agent_qs.cols() != n || states.cols() != shape_.state_dim ||
      agent_qs.rows() != states.rows()) {
    throw DimensionError("qmix_mix: agent values " +
                         numeric::ShapeString(agent_qs.shape()) + " and state " +
                         numeric::ShapeString(states.shape()) +
                         " do not match the mixer (" + std::to_string(n) +
                         " agents, state " + std::to_string(shape_.state_dim) +
                         ")");
  }
  const std::size_t batch = agent_qs.rows();
  Cache local;
  Cache& c = cache != nullptr ? *cache : local;
  c.agent_qs = agent_qs;
  c.w1_raw = hyper_w1_.Forward(states, &c.w1);
  const Tensor b1 = hyper_b1_.Forward(states, &c.b1);
  c.w2_raw = hyper_w2_.Forward(states, &c.w2);
  const Tensor b2 =
      hyper_b2_out_.Forward(hyper_b2_hidden_.Forward(states, &c.b2_hidden),
                            &c.b2_out);
  c.pre = Tensor::Zeros(batch, e);
  c.hidden = Tensor::Zeros(batch, e);
  Tensor qtot = Tensor::Zeros(batch, 1);
  for (std::size_t b = 0; b < batch; ++b) {
    double total = b2.at(b, 0);
    for (std::size_t k = 0; k < e; ++k) {
      double pre = b1.at(b, k);
      for (std::size_t i = 0; i < n; ++i) {
        pre += agent_qs.at(b, i) * std::abs(c.w1_raw.at(b, i * e + k));
      }
      c.pre.at(b, k) = pre;
      c.hidden.at(b, k) = Act(shape_.activation, pre);
      total += c.hidden.at(b, k) * std::abs(c.w2_raw.at(b, k));
    }
    qtot.at(b, 0) = total;
  }
  qtot.CheckFinite("qmix_mix output");
  return qtot;
}

Tensor MonotonicMixer::Backward(const Tensor& grad_qtot, const Cache& cache,
                                MonotonicMixer* grads) const {
  const std::size_t n = shape_.n_agents;
  const std::size_t e = shape_.embed_dim;
  const std::size_t batch = cache.agent_qs.rows();
  Tensor d_w1 = cache.w1_raw.ZerosLike();
  Tensor d_b1 = Tensor::Zeros(batch, e);
  Tensor d_w2 = cache.w2_raw.ZerosLike();
  Tensor d_b2 = Tensor::Zeros(batch, 1);
  Tensor d_qs = cache.agent_qs.ZerosLike();
  for (std::size_t b = 0; b < batch; ++b) {
    const double g = grad_qtot.at(b, 0);
    d_b2.at(b, 0) = g;
    for (std::size_t k = 0; k < e; ++k) {
      const double w2 = cache.w2_raw.at(b, k);
      d_w2.at(b, k) = g * cache.hidden.at(b, k) * Sign(w2);
      const double d_pre =
          g * std::abs(w2) * ActGrad(shape_.activation, cache.pre.at(b, k));
      d_b1.at(b, k) = d_pre;
      for (std::size_t i = 0; i < n; ++i) {
        const double w1 = cache.w1_raw.at(b, i * e + k);
        d_w1.at(b, i * e + k) = d_pre * cache.agent_qs.at(b, i) * Sign(w1);
        d_qs.at(b, i) += d_pre * std::abs(w1);
      }
    }
  }
  hyper_w1_.Backward(d_w1, cache.w1, &grads->hyper_w1_);
  hyper_b1_.Backward(d_b1, cache.b1, &grads->hyper_b1_);
  hyper_w2_.Backward(d_w2, cache.w2, &grads->hyper_w2_);
  const Tensor d_hidden =
      hyper_b2_out_.Backward(d_b2, cache.b2_out, &grads->hyper_b2_out_);
  hyper_b2_hidden_.Backward(d_hidden, cache.b2_hidden,
                            &grads->hyper_b2_hidden_);
  return d_qs;
}

double QmixMix(const MonotonicMixer& mixer, std::span<const double> agent_qs,
               std::span<const double> state) {
  const Tensor qs = Tensor::Matrix(
      1, agent_qs.size(), std::vector<double>(agent_qs.begin(), agent_qs.end()));
  const Tensor s = Tensor::Matrix(
      1, state.size(), std::vector<double>(state.begin(), state.end()));
  return mixer.Forward(qs, s).at(0, 0);
}

}  // namespace jim::mixer
