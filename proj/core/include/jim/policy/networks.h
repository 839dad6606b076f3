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

#ifndef JIM_POLICY_NETWORKS_H_
#define JIM_POLICY_NETWORKS_H_

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "jim/numeric/layers.h"
#include "jim/numeric/ops.h"
#include "jim/numeric/tensor.h"
#include "jim/rng.h"

namespace jim::policy {

using numeric::DenseCache;
using numeric::DenseLayer;
using numeric::Distribution;
using numeric::GruCache;
using numeric::GruCell;
using numeric::Tensor;

// Index into the latent intention space.
struct IntentionId {
  int value = 0;
  bool operator==(const IntentionId&) const = default;
};

// High-level intention Q-network: obs -> 64 -> 64 -> 32 -> |Z| Q-values.
class IntentionNet {
 public:
  struct Cache {
    DenseCache fc1, fc2, fc3, head;
  };

  IntentionNet() = default;
  IntentionNet(std::size_t obs_dim, std::size_t n_intentions);

  void Initialize(Rng& rng);
  std::size_t obs_dim() const { return fc1_.in_dim(); }
  std::size_t n_intentions() const { return head_.out_dim(); }

  // obs: [batch x obs_dim] -> [batch x |Z|].
  Tensor Forward(const Tensor& obs, Cache* cache = nullptr) const;
  void Backward(const Tensor& grad_q, const Cache& cache,
                IntentionNet* grads) const;

  template <typename Fn>
  void Visit(Fn&& fn) {
    fc1_.Visit(numeric::Prefixed("fc1/", fn));
    fc2_.Visit(numeric::Prefixed("fc2/", fn));
    fc3_.Visit(numeric::Prefixed("fc3/", fn));
    head_.Visit(numeric::Prefixed("head/", fn));
  }
  template <typename Fn>
  void Visit(Fn&& fn) const {
    fc1_.Visit(numeric::Prefixed("fc1/", fn));
    fc2_.Visit(numeric::Prefixed("fc2/", fn));
    fc3_.Visit(numeric::Prefixed("fc3/", fn));
    head_.Visit(numeric::Prefixed("head/", fn));
  }

 private:
  DenseLayer fc1_, fc2_, fc3_, head_;
};

// Q-values for every intention given one observation.
Tensor IntentionQ(const IntentionNet& net, const Tensor& commander_obs);

struct BehaviorNetShape {
  std::size_t obs_dim = 0;
  std::size_t n_intentions = 0;  // 0: no intention input (flat baseline)
  std::size_t max_agents = 1;
  std::size_t n_actions = 0;
  std::size_t hidden_dim = 64;

  std::size_t input_dim() const { return obs_dim + n_intentions + max_agents; }
};

// Low-level recurrent Q-network shared by all agents:
//   [obs, one-hot(z), one-hot(agent id)] -> 64 relu -> GRU -> 64 relu -> Q.
class BehaviorNet {
 public:
  struct StepCache {
    DenseCache fc_in;
    GruCache gru;
    DenseCache fc_mid, fc_out;
  };

  BehaviorNet() = default;
  explicit BehaviorNet(const BehaviorNetShape& shape);

  void Initialize(Rng& rng);
  const BehaviorNetShape& shape() const { return shape_; }
  std::size_t hidden_dim() const { return shape_.hidden_dim; }

  // Writes the network input for one agent into row (length input_dim).
  // z is ignored when the net has no intention input.
  void BuildInput(std::span<const double> obs, int z, int agent_id,
                  std::span<double> row) const;

  // One recurrent step over a batch. Returns (Q [batch x A], hidden').
  std::pair<Tensor, Tensor> Step(const Tensor& input, const Tensor& hidden,
                                 StepCache* cache = nullptr) const;
  // Back-propagates dL/dQ and dL/dhidden' of one step; returns dL/dhidden.
  Tensor Backward(const Tensor& grad_q, const Tensor& grad_hidden_next,
                  const StepCache& cache, BehaviorNet* grads) const;

  template <typename Fn>
  void Visit(Fn&& fn) {
    fc_in_.Visit(numeric::Prefixed("fc_in/", fn));
    gru_.Visit(numeric::Prefixed("gru/", fn));
    fc_mid_.Visit(numeric::Prefixed("fc_mid/", fn));
    fc_out_.Visit(numeric::Prefixed("fc_out/", fn));
  }
  template <typename Fn>
  void Visit(Fn&& fn) const {
    fc_in_.Visit(numeric::Prefixed("fc_in/", fn));
    gru_.Visit(numeric::Prefixed("gru/", fn));
    fc_mid_.Visit(numeric::Prefixed("fc_mid/", fn));
    fc_out_.Visit(numeric::Prefixed("fc_out/", fn));
  }

 private:
  BehaviorNetShape shape_;
  DenseLayer fc_in_;
  GruCell gru_;
  DenseLayer fc_mid_, fc_out_;
};

// Single-agent convenience wrapper around BehaviorNet::Step.
std::pair<Tensor, Tensor> BehaviorQ(const BehaviorNet& net, const Tensor& obs,
                                    IntentionId z, int agent_id,
                                    const Tensor& hidden);

// Variational posterior q(z | o_t, o_t1): [o_t, o_t1] -> 64 -> 64 -> softmax.
class PosteriorNet {
 public:
  struct Cache {
    DenseCache fc1, fc2, head;
    Tensor probs;
  };

  PosteriorNet() = default;
  PosteriorNet(std::size_t obs_dim, std::size_t n_intentions);

  void Initialize(Rng& rng);
  std::size_t obs_dim() const { return fc1_.in_dim() / 2; }
  std::size_t n_intentions() const { return head_.out_dim(); }

  // pairs: [batch x 2*obs_dim] rows of [o_t, o_t1]. Returns probabilities.
  Tensor Forward(const Tensor& pairs, Cache* cache = nullptr) const;
  // grad_probs is dL/dprobs; softmax is differentiated internally.
  void Backward(const Tensor& grad_probs, const Cache& cache,
                PosteriorNet* grads) const;

  template <typename Fn>
  void Visit(Fn&& fn) {
    fc1_.Visit(numeric::Prefixed("fc1/", fn));
    fc2_.Visit(numeric::Prefixed("fc2/", fn));
    head_.Visit(numeric::Prefixed("head/", fn));
  }
  template <typename Fn>
  void Visit(Fn&& fn) const {
    fc1_.Visit(numeric::Prefixed("fc1/", fn));
    fc2_.Visit(numeric::Prefixed("fc2/", fn));
    head_.Visit(numeric::Prefixed("head/", fn));
  }

 private:
  DenseLayer fc1_, fc2_, head_;
};

// Concatenates two observations into one posterior input row.
Tensor PosteriorInput(const Tensor& o_t, const Tensor& o_t1);

Distribution Posterior(const PosteriorNet& net, const Tensor& o_t,
                       const Tensor& o_t1);

}  // namespace jim::policy

#endif  // JIM_POLICY_NETWORKS_H_
