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

#include "jim/policy/networks.h"

#include <algorithm>
#include <string>

#include "jim/errors.h"

namespace jim::policy {

using numeric::Activation;

IntentionNet::IntentionNet(std::size_t obs_dim, std::size_t n_intentions)
    : fc1_(obs_dim, 64, Activation::kRelu),
      fc2_(64, 64, Activation::kRelu),
      fc3_(64, 32, Activation::kRelu),
      head_(32, n_intentions, Activation::kIdentity) {}

void IntentionNet::Initialize(Rng& rng) {
  fc1_.Initialize(rng);
  fc2_.Initialize(rng);
  fc3_.Initialize(rng);
  head_.Initialize(rng);
}

Tensor IntentionNet::Forward(const Tensor& obs, Cache* cache) const {
  if (cache == nullptr) {
    return head_.Forward(fc3_.Forward(fc2_.Forward(fc1_.Forward(obs))));
  }
  Tensor h = fc1_.Forward(obs, &cache->fc1);
  h = fc2_.Forward(h, &cache->fc2);
  h = fc3_.Forward(h, &cache->fc3);
  return head_.Forward(h, &cache->head);
}

void IntentionNet::Backward(const Tensor& grad_q, const Cache& cache,
                            IntentionNet* grads) const {
  Tensor g = head_.Backward(grad_q, cache.head, &grads->head_);
  g = fc3_.Backward(g, cache.fc3, &grads->fc3_);
  g = fc2_.Backward(g, cache.fc2, &grads->fc2_);
  fc1_.Backward(g, cache.fc1, &grads->fc1_);
}

Tensor IntentionQ(const IntentionNet& net, const Tensor& commander_obs) {
  if (commander_obs.size() != net.obs_dim()) {
    throw DimensionError("intention_q: observation length " +
                         std::to_string(commander_obs.size()) +
                         ", expected " + std::to_string(net.obs_dim()));
  }
  return net.Forward(Tensor::Vector(std::vector<double>(
      commander_obs.values().begin(), commander_obs.values().end())));
}

BehaviorNet::BehaviorNet(const BehaviorNetShape& shape)
    : shape_(shape),
      fc_in_(shape.input_dim(), shape.hidden_dim, Activation::kRelu),
      gru_(shape.hidden_dim, shape.hidden_dim),
      fc_mid_(shape.hidden_dim, shape.hidden_dim, Activation::kRelu),
      fc_out_(shape.hidden_dim, shape.n_actions, Activation::kIdentity) {}

void BehaviorNet::Initialize(Rng& rng) {
  fc_in_.Initialize(rng);
  gru_.Initialize(rng);
  fc_mid_.Initialize(rng);
  fc_out_.Initialize(rng);
}

void BehaviorNet::BuildInput(std::span<const double> obs, int z, int agent_id,
                             std::span<double> row) const {
  if (obs.size() != shape_.obs_dim || row.size() != shape_.input_dim()) {
    throw DimensionError("behavior input: observation length " +
                         std::to_string(obs.size()) + ", expected " +
                         std::to_string(shape_.obs_dim));
  }
  if (agent_id < 0 || static_cast<std::size_t>(agent_id) >= shape_.max_agents) {
    throw DimensionError("agent id " + std::to_string(agent_id) +
                         " exceeds the behavior net's agent encoding (" +
                         std::to_string(shape_.max_agents) + ")");
  }
  std::fill(row.begin(), row.end(), 0.0);
  std::copy(obs.begin(), obs.end(), row.begin());
  if (shape_.n_intentions > 0) {
    if (z < 0 || static_cast<std::size_t>(z) >= shape_.n_intentions) {
      throw DimensionError("intention id out of range");
    }
    row[shape_.obs_dim + static_cast<std::size_t>(z)] = 1.0;
  }
  row[shape_.obs_dim + shape_.n_intentions + static_cast<std::size_t>(agent_id)] =
      1.0;
}

std::pair<Tensor, Tensor> BehaviorNet::Step(const Tensor& input,
                                            const Tensor& hidden,
                                            StepCache* cache) const {
  if (cache == nullptr) {
    Tensor h_next = gru_.Step(fc_in_.Forward(input), hidden);
    Tensor q = fc_out_.Forward(fc_mid_.Forward(h_next));
    return {std::move(q), std::move(h_next)};
  }
  Tensor x = fc_in_.Forward(input, &cache->fc_in);
  Tensor h_next = gru_.Step(x, hidden, &cache->gru);
  Tensor m = fc_mid_.Forward(h_next, &cache->fc_mid);
  Tensor q = fc_out_.Forward(m, &cache->fc_out);
  return {std::move(q), std::move(h_next)};
}

Tensor BehaviorNet::Backward(const Tensor& grad_q,
                             const Tensor& grad_hidden_next,
                             const StepCache& cache, BehaviorNet* grads) const {
  Tensor g = fc_out_.Backward(grad_q, cache.fc_out, &grads->fc_out_);
  g = fc_mid_.Backward(g, cache.fc_mid, &grads->fc_mid_);
  g.AsMatrix() += grad_hidden_next.AsMatrix();
  auto [dx, dh] = gru_.Backward(g, cache.gru, &grads->gru_);
  fc_in_.Backward(dx, cache.fc_in, &grads->fc_in_);
  return std::move(dh);
}

std::pair<Tensor, Tensor> BehaviorQ(const BehaviorNet& net, const Tensor& obs,
                                    IntentionId z, int agent_id,
                                    const Tensor& hidden) {
  if (hidden.size() != net.hidden_dim()) {
    throw DimensionError("behavior_q: hidden state has " +
                         std::to_string(hidden.size()) + " values, expected " +
                         std::to_string(net.hidden_dim()));
  }
  Tensor input = Tensor::Zeros(1, net.shape().input_dim());
  net.BuildInput(obs.values(), z.value, agent_id, input.row(0));
  Tensor h = Tensor::Zeros(1, net.hidden_dim());
  std::copy(hidden.values().begin(), hidden.values().end(), h.data());
  auto [q, h_next] = net.Step(input, h);
  return {Tensor::Vector({q.values().begin(), q.values().end()}),
          Tensor::Vector({h_next.values().begin(), h_next.values().end()})};
}

PosteriorNet::PosteriorNet(std::size_t obs_dim, std::size_t n_intentions)
    : fc1_(2 * obs_dim, 64, Activation::kRelu),
      fc2_(64, 64, Activation::kRelu),
      head_(64, n_intentions, Activation::kIdentity) {}

void PosteriorNet::Initialize(Rng& rng) {
  fc1_.Initialize(rng);
  fc2_.Initialize(rng);
  head_.Initialize(rng);
}

Tensor PosteriorNet::Forward(const Tensor& pairs, Cache* cache) const {
  if (cache == nullptr) {
    return numeric::SoftmaxRows(
        head_.Forward(fc2_.Forward(fc1_.Forward(pairs))));
  }
  Tensor h = fc1_.Forward(pairs, &cache->fc1);
  h = fc2_.Forward(h, &cache->fc2);
  cache->probs = numeric::SoftmaxRows(head_.Forward(h, &cache->head));
  return cache->probs;
}

void PosteriorNet::Backward(const Tensor& grad_probs, const Cache& cache,
                            PosteriorNet* grads) const {
  Tensor grad_logits = grad_probs;
  for (std::size_t r = 0; r < grad_probs.rows(); ++r) {
    const auto g = numeric::SoftmaxBackward(cache.probs.row(r), grad_probs.row(r));
    std::copy(g.begin(), g.end(), grad_logits.row(r).begin());
  }
  Tensor g = head_.Backward(grad_logits, cache.head, &grads->head_);
  g = fc2_.Backward(g, cache.fc2, &grads->fc2_);
  fc1_.Backward(g, cache.fc1, &grads->fc1_);
}

Tensor PosteriorInput(const Tensor& o_t, const Tensor& o_t1) {
  if (o_t.size() != o_t1.size()) {
    throw DimensionError("posterior: o_t and o_t1 lengths differ");
  }
  std::vector<double> v(o_t.values().begin(), o_t.values().end());
  v.insert(v.end(), o_t1.values().begin(), o_t1.values().end());
  return Tensor::Vector(std::move(v));
}

Distribution Posterior(const PosteriorNet& net, const Tensor& o_t,
                       const Tensor& o_t1) {
  if (o_t.size() != net.obs_dim()) {
    throw DimensionError("posterior: observation length " +
                         std::to_string(o_t.size()) + ", expected " +
                         std::to_string(net.obs_dim()));
  }
  const Tensor p = net.Forward(PosteriorInput(o_t, o_t1));
  return Distribution(p.values().begin(), p.values().end());
}

}  // namespace jim::policy
