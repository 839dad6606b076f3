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

#include "jim/trainer/network_bundle.h"

#include <cstring>
#include <string>

#include "jim/errors.h"
#include "jim/numeric/params.h"

namespace jim::trainer {
namespace {

std::size_t MetaSize(const numeric::Checkpoint& ckpt, const std::string& key) {
  const auto it = ckpt.metadata.find(key);
  if (it == ckpt.metadata.end()) {
    throw FormatError("checkpoint metadata lacks '" + key + "'");
  }
  return static_cast<std::size_t>(std::stoull(it->second));
}

}  // namespace

NetworkShape MakeNetworkShape(const config::ExperimentConfig& config,
                              const env::Environment& env) {
  NetworkShape s;
  s.obs_dim = static_cast<std::size_t>(env.obs_size());
  s.state_dim = static_cast<std::size_t>(env.state_size());
  s.n_agents = static_cast<std::size_t>(env.n_agents());
  s.max_agents = static_cast<std::size_t>(config.max_agents());
  s.n_actions = static_cast<std::size_t>(env.n_actions());
  s.n_intentions =
      config.uses_intentions() ? static_cast<std::size_t>(config.n_intentions)
                               : 0;
  s.hidden_dim = static_cast<std::size_t>(config.hidden_dim);
  s.mixer_embed = static_cast<std::size_t>(config.mixer_embed);
  s.mixer_activation = config.mixer_activation;
  return s;
}

NetworkBundle::NetworkBundle(const NetworkShape& shape) : shape_(shape) {
  if (shape.n_intentions > 0) {
    intention = policy::IntentionNet(shape.obs_dim, shape.n_intentions);
    posterior = policy::PosteriorNet(shape.obs_dim, shape.n_intentions);
  }
  policy::BehaviorNetShape bs;
  bs.obs_dim = shape.obs_dim;
  bs.n_intentions = shape.n_intentions;
  bs.max_agents = shape.max_agents;
  bs.n_actions = shape.n_actions;
  bs.hidden_dim = shape.hidden_dim;
  behavior = policy::BehaviorNet(bs);
  mixer::MixerShape ms;
  ms.n_agents = shape.n_agents;
  ms.state_dim = shape.mixer_state_dim();
  ms.embed_dim = shape.mixer_embed;
  ms.activation = shape.mixer_activation;
  mixer = mixer::MonotonicMixer(ms);
  target_intention = intention;
  target_behavior = behavior;
  target_mixer = mixer;
}

NetworkBundle NetworkBundle::Create(const NetworkShape& shape, Rng& rng) {
  NetworkBundle nets(shape);
  if (nets.has_intentions()) {
    nets.intention.Initialize(rng);
    nets.posterior.Initialize(rng);
  }
  nets.behavior.Initialize(rng);
  nets.mixer.Initialize(rng);
  nets.SyncTargets();
  return nets;
}

void NetworkBundle::SyncTargets() {
  target_intention = intention;
  target_behavior = behavior;
  target_mixer = mixer;
}

numeric::Checkpoint NetworkBundle::ToCheckpoint() const {
  std::vector<numeric::ConstNamedTensor> params;
  VisitAll([&](std::string_view name, const numeric::Tensor& t) {
    params.push_back({std::string(name), &t});
  });
  numeric::Checkpoint ckpt = numeric::Checkpoint::FromParams(params);
  ckpt.metadata["obs_dim"] = std::to_string(shape_.obs_dim);
  ckpt.metadata["state_dim"] = std::to_string(shape_.state_dim);
  ckpt.metadata["n_agents"] = std::to_string(shape_.n_agents);
  ckpt.metadata["max_agents"] = std::to_string(shape_.max_agents);
  ckpt.metadata["n_actions"] = std::to_string(shape_.n_actions);
  ckpt.metadata["n_intentions"] = std::to_string(shape_.n_intentions);
  ckpt.metadata["hidden_dim"] = std::to_string(shape_.hidden_dim);
  ckpt.metadata["mixer_embed"] = std::to_string(shape_.mixer_embed);
  ckpt.metadata["mixer_activation"] =
      shape_.mixer_activation == mixer::MixerActivation::kElu ? "elu"
                                                              : "identity";
  return ckpt;
}

NetworkBundle NetworkBundle::FromCheckpoint(const numeric::Checkpoint& ckpt) {
  NetworkShape s;
  s.obs_dim = MetaSize(ckpt, "obs_dim");
  s.state_dim = MetaSize(ckpt, "state_dim");
  s.n_agents = MetaSize(ckpt, "n_agents");
  s.max_agents = MetaSize(ckpt, "max_agents");
  s.n_actions = MetaSize(ckpt, "n_actions");
  s.n_intentions = MetaSize(ckpt, "n_intentions");
  s.hidden_dim = MetaSize(ckpt, "hidden_dim");
  s.mixer_embed = MetaSize(ckpt, "mixer_embed");
  const auto act = ckpt.metadata.find("mixer_activation");
  s.mixer_activation =
      act != ckpt.metadata.end() && act->second == "identity"
          ? mixer::MixerActivation::kIdentity
          : mixer::MixerActivation::kElu;
  NetworkBundle nets(s);
  std::vector<numeric::NamedTensor> params;
  nets.VisitAll([&](std::string_view name, numeric::Tensor& t) {
    params.push_back({std::string(name), &t});
  });
  ckpt.ApplyTo(params);
  return nets;
}

void NetworkBundle::Save(const std::filesystem::path& path) const {
  ToCheckpoint().Save(path);
}

NetworkBundle NetworkBundle::Load(const std::filesystem::path& path) {
  return FromCheckpoint(numeric::Checkpoint::Load(path));
}

std::uint64_t NetworkBundle::ParamHash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  VisitAll([&](std::string_view, const numeric::Tensor& t) {
    for (double v : t.values()) {
      std::uint64_t bits = 0;
      std::memcpy(&bits, &v, sizeof(bits));
      for (int b = 0; b < 8; ++b) {
        h ^= (bits >> (8 * b)) & 0xffU;
        h *= 0x100000001b3ULL;
      }
    }
  });
  return h;
}

bool SyncTargets(NetworkBundle& nets, int episodes_done, int interval) {
  if (interval <= 0 || episodes_done <= 0 || episodes_done % interval != 0) {
    return false;
  }
  nets.SyncTargets();
  return true;
}

}  // namespace jim::trainer
