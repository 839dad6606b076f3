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

#ifndef JIM_TRAINER_NETWORK_BUNDLE_H_
#define JIM_TRAINER_NETWORK_BUNDLE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "jim/config/experiment_config.h"
#include "jim/env/environment.h"
#include "jim/mixer/monotonic_mixer.h"
#include "jim/numeric/checkpoint.h"
#include "jim/policy/networks.h"
#include "jim/rng.h"

namespace jim::trainer {

struct NetworkShape {
  std::size_t obs_dim = 0;
  std::size_t state_dim = 0;  // environment global state
  std::size_t n_agents = 0;
  std::size_t max_agents = 0;
  std::size_t n_actions = 0;
  std::size_t n_intentions = 0;  // 0: no intention level
  std::size_t hidden_dim = 64;
  std::size_t mixer_embed = 32;
  mixer::MixerActivation mixer_activation = mixer::MixerActivation::kElu;

  // Mixer input: global state plus the intention histogram over agents.
  std::size_t mixer_state_dim() const { return state_dim + n_intentions; }
  bool operator==(const NetworkShape&) const = default;
};

NetworkShape MakeNetworkShape(const config::ExperimentConfig& config,
                              const env::Environment& env);

// Online networks (intention, behavior, posterior, mixer) and the target
// copies used for bootstrapped values. Without an intention level the
// intention and posterior networks hold no parameters.
class NetworkBundle {
 public:
  NetworkBundle() = default;
  // Zero-valued parameters of the right shapes; also used for gradients.
  explicit NetworkBundle(const NetworkShape& shape);

  static NetworkBundle Create(const NetworkShape& shape, Rng& rng);

  const NetworkShape& shape() const { return shape_; }
  bool has_intentions() const { return shape_.n_intentions > 0; }

  // Hard copy of every online network into its target.
  void SyncTargets();

  numeric::Checkpoint ToCheckpoint() const;
  static NetworkBundle FromCheckpoint(const numeric::Checkpoint& ckpt);
  void Save(const std::filesystem::path& path) const;
  static NetworkBundle Load(const std::filesystem::path& path);

  // FNV-1a over every parameter value, targets included.
  std::uint64_t ParamHash() const;

  // Online parameters only.
  template <typename Fn>
  void Visit(Fn&& fn) {
    intention.Visit(numeric::Prefixed("intention/", fn));
    behavior.Visit(numeric::Prefixed("behavior/", fn));
    posterior.Visit(numeric::Prefixed("posterior/", fn));
    mixer.Visit(numeric::Prefixed("mixer/", fn));
  }
  template <typename Fn>
  void Visit(Fn&& fn) const {
    intention.Visit(numeric::Prefixed("intention/", fn));
    behavior.Visit(numeric::Prefixed("behavior/", fn));
    posterior.Visit(numeric::Prefixed("posterior/", fn));
    mixer.Visit(numeric::Prefixed("mixer/", fn));
  }

  // Online and target parameters.
  template <typename Fn>
  void VisitAll(Fn&& fn) {
    Visit(fn);
    VisitTargets(fn);
  }
  template <typename Fn>
  void VisitAll(Fn&& fn) const {
    Visit(fn);
    VisitTargets(fn);
  }

  policy::IntentionNet intention;
  policy::BehaviorNet behavior;
  policy::PosteriorNet posterior;
  mixer::MonotonicMixer mixer;

  policy::IntentionNet target_intention;
  policy::BehaviorNet target_behavior;
  mixer::MonotonicMixer target_mixer;

 private:
  template <typename Fn>
  void VisitTargets(Fn& fn) {
    target_intention.Visit(numeric::Prefixed("target_intention/", fn));
    target_behavior.Visit(numeric::Prefixed("target_behavior/", fn));
    target_mixer.Visit(numeric::Prefixed("target_mixer/", fn));
  }
  template <typename Fn>
  void VisitTargets(Fn& fn) const {
    target_intention.Visit(numeric::Prefixed("target_intention/", fn));
    target_behavior.Visit(numeric::Prefixed("target_behavior/", fn));
    target_mixer.Visit(numeric::Prefixed("target_mixer/", fn));
  }

  NetworkShape shape_;
};

// Syncs targets when episodes_done is a positive multiple of interval.
// Returns whether a copy happened.
bool SyncTargets(NetworkBundle& nets, int episodes_done, int interval);

}  // namespace jim::trainer

#endif  // JIM_TRAINER_NETWORK_BUNDLE_H_
