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

#ifndef JIM_CONFIG_EXPERIMENT_CONFIG_H_
#define JIM_CONFIG_EXPERIMENT_CONFIG_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "jim/env/env_config.h"
#include "jim/mixer/monotonic_mixer.h"

namespace jim::config {

enum class TrainMode { kFullMethod, kFlatQmix, kNoWeighting };

// Prior p(z | o) inside the posterior losses: the chosen intention as a
// one-hot sample, or the Boltzmann distribution over intention values.
enum class KlPrior { kSampled, kBoltzmann };

// How teams pick an intention during training rollouts.
enum class IntentionSampling { kEpsilonGreedy, kBoltzmann };

std::string_view TrainModeName(TrainMode mode);

struct ExperimentConfig {
  env::EnvConfig env;
  TrainMode mode = TrainMode::kFullMethod;

  // Model.
  int n_intentions = 16;
  int hidden_dim = 64;
  int mixer_embed = 32;
  mixer::MixerActivation mixer_activation = mixer::MixerActivation::kElu;
  double temperature = 1.0;
  IntentionSampling intention_sampling = IntentionSampling::kEpsilonGreedy;

  // Objective.
  double gamma = 0.99;
  double lambda_a = 1.0;
  double lambda_d = 1.0;
  double beta = 0.1;  // intrinsic-reward coefficient on the low-level TD
  KlPrior kl_prior = KlPrior::kSampled;
  bool kl_to_intention = false;  // let the posterior losses reach theta
  double eps_gap = 0.01;

  // Optimization.
  double lr = 5e-4;
  double rms_decay = 0.99;
  double rms_eps = 1e-5;
  double grad_clip = 10.0;  // global norm; 0 disables
  int batch_size = 4;
  int buffer_size = 2000;
  int target_sync = 200;  // episodes

  // Exploration.
  double eps_start = 1.0;
  double eps_end = 0.05;
  int anneal_steps = 70000;

  // Budget and reporting.
  std::int64_t total_steps = 150000;
  int total_episodes = 0;  // 0: bounded by total_steps only
  int eval_interval = 10000;  // environment steps between evaluations
  int eval_episodes = 20;
  int final_eval_episodes = 100;
  int dump_episodes = 2;  // greedy episodes dumped per evaluation
  int checkpoint_interval = 0;  // episodes; 0: final checkpoint only
  int adhoc_delta = 2;

  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::string output_dir = "runs";

  bool operator==(const ExperimentConfig&) const = default;

  bool uses_intentions() const { return mode != TrainMode::kFlatQmix; }
  // Agent-id one-hot width, sized for ad-hoc team-size changes.
  int max_agents() const { return env.n_agents + adhoc_delta; }
};

// Parses "[section] key = value" text. Unknown sections or keys and invalid
// values throw ConfigError carrying the dotted field path. An optional
// "env.preset" key loads a named environment preset before other env keys.
ExperimentConfig ParseExperimentConfig(std::string_view text);
ExperimentConfig LoadExperimentConfig(const std::string& path);

// Throws ConfigError on the first invalid field.
void ValidateExperimentConfig(const ExperimentConfig& config);

// Every field in a fixed order; re-parses to an identical config.
std::string CanonicalConfig(const ExperimentConfig& config);

// FNV-1a 64 of the canonical text.
std::uint64_t ConfigHash(const ExperimentConfig& config);
std::string ConfigHashHex(const ExperimentConfig& config);

// Applies one "section.key = value" override.
void SetConfigField(ExperimentConfig& config, std::string_view path,
                    std::string_view value);

}  // namespace jim::config

#endif  // JIM_CONFIG_EXPERIMENT_CONFIG_H_
