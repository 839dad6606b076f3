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

#ifndef JIM_TRAINER_ROLLOUT_H_
#define JIM_TRAINER_ROLLOUT_H_

#include <cstdint>
#include <vector>

#include "jim/config/experiment_config.h"
#include "jim/env/environment.h"
#include "jim/env/trajectory.h"
#include "jim/rng.h"
#include "jim/trainer/network_bundle.h"
#include "jim/trainer/replay.h"

namespace jim::trainer {

struct RolloutOptions {
  double epsilon = 0.0;  // for both intention and action choices
  config::IntentionSampling sampling = config::IntentionSampling::kEpsilonGreedy;
  double temperature = 1.0;
  bool zero_intention = false;  // every team receives intention 0
  bool record_episode = true;
  bool record_trajectory = false;  // also fills observer intentions
  int episode_index = 0;
};

struct RolloutResult {
  Episode episode;
  double total_reward = 0.0;
  int steps = 0;
  bool terminated = false;
  // Fraction of prey removed (grid) or 1 when the optimal cell was reached
  // (matrix game).
  double success = 0.0;
  // Lengths of maximal runs of identical intention received by each agent.
  std::vector<int> run_lengths;
  std::vector<env::TrajectoryRecord> records;
};

// Plays one episode from env.Reset(env_seed). Partitions and intentions are
// recomputed every step, including on the final observation.
RolloutResult RunEpisode(const NetworkBundle& nets, env::Environment& env,
                         std::uint64_t env_seed, const RolloutOptions& options,
                         Rng& rng);

// Observation rounded to the stored precision, as a double tensor.
numeric::Tensor StoredObs(const Episode& episode, int t, int agent);

}  // namespace jim::trainer

#endif  // JIM_TRAINER_ROLLOUT_H_
