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

#ifndef JIM_EVAL_EVALUATE_H_
#define JIM_EVAL_EVALUATE_H_

#include <cstdint>
#include <map>
#include <vector>

#include "jim/config/experiment_config.h"
#include "jim/env/trajectory.h"
#include "jim/rng.h"
#include "jim/trainer/network_bundle.h"

namespace jim::eval {

struct EvalMetrics {
  int episodes = 0;
  // Team return divided by the number of agents, averaged over episodes.
  double mean_return_per_agent = 0.0;
  // Fraction of prey removed, or of episodes reaching the optimal matrix
  // cell.
  double success_rate = 0.0;
  std::vector<double> episode_returns_per_agent;
  std::vector<int> agent_counts;
  std::map<std::uint64_t, double> per_seed_return;
  // Trajectories of the first dump_episodes episodes.
  std::vector<env::TrajectoryRecord> records;
  // Intention run lengths over all evaluated episodes.
  std::vector<int> run_lengths;

  bool operator==(const EvalMetrics&) const = default;
};

struct EvalOptions {
  int episodes = 100;
  std::uint64_t seed = 0;
  bool zero_intention = false;
  int dump_episodes = 0;
};

// Greedy rollouts; never modifies the networks.
EvalMetrics Evaluate(const trainer::NetworkBundle& nets,
                     const config::ExperimentConfig& config,
                     const EvalOptions& options);

// Like Evaluate, but each episode draws its agent count uniformly from
// [n - delta, n + delta] using count_rng. Counts below 1 are clamped to 1
// with a warning on stderr. Throws ParameterError when n + delta exceeds the
// networks' agent encoding.
EvalMetrics AdhocEvaluate(const trainer::NetworkBundle& nets,
                          const config::ExperimentConfig& config, int delta,
                          Rng& count_rng, const EvalOptions& options);

// Means over seeds; per_seed_return keeps each seed's mean.
EvalMetrics AggregateSeeds(
    const std::vector<std::pair<std::uint64_t, EvalMetrics>>& per_seed);

}  // namespace jim::eval

#endif  // JIM_EVAL_EVALUATE_H_
