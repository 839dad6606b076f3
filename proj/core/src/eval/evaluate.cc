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

#include "jim/eval/evaluate.h"

#include <algorithm>
#include <iostream>
#include <memory>
#include <string>

#include "jim/errors.h"
#include "jim/trainer/rollout.h"

namespace jim::eval {
namespace {

// Stream indices for evaluation randomness.
constexpr std::uint64_t kEnvSeedStream = 0x4556414c;  // env resets
constexpr std::uint64_t kPolicyStream = 0x504f4c49;   // partition ties

EvalMetrics RunEpisodes(const trainer::NetworkBundle& nets,
                        const config::ExperimentConfig& config,
                        const EvalOptions& options,
                        const std::vector<int>& agent_counts) {
  EvalMetrics metrics;
  metrics.episodes = options.episodes;
  Rng rng(DeriveSeed(options.seed, kPolicyStream));
  std::unique_ptr<env::Environment> env;
  int env_agents = -1;
  double success = 0.0;
  for (int k = 0; k < options.episodes; ++k) {
    const int n = agent_counts[static_cast<std::size_t>(k)];
    if (n != env_agents) {
      env::EnvConfig ec = config.env;
      ec.n_agents = n;
      env = env::MakeEnv(ec);
      env_agents = n;
    }
    trainer::RolloutOptions ro;
    ro.epsilon = 0.0;
    ro.zero_intention = options.zero_intention;
    ro.record_episode = false;
    ro.record_trajectory = k < options.dump_episodes;
    ro.episode_index = k;
    trainer::RolloutResult r = trainer::RunEpisode(
        nets, *env, DeriveSeed(options.seed ^ kEnvSeedStream,
                               static_cast<std::uint64_t>(k)),
        ro, rng);
    const double per_agent = r.total_reward / n;
    metrics.episode_returns_per_agent.push_back(per_agent);
    metrics.agent_counts.push_back(n);
    metrics.mean_return_per_agent += per_agent;
    success += r.success;
    metrics.run_lengths.insert(metrics.run_lengths.end(), r.run_lengths.begin(),
                               r.run_lengths.end());
    for (auto& rec : r.records) metrics.records.push_back(std::move(rec));
  }
  if (options.episodes > 0) {
    metrics.mean_return_per_agent /= options.episodes;
    metrics.success_rate = success / options.episodes;
  }
  metrics.per_seed_return[options.seed] = metrics.mean_return_per_agent;
  return metrics;
}

}  // namespace

EvalMetrics Evaluate(const trainer::NetworkBundle& nets,
                     const config::ExperimentConfig& config,
                     const EvalOptions& options) {
  return RunEpisodes(
      nets, config, options,
      std::vector<int>(static_cast<std::size_t>(options.episodes),
                       config.env.n_agents));
}

EvalMetrics AdhocEvaluate(const trainer::NetworkBundle& nets,
                          const config::ExperimentConfig& config, int delta,
                          Rng& count_rng, const EvalOptions& options) {
  delta = std::abs(delta);
  const int base = config.env.n_agents;
  if (static_cast<std::size_t>(base + delta) > nets.shape().max_agents) {
    throw ParameterError("adhoc_evaluate: delta " + std::to_string(delta) +
                         " exceeds the agent encoding width " +
                         std::to_string(nets.shape().max_agents));
  }
  std::vector<int> counts;
  bool warned = false;
  for (int k = 0; k < options.episodes; ++k) {
    int n = base - delta + UniformIndex(count_rng, 2 * delta + 1);
    if (n < 1) {
      if (!warned) {
        std::cerr << "warning: ad-hoc agent count " << n
                  << " clamped to 1\n";
        warned = true;
      }
      n = 1;
    }
    counts.push_back(n);
  }
  return RunEpisodes(nets, config, options, counts);
}

EvalMetrics AggregateSeeds(
    const std::vector<std::pair<std::uint64_t, EvalMetrics>>& per_seed) {
  EvalMetrics out;
  if (per_seed.empty()) return out;
  for (const auto& [seed, m] : per_seed) {
    out.episodes += m.episodes;
    out.mean_return_per_agent += m.mean_return_per_agent;
    out.success_rate += m.success_rate;
    out.per_seed_return[seed] = m.mean_return_per_agent;
    out.episode_returns_per_agent.insert(out.episode_returns_per_agent.end(),
                                         m.episode_returns_per_agent.begin(),
                                         m.episode_returns_per_agent.end());
    out.agent_counts.insert(out.agent_counts.end(), m.agent_counts.begin(),
                            m.agent_counts.end());
  }
  out.mean_return_per_agent /= static_cast<double>(per_seed.size());
  out.success_rate /= static_cast<double>(per_seed.size());
  return out;
}

}  // namespace jim::eval
