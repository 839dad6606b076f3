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

#include "jim/trainer/rollout.h"

#include <algorithm>

#include "jim/errors.h"
#include "jim/partition/partition.h"
#include "jim/policy/selection.h"

namespace jim::trainer {
namespace {

using numeric::Tensor;

std::vector<float> FlattenObs(const std::vector<Tensor>& obs) {
  std::vector<float> flat;
  for (const auto& o : obs) {
    for (double v : o.values()) flat.push_back(static_cast<float>(v));
  }
  return flat;
}

std::vector<float> ToFloat(const Tensor& t) {
  std::vector<float> out;
  out.reserve(t.size());
  for (double v : t.values()) out.push_back(static_cast<float>(v));
  return out;
}

// Rows of the given agents' stored observations.
Tensor ObsRows(const std::vector<float>& flat, int obs_dim,
               const std::vector<int>& agents) {
  Tensor rows = Tensor::Zeros(agents.size(), static_cast<std::size_t>(obs_dim));
  for (std::size_t r = 0; r < agents.size(); ++r) {
    const auto src = flat.begin() + agents[r] * obs_dim;
    std::copy(src, src + obs_dim, rows.row(r).begin());
  }
  return rows;
}

int SampleFrom(const numeric::Distribution& p, Rng& rng) {
  const double u = Uniform01(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(p.size()) - 1;
}

double OptimalPayoff(const env::EnvConfig& config) {
  double best = config.payoff_matrix.empty() ? 0.0
                                             : config.payoff_matrix[0][0];
  for (const auto& row : config.payoff_matrix) {
    for (double v : row) best = std::max(best, v);
  }
  return best;
}

}  // namespace

Tensor StoredObs(const Episode& episode, int t, int agent) {
  const auto src = episode.Obs(t, agent);
  return Tensor::Vector(std::vector<double>(src.begin(), src.end()));
}

RolloutResult RunEpisode(const NetworkBundle& nets, env::Environment& env,
                         std::uint64_t env_seed, const RolloutOptions& options,
                         Rng& rng) {
  std::vector<Tensor> obs = env.Reset(env_seed);
  const int n = env.n_agents();
  const int obs_dim = env.obs_size();
  if (static_cast<std::size_t>(obs_dim) != nets.shape().obs_dim) {
    throw DimensionError("rollout: environment observation size " +
                         std::to_string(obs_dim) + " differs from the networks' " +
                         std::to_string(nets.shape().obs_dim));
  }
  if (static_cast<std::size_t>(n) > nets.shape().max_agents) {
    throw DimensionError("rollout: " + std::to_string(n) +
                         " agents exceed the agent encoding width " +
                         std::to_string(nets.shape().max_agents));
  }
  const bool intentions = nets.has_intentions();
  const auto& bnet = nets.behavior;

  RolloutResult result;
  Episode& ep = result.episode;
  ep.n_agents = n;
  ep.obs_dim = obs_dim;
  ep.state_dim = env.state_size();
  ep.env_seed = env_seed;

  std::vector<int> all_agents(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) all_agents[static_cast<std::size_t>(i)] = i;

  Tensor hidden = Tensor::Zeros(static_cast<std::size_t>(n), bnet.hidden_dim());
  Tensor input =
      Tensor::Zeros(static_cast<std::size_t>(n), bnet.shape().input_dim());
  std::vector<int> prev_z(static_cast<std::size_t>(n), -1);
  std::vector<int> run(static_cast<std::size_t>(n), 0);
  int removed = 0;

  while (true) {
    std::vector<float> flat = FlattenObs(obs);
    const partition::TeamPartition teams = partition::GreedyPartition(
        partition::VisibilityGraph(env.VisibleSets()), rng);

    std::vector<int> team_z;
    std::vector<int> agent_z(static_cast<std::size_t>(n), 0);
    if (intentions) {
      std::vector<int> commanders;
      for (const auto& t : teams.teams) commanders.push_back(t.commander);
      const Tensor q = nets.intention.Forward(ObsRows(flat, obs_dim, commanders));
      for (std::size_t j = 0; j < teams.teams.size(); ++j) {
        int z = 0;
        if (!options.zero_intention) {
          if (options.sampling == config::IntentionSampling::kBoltzmann &&
              options.epsilon > 0.0) {
            z = SampleFrom(policy::PolicyDistribution(q.row(j),
                                                      options.temperature),
                           rng);
          } else {
            z = policy::SelectDiscrete(q.row(j), options.epsilon, rng);
          }
        }
        team_z.push_back(z);
        for (int m : teams.teams[j].members) {
          agent_z[static_cast<std::size_t>(m)] = z;
        }
      }
    }

    if (options.record_episode) {
      ep.obs.push_back(flat);
      ep.states.push_back(ToFloat(env.GlobalState()));
      ep.teams.push_back(teams);
      if (intentions) ep.team_z.push_back(team_z);
    }
    if (env.done()) break;

    for (int i = 0; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      std::vector<double> o(flat.begin() + i * obs_dim,
                            flat.begin() + (i + 1) * obs_dim);
      bnet.BuildInput(o, agent_z[ui], i, input.row(ui));
      if (intentions) {
        if (agent_z[ui] == prev_z[ui]) {
          ++run[ui];
        } else {
          if (run[ui] > 0) result.run_lengths.push_back(run[ui]);
          prev_z[ui] = agent_z[ui];
          run[ui] = 1;
        }
      }
    }
    auto [q, h_next] = bnet.Step(input, hidden);
    hidden = std::move(h_next);
    std::vector<int> actions(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      actions[static_cast<std::size_t>(i)] = policy::SelectDiscrete(
          q.row(static_cast<std::size_t>(i)), options.epsilon, rng);
    }

    env::TrajectoryRecord record;
    if (options.record_trajectory) {
      const env::Snapshot snap = env.Snap();
      record.episode = options.episode_index;
      record.step = env.step_count();
      record.agents = snap.agents;
      record.prey = snap.prey;
      record.actions = actions;
      for (std::size_t j = 0; j < teams.teams.size(); ++j) {
        record.teams.push_back({teams.teams[j].commander,
                                teams.teams[j].members,
                                intentions ? team_z[j] : -1});
      }
      if (intentions) {
        const Tensor oq =
            nets.intention.Forward(ObsRows(flat, obs_dim, all_agents));
        for (int i = 0; i < n; ++i) {
          record.observer_z.push_back(
              policy::MaskedArgmax(oq.row(static_cast<std::size_t>(i))));
        }
      }
    }

    env::StepResult step = env.Step(actions);
    result.total_reward += step.reward;
    ++result.steps;
    removed += step.info.catches + step.info.kills;
    if (options.record_episode) {
      ep.actions.push_back(actions);
      ep.rewards.push_back(step.reward);
    }
    if (options.record_trajectory) {
      record.reward = step.reward;
      result.records.push_back(std::move(record));
    }
    result.terminated = step.terminated;
    obs = std::move(step.observations);
  }
  for (int r : run) {
    if (r > 0) result.run_lengths.push_back(r);
  }
  ep.terminated = result.terminated;

  const env::EnvConfig& cfg = env.config();
  if (env::IsGridKind(cfg.kind)) {
    result.success = cfg.n_enemies > 0
                         ? static_cast<double>(removed) / cfg.n_enemies
                         : 0.0;
  } else {
    result.success = result.total_reward >= OptimalPayoff(cfg) - 1e-9 ? 1.0 : 0.0;
  }
  return result;
}

}  // namespace jim::trainer
