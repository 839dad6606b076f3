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

#ifndef JIM_TRAINER_REPLAY_H_
#define JIM_TRAINER_REPLAY_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "jim/partition/partition.h"
#include "jim/rng.h"

namespace jim::trainer {

// One stored episode of length L. Observations, states, partitions and
// intentions have L + 1 entries (the last describes the final observation);
// actions and rewards have L.
struct Episode {
  int n_agents = 0;
  int obs_dim = 0;
  int state_dim = 0;
  std::uint64_t env_seed = 0;
  bool terminated = false;

  std::vector<std::vector<float>> obs;     // [L+1][n * obs_dim]
  std::vector<std::vector<float>> states;  // [L+1][state_dim]
  std::vector<partition::TeamPartition> teams;
  std::vector<std::vector<int>> team_z;    // [L+1][teams]; empty when flat
  std::vector<std::vector<int>> actions;   // [L][n]
  std::vector<double> rewards;             // [L]

  int length() const { return static_cast<int>(rewards.size()); }
  std::span<const float> Obs(int t, int agent) const {
    return std::span<const float>(obs[t]).subspan(
        static_cast<std::size_t>(agent * obs_dim),
        static_cast<std::size_t>(obs_dim));
  }
  // Intention received by each agent at step t.
  std::vector<int> AgentZ(int t) const;
  bool operator==(const Episode&) const = default;
};

// Ring of whole episodes; the oldest is evicted once full.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void Add(Episode episode);
  std::size_t size() const { return episodes_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Episode& at(std::size_t i) const { return *episodes_[i]; }
  std::shared_ptr<const Episode> shared(std::size_t i) const {
    return episodes_[i];
  }

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<std::shared_ptr<const Episode>> episodes_;
};

struct EpisodeBatch {
  std::vector<std::shared_ptr<const Episode>> episodes;
  std::vector<std::size_t> indices;
  int max_length = 0;
  // mask[b][t] = 1 for the real steps of episode b, 0 for padding.
  std::vector<std::vector<std::uint8_t>> mask;

  std::size_t size() const { return episodes.size(); }
};

// Uniform sample with replacement. Empty when the buffer holds fewer than
// batch_size episodes; the caller skips training.
std::optional<EpisodeBatch> SampleBatch(const ReplayBuffer& buffer,
                                        int batch_size, Rng& rng);

// Builds a batch from explicit episodes.
EpisodeBatch MakeBatch(std::vector<std::shared_ptr<const Episode>> episodes);

struct Schedule {
  double eps_start = 1.0;
  double eps_end = 0.05;
  int anneal_steps = 70000;
};

// Linear interpolation from eps_start to eps_end, clamped.
double EpsilonAt(std::int64_t step, const Schedule& schedule);

}  // namespace jim::trainer

#endif  // JIM_TRAINER_REPLAY_H_
