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

#include "jim/trainer/replay.h"

#include <algorithm>
#include <string>

#include "jim/errors.h"

namespace jim::trainer {

std::vector<int> Episode::AgentZ(int t) const {
  std::vector<int> z(static_cast<std::size_t>(n_agents), 0);
  if (team_z.empty()) return z;
  const auto& p = teams[static_cast<std::size_t>(t)];
  for (std::size_t j = 0; j < p.teams.size(); ++j) {
    for (int m : p.teams[j].members) {
      z[static_cast<std::size_t>(m)] = team_z[static_cast<std::size_t>(t)][j];
    }
  }
  return z;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ParameterError("replay buffer capacity must be > 0");
  episodes_.reserve(capacity);
}

void ReplayBuffer::Add(Episode episode) {
  auto ptr = std::make_shared<const Episode>(std::move(episode));
  if (episodes_.size() < capacity_) {
    episodes_.push_back(std::move(ptr));
  } else {
    episodes_[next_] = std::move(ptr);
  }
  next_ = (next_ + 1) % capacity_;
}

EpisodeBatch MakeBatch(std::vector<std::shared_ptr<const Episode>> episodes) {
  EpisodeBatch batch;
  batch.episodes = std::move(episodes);
  for (const auto& e : batch.episodes) {
    batch.max_length = std::max(batch.max_length, e->length());
  }
  for (const auto& e : batch.episodes) {
    std::vector<std::uint8_t> m(static_cast<std::size_t>(batch.max_length), 0);
    std::fill(m.begin(), m.begin() + e->length(), 1);
    batch.mask.push_back(std::move(m));
  }
  return batch;
}

std::optional<EpisodeBatch> SampleBatch(const ReplayBuffer& buffer,
                                        int batch_size, Rng& rng) {
  if (batch_size <= 0) throw ParameterError("batch size must be positive");
  if (buffer.size() < static_cast<std::size_t>(batch_size)) {
    return std::nullopt;
  }
  std::vector<std::shared_ptr<const Episode>> picked;
  std::vector<std::size_t> indices;
  for (int b = 0; b < batch_size; ++b) {
    const auto i = static_cast<std::size_t>(
        UniformIndex(rng, static_cast<int>(buffer.size())));
    indices.push_back(i);
    picked.push_back(buffer.shared(i));
  }
  EpisodeBatch batch = MakeBatch(std::move(picked));
  batch.indices = std::move(indices);
  return batch;
}

double EpsilonAt(std::int64_t step, const Schedule& s) {
  if (step < 0) throw ParameterError("epsilon_at: negative step");
  if (s.anneal_steps <= 0 || step >= s.anneal_steps) return s.eps_end;
  const double frac =
      static_cast<double>(step) / static_cast<double>(s.anneal_steps);
  return s.eps_start + frac * (s.eps_end - s.eps_start);
}

}  // namespace jim::trainer
