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

#ifndef JIM_ENV_ENV_CONFIG_H_
#define JIM_ENV_ENV_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace jim::env {

enum class EnvKind { kPursuit, kPursuitHard, kTiger, kMatrixGame };

std::string_view EnvKindName(EnvKind kind);
std::optional<EnvKind> ParseEnvKind(std::string_view name);

inline bool IsGridKind(EnvKind kind) { return kind != EnvKind::kMatrixGame; }

struct EnvConfig {
  EnvKind kind = EnvKind::kPursuit;
  int n_agents = 6;
  int n_enemies = 4;
  int map_w = 60;
  int map_h = 60;
  int n_walls = 60;
  int view_radius = 3;
  int attack_range = 1;
  int episode_limit = 350;

  // Reward shaping; these are tunable defaults, not measured constants.
  double catch_reward = 10.0;
  double solo_penalty = -2.0;
  double per_hit_reward = 1.0;
  int prey_hp = 5;
  int prey_regen = 1;
  // Probability that a threatened prey takes its escape move instead of a
  // uniformly random one.
  double prey_escape_prob = 1.0;

  // Row player is agent 0, column player agent 1.
  std::vector<std::vector<double>> payoff_matrix;

  std::uint64_t seed = 0;

  bool operator==(const EnvConfig&) const = default;
};

// Climbing game: optimum (0, 0) pays 11, but the penalty cells make
// independent learners drift to the safe (2, 2) cell.
std::vector<std::vector<double>> ClimbingGamePayoff();

// Named presets: pursuit, pursuit_hard, tiger (table settings), the
// desk-scale pursuit_small, and matrix_penalty (climbing game).
std::optional<EnvConfig> PresetConfig(std::string_view name);
std::vector<std::string> PresetNames();

// Throws ConfigError with an "env.<field>" path on the first violation.
void ValidateEnvConfig(const EnvConfig& config);

}  // namespace jim::env

#endif  // JIM_ENV_ENV_CONFIG_H_
