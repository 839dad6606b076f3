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

#include "jim/env/env_config.h"

#include <string>

#include "jim/errors.h"

namespace jim::env {

std::string_view EnvKindName(EnvKind kind) {
  switch (kind) {
    case EnvKind::kPursuit:
      return "pursuit";
    case EnvKind::kPursuitHard:
      return "pursuit_hard";
    case EnvKind::kTiger:
      return "tiger";
    case EnvKind::kMatrixGame:
      return "matrix_game";
  }
  return "unknown";
}

std::optional<EnvKind> ParseEnvKind(std::string_view name) {
  for (EnvKind k : {EnvKind::kPursuit, EnvKind::kPursuitHard, EnvKind::kTiger,
                    EnvKind::kMatrixGame}) {
    if (EnvKindName(k) == name) return k;
  }
  return std::nullopt;
}

std::vector<std::vector<double>> ClimbingGamePayoff() {
  return {{11.0, -30.0, 0.0}, {-30.0, 7.0, 6.0}, {0.0, 0.0, 5.0}};
}

std::optional<EnvConfig> PresetConfig(std::string_view name) {
  EnvConfig c;
  if (name == "pursuit") {
    c.kind = EnvKind::kPursuit;
    c.n_agents = 6;
    c.n_enemies = 4;
    c.map_w = c.map_h = 60;
    c.n_walls = 60;
  } else if (name == "pursuit_hard") {
    c.kind = EnvKind::kPursuitHard;
    c.n_agents = 6;
    c.n_enemies = 6;
    c.map_w = c.map_h = 100;
    c.n_walls = 300;
  } else if (name == "tiger") {
    c.kind = EnvKind::kTiger;
    c.n_agents = 6;
    c.n_enemies = 24;
    c.map_w = c.map_h = 40;
    c.n_walls = 60;
  } else if (name == "pursuit_small") {
    c.kind = EnvKind::kPursuit;
    c.n_agents = 4;
    c.n_enemies = 2;
    c.map_w = c.map_h = 20;
    c.n_walls = 10;
    c.episode_limit = 100;
    c.prey_escape_prob = 0.5;
  } else if (name == "matrix_penalty") {
    c.kind = EnvKind::kMatrixGame;
    c.n_agents = 2;
    c.n_enemies = 0;
    c.map_w = c.map_h = 0;
    c.n_walls = 0;
    c.view_radius = 0;
    c.attack_range = 0;
    c.episode_limit = 1;
    c.payoff_matrix = ClimbingGamePayoff();
  } else {
    return std::nullopt;
  }
  return c;
}

std::vector<std::string> PresetNames() {
  return {"pursuit", "pursuit_hard", "tiger", "pursuit_small",
          "matrix_penalty"};
}

void ValidateEnvConfig(const EnvConfig& c) {
  auto fail = [](const char* field, const std::string& msg) {
    throw ConfigError(std::string("env.") + field, msg);
  };
  if (c.n_agents < 1) fail("n_agents", "must be >= 1");
  if (c.episode_limit < 1) fail("episode_limit", "must be >= 1");
  if (c.kind == EnvKind::kMatrixGame) {
    if (c.n_agents != 2) fail("n_agents", "matrix games are two-player");
    if (c.payoff_matrix.empty()) fail("payoff_matrix", "must be non-empty");
    for (const auto& row : c.payoff_matrix) {
      if (row.size() != c.payoff_matrix.size()) {
        fail("payoff_matrix", "must be square");
      }
    }
    if (c.episode_limit != 1) fail("episode_limit", "matrix games last 1 step");
    return;
  }
  if (c.n_enemies < 0) fail("n_enemies", "must be >= 0");
  if (c.n_walls < 0) fail("n_walls", "must be >= 0");
  if (c.view_radius < 0) fail("view_radius", "must be >= 0");
  if (c.attack_range < 0) fail("attack_range", "must be >= 0");
  const int min_dim = 2 * c.view_radius + 1;
  if (c.map_w < min_dim) fail("map_w", "must be >= 2*view_radius+1");
  if (c.map_h < min_dim) fail("map_h", "must be >= 2*view_radius+1");
  if (c.prey_hp < 1) fail("prey_hp", "must be >= 1");
  if (c.prey_regen < 0) fail("prey_regen", "must be >= 0");
  if (c.prey_escape_prob < 0.0 || c.prey_escape_prob > 1.0) {
    fail("prey_escape_prob", "must lie in [0, 1]");
  }
  const long cells = static_cast<long>(c.map_w) * c.map_h;
  if (static_cast<long>(c.n_walls) + c.n_agents + c.n_enemies > cells) {
    fail("n_walls", "too many entities for a " + std::to_string(c.map_w) +
                        "x" + std::to_string(c.map_h) + " map");
  }
}

}  // namespace jim::env
