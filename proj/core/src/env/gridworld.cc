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

#include "jim/env/gridworld.h"

#include <algorithm>
#include <climits>
#include <cstdlib>
#include <string>

#include "jim/errors.h"

namespace jim::env {
namespace {

int Chebyshev(Position a, Position b) {
  return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
}

int SquaredDistance(Position a, Position b) {
  const int dx = a.x - b.x;
  const int dy = a.y - b.y;
  return dx * dx + dy * dy;
}

Position Moved(Position p, int action) {
  switch (action) {
    case kUp:
      return {p.x, p.y - 1};
    case kDown:
      return {p.x, p.y + 1};
    case kLeft:
      return {p.x - 1, p.y};
    case kRight:
      return {p.x + 1, p.y};
    default:
      return p;
  }
}

void CheckJointAction(std::span<const int> joint_action, int n_agents,
                      int n_actions) {
  if (static_cast<int>(joint_action.size()) != n_agents) {
    throw DimensionError("joint action has " +
                         std::to_string(joint_action.size()) +
                         " entries for " + std::to_string(n_agents) +
                         " agents");
  }
  for (int a : joint_action) {
    if (a < 0 || a >= n_actions) {
      throw ParameterError("action id " + std::to_string(a) +
                           " out of range");
    }
  }
}

bool IsPursuitKind(EnvKind kind) {
  return kind == EnvKind::kPursuit || kind == EnvKind::kPursuitHard;
}

}  // namespace

GridWorld::GridWorld(EnvConfig config) : config_(std::move(config)) {
  ValidateEnvConfig(config_);
  if (!IsGridKind(config_.kind)) {
    throw ConfigError("env.kind", "GridWorld needs a grid kind");
  }
  Reset(config_.seed);
}

std::unique_ptr<Environment> GridWorld::Clone() const {
  return std::make_unique<GridWorld>(*this);
}

std::vector<Tensor> GridWorld::Reset(std::uint64_t seed) {
  rng_.seed(seed);
  PlaceRandom();
  return Observations();
}

void GridWorld::PlaceRandom() {
  const int n_cells = config_.map_w * config_.map_h;
  std::vector<int> order(n_cells);
  for (int i = 0; i < n_cells; ++i) order[i] = i;
  const int needed = config_.n_walls + config_.n_agents + config_.n_enemies;
  for (int i = 0; i < needed; ++i) {
    const int j = i + UniformIndex(rng_, n_cells - i);
    std::swap(order[i], order[j]);
  }
  auto to_pos = [&](int idx) {
    return Position{idx % config_.map_w, idx / config_.map_w};
  };
  GridLayout layout;
  int k = 0;
  for (int i = 0; i < config_.n_walls; ++i) layout.walls.push_back(to_pos(order[k++]));
  for (int i = 0; i < config_.n_agents; ++i) layout.agents.push_back(to_pos(order[k++]));
  for (int i = 0; i < config_.n_enemies; ++i) layout.prey.push_back(to_pos(order[k++]));
  SetLayout(layout);
}

void GridWorld::SetLayout(const GridLayout& layout) {
  cells_.assign(static_cast<std::size_t>(config_.map_w) * config_.map_h,
                Cell::kEmpty);
  auto occupy = [&](Position p, Cell c) {
    if (!InBounds(p)) throw ConfigError("layout", "position out of bounds");
    if (At(p) != Cell::kEmpty) {
      throw ConfigError("layout", "two entities share a cell");
    }
    Set(p, c);
  };
  for (Position p : layout.walls) occupy(p, Cell::kWall);
  agents_ = layout.agents;
  for (Position p : agents_) occupy(p, Cell::kAgent);
  prey_.clear();
  for (Position p : layout.prey) {
    occupy(p, Cell::kPrey);
    prey_.push_back({p, config_.prey_hp, true});
  }
  config_.n_agents = static_cast<int>(agents_.size());
  config_.n_enemies = static_cast<int>(prey_.size());
  config_.n_walls = static_cast<int>(layout.walls.size());
  last_action_.assign(agents_.size(), -1);
  step_ = 0;
  done_ = false;
}

bool GridWorld::InBounds(Position p) const {
  return p.x >= 0 && p.y >= 0 && p.x < config_.map_w && p.y < config_.map_h;
}

bool GridWorld::IsWall(Position p) const {
  return !InBounds(p) || At(p) == Cell::kWall;
}

int GridWorld::prey_alive() const {
  return static_cast<int>(std::count_if(prey_.begin(), prey_.end(),
                                        [](const Prey& p) { return p.alive; }));
}

int GridWorld::obs_size() const {
  const int side = 2 * config_.view_radius + 1;
  return side * side * kNumChannels + 2 + kNumGridActions;
}

StepResult GridWorld::Step(std::span<const int> joint_action) {
  if (done_) throw InvariantError("step called on a finished episode");
  CheckJointAction(joint_action, n_agents(), n_actions());
  StepResult result;
  MoveAgents(joint_action);
  ResolveAttacks(joint_action, result);
  if (config_.kind == EnvKind::kTiger) {
    for (Prey& p : prey_) {
      if (p.alive) p.hp = std::min(config_.prey_hp, p.hp + config_.prey_regen);
    }
  }
  PreyPolicyStep();
  std::copy(joint_action.begin(), joint_action.end(), last_action_.begin());
  ++step_;
  result.terminated = prey_alive() == 0;
  done_ = result.terminated || step_ >= config_.episode_limit;
  result.done = done_;
  result.observations = Observations();
  return result;
}

void GridWorld::MoveAgents(std::span<const int> joint_action) {
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const int a = joint_action[i];
    if (a == kStay || a == kAttack) continue;
    const Position target = Moved(agents_[i], a);
    if (!InBounds(target) || At(target) != Cell::kEmpty) continue;
    Set(agents_[i], Cell::kEmpty);
    Set(target, Cell::kAgent);
    agents_[i] = target;
  }
}

void GridWorld::ResolveAttacks(std::span<const int> joint_action,
                               StepResult& result) {
  std::vector<std::vector<int>> attackers(prey_.size());
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    if (joint_action[i] != kAttack) continue;
    int best = -1;
    int best_dist = INT_MAX;
    for (std::size_t p = 0; p < prey_.size(); ++p) {
      if (!prey_[p].alive) continue;
      const int d = Chebyshev(agents_[i], prey_[p].pos);
      if (d <= config_.attack_range && d < best_dist) {
        best = static_cast<int>(p);
        best_dist = d;
      }
    }
    if (best < 0) {
      result.reward += config_.solo_penalty;
      ++result.info.solo_attacks;
    } else {
      attackers[best].push_back(static_cast<int>(i));
    }
  }
  for (std::size_t p = 0; p < prey_.size(); ++p) {
    const int k = static_cast<int>(attackers[p].size());
    if (k == 0) continue;
    if (k == 1) {
      result.reward += config_.solo_penalty;
      ++result.info.solo_attacks;
      continue;
    }
    Prey& prey = prey_[p];
    result.info.hits += k;
    bool removed = false;
    if (IsPursuitKind(config_.kind)) {
      result.reward += config_.catch_reward;
      ++result.info.catches;
      removed = true;
    } else {
      prey.hp -= k;
      result.reward += config_.per_hit_reward * k;
      if (prey.hp <= 0) {
        prey.hp = 0;
        ++result.info.kills;
        removed = true;
      }
    }
    if (removed) {
      prey.alive = false;
      Set(prey.pos, Cell::kEmpty);
      result.info.removed_prey.push_back(static_cast<int>(p));
    }
  }
}

std::vector<Position> GridWorld::FreeNeighbors(Position p) const {
  std::vector<Position> out;
  for (int a : {kUp, kDown, kLeft, kRight}) {
    const Position q = Moved(p, a);
    if (InBounds(q) && At(q) == Cell::kEmpty) out.push_back(q);
  }
  return out;
}

void GridWorld::PreyPolicyStep() {
  const int threat_range = 2 * config_.view_radius;
  for (Prey& prey : prey_) {
    if (!prey.alive) continue;
    const std::vector<Position> free = FreeNeighbors(prey.pos);
    int nearest = INT_MAX;
    for (Position a : agents_) nearest = std::min(nearest, Chebyshev(a, prey.pos));
    const bool threatened = nearest <= threat_range;
    bool escape = threatened;
    if (threatened && config_.prey_escape_prob < 1.0) {
      escape = Uniform01(rng_) < config_.prey_escape_prob;
    }
    Position target = prey.pos;
    if (escape) {
      // Stay is a candidate so a cornered prey can hold its cell.
      std::vector<Position> candidates = free;
      candidates.push_back(prey.pos);
      std::vector<Position> best;
      int best_score = -1;
      for (Position c : candidates) {
        int score = INT_MAX;
        for (Position a : agents_) score = std::min(score, SquaredDistance(a, c));
        if (score > best_score) {
          best_score = score;
          best.assign(1, c);
        } else if (score == best_score) {
          best.push_back(c);
        }
      }
      target = best.size() == 1
                   ? best[0]
                   : best[UniformIndex(rng_, static_cast<int>(best.size()))];
    } else if (!free.empty()) {
      target = free[UniformIndex(rng_, static_cast<int>(free.size()))];
    }
    if (!(target == prey.pos)) {
      Set(prey.pos, Cell::kEmpty);
      Set(target, Cell::kPrey);
      prey.pos = target;
    }
  }
}

Tensor GridWorld::Observation(int agent) const {
  const int r = config_.view_radius;
  const int side = 2 * r + 1;
  Tensor obs({static_cast<std::size_t>(obs_size())}, 0.0);
  const Position self = agents_[agent];
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      const Position p{self.x + dx, self.y + dy};
      const std::size_t base =
          static_cast<std::size_t>(((dy + r) * side + (dx + r)) * kNumChannels);
      if (!InBounds(p)) {
        obs[base + kChannelWall] = 1.0;
        continue;
      }
      switch (At(p)) {
        case Cell::kWall:
          obs[base + kChannelWall] = 1.0;
          break;
        case Cell::kPrey:
          obs[base + kChannelPrey] = 1.0;
          break;
        case Cell::kAgent:
          if (!(p == self)) obs[base + kChannelAlly] = 1.0;
          break;
        case Cell::kEmpty:
          break;
      }
    }
  }
  std::size_t k = static_cast<std::size_t>(side * side * kNumChannels);
  obs[k++] = config_.map_w > 1 ? static_cast<double>(self.x) / (config_.map_w - 1) : 0.0;
  obs[k++] = config_.map_h > 1 ? static_cast<double>(self.y) / (config_.map_h - 1) : 0.0;
  if (last_action_[agent] >= 0) obs[k + last_action_[agent]] = 1.0;
  return obs;
}

std::vector<Tensor> GridWorld::Observations() const {
  std::vector<Tensor> out;
  out.reserve(agents_.size());
  for (int i = 0; i < n_agents(); ++i) out.push_back(Observation(i));
  return out;
}

Tensor GridWorld::GlobalState() const {
  constexpr int kBins = kMinimapSize;
  const int bin_w = (config_.map_w + kBins - 1) / kBins;
  const int bin_h = (config_.map_h + kBins - 1) / kBins;
  const double normalizer = static_cast<double>(bin_w) * bin_h;
  Tensor state({static_cast<std::size_t>(state_size())}, 0.0);
  auto add = [&](Position p, int channel) {
    const int bx = p.x * kBins / config_.map_w;
    const int by = p.y * kBins / config_.map_h;
    state[static_cast<std::size_t>((channel * kBins + by) * kBins + bx)] +=
        1.0 / normalizer;
  };
  for (Position a : agents_) add(a, kChannelAlly);
  for (const Prey& p : prey_) {
    if (p.alive) add(p.pos, kChannelPrey);
  }
  for (int y = 0; y < config_.map_h; ++y) {
    for (int x = 0; x < config_.map_w; ++x) {
      if (At({x, y}) == Cell::kWall) add({x, y}, kChannelWall);
    }
  }
  return state;
}

std::vector<std::vector<int>> GridWorld::VisibleSets() const {
  std::vector<std::vector<int>> sees(agents_.size());
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    for (std::size_t j = 0; j < agents_.size(); ++j) {
      if (Chebyshev(agents_[i], agents_[j]) <= config_.view_radius) {
        sees[i].push_back(static_cast<int>(j));
      }
    }
  }
  return sees;
}

Snapshot GridWorld::Snap() const {
  Snapshot s;
  s.agents = agents_;
  for (const Prey& p : prey_) {
    if (p.alive) s.prey.push_back(p.pos);
  }
  return s;
}

MatrixGame::MatrixGame(EnvConfig config) : config_(std::move(config)) {
  ValidateEnvConfig(config_);
  if (config_.kind != EnvKind::kMatrixGame) {
    throw ConfigError("env.kind", "MatrixGame needs kind matrix_game");
  }
  Reset(config_.seed);
}

std::unique_ptr<Environment> MatrixGame::Clone() const {
  return std::make_unique<MatrixGame>(*this);
}

std::vector<Tensor> MatrixGame::Reset(std::uint64_t) {
  last_action_.assign(2, -1);
  step_ = 0;
  done_ = false;
  return Observations();
}

StepResult MatrixGame::Step(std::span<const int> joint_action) {
  if (done_) throw InvariantError("step called on a finished episode");
  CheckJointAction(joint_action, 2, n_actions());
  StepResult result;
  result.reward = config_.payoff_matrix[joint_action[0]][joint_action[1]];
  last_action_.assign(joint_action.begin(), joint_action.end());
  step_ = 1;
  done_ = true;
  result.done = true;
  result.terminated = true;
  result.observations = Observations();
  return result;
}

std::vector<Tensor> MatrixGame::Observations() const {
  std::vector<Tensor> out;
  for (int i = 0; i < 2; ++i) {
    Tensor obs({static_cast<std::size_t>(obs_size())}, 0.0);
    obs[0] = 1.0;
    if (last_action_[i] >= 0) obs[1 + last_action_[i]] = 1.0;
    out.push_back(std::move(obs));
  }
  return out;
}

Tensor MatrixGame::GlobalState() const { return Tensor::Vector({1.0}); }

std::vector<std::vector<int>> MatrixGame::VisibleSets() const {
  return {{0, 1}, {0, 1}};
}

double MatrixGame::OptimalPayoff() const {
  double best = config_.payoff_matrix[0][0];
  for (const auto& row : config_.payoff_matrix) {
    for (double v : row) best = std::max(best, v);
  }
  return best;
}

std::unique_ptr<Environment> MakeEnv(const EnvConfig& config) {
  if (config.kind == EnvKind::kMatrixGame) {
    return std::make_unique<MatrixGame>(config);
  }
  return std::make_unique<GridWorld>(config);
}

}  // namespace jim::env
