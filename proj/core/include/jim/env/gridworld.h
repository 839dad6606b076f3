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

#ifndef JIM_ENV_GRIDWORLD_H_
#define JIM_ENV_GRIDWORLD_H_

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "jim/env/environment.h"
#include "jim/rng.h"

namespace jim::env {

// Side length of the global-state minimap.
inline constexpr int kMinimapSize = 10;
// Observation channels, in storage order.
inline constexpr int kChannelAlly = 0;
inline constexpr int kChannelPrey = 1;
inline constexpr int kChannelWall = 2;
inline constexpr int kNumChannels = 3;

struct Prey {
  Position pos;
  int hp = 0;
  bool alive = true;
};

// Explicit placement, used by tests and analysis tools.
struct GridLayout {
  std::vector<Position> walls;
  std::vector<Position> agents;
  std::vector<Position> prey;
};

// Predator-prey gridworld with pursuit and tiger reward semantics.
//
// Step order: agent moves (index order; a blocked move is a stay), attacks,
// tiger HP regeneration, prey escape moves. Each attacking agent targets the
// nearest alive prey within Chebyshev attack_range (lowest index on ties).
// A prey hit by k >= 2 attackers is caught (pursuit) or loses k HP (tiger).
// Every other attack, including one with no target, adds solo_penalty.
class GridWorld final : public Environment {
 public:
  explicit GridWorld(EnvConfig config);

  std::unique_ptr<Environment> Clone() const override;

  std::vector<Tensor> Reset(std::uint64_t seed) override;
  StepResult Step(std::span<const int> joint_action) override;

  std::vector<Tensor> Observations() const override;
  Tensor GlobalState() const override;
  std::vector<std::vector<int>> VisibleSets() const override;
  Snapshot Snap() const override;

  const EnvConfig& config() const override { return config_; }
  int n_agents() const override { return config_.n_agents; }
  int n_actions() const override { return kNumGridActions; }
  int obs_size() const override;
  int state_size() const override {
    return kMinimapSize * kMinimapSize * kNumChannels;
  }
  int step_count() const override { return step_; }
  bool done() const override { return done_; }
  int attack_action() const override { return kAttack; }
  int prey_alive() const override;

  // Replaces the entity layout; resets the step counter and prey HP.
  void SetLayout(const GridLayout& layout);
  // Reseeds the internal RNG (prey moves) without touching the layout.
  void Reseed(std::uint64_t seed) { rng_.seed(seed); }

  // One escape move for every alive prey. Exposed for tests.
  void PreyPolicyStep();

  const std::vector<Position>& agents() const { return agents_; }
  const std::vector<Prey>& prey() const { return prey_; }
  bool IsWall(Position p) const;
  Tensor Observation(int agent) const;

 private:
  enum class Cell : std::uint8_t { kEmpty, kWall, kAgent, kPrey };

  bool InBounds(Position p) const;
  int Index(Position p) const { return p.y * config_.map_w + p.x; }
  Cell At(Position p) const { return cells_[Index(p)]; }
  void Set(Position p, Cell c) { cells_[Index(p)] = c; }
  void PlaceRandom();
  void MoveAgents(std::span<const int> joint_action);
  void ResolveAttacks(std::span<const int> joint_action, StepResult& result);
  std::vector<Position> FreeNeighbors(Position p) const;

  EnvConfig config_;
  Rng rng_;
  std::vector<Cell> cells_;
  std::vector<Position> agents_;
  std::vector<Prey> prey_;
  std::vector<int> last_action_;  // -1 before the first step
  int step_ = 0;
  bool done_ = false;
};

// One-step two-player matrix game with a shared payoff. Observation is
// [1, one-hot(own last action)], so the post-step observation reveals the
// action taken.
class MatrixGame final : public Environment {
 public:
  explicit MatrixGame(EnvConfig config);

  std::unique_ptr<Environment> Clone() const override;

  std::vector<Tensor> Reset(std::uint64_t seed) override;
  StepResult Step(std::span<const int> joint_action) override;

  std::vector<Tensor> Observations() const override;
  Tensor GlobalState() const override;
  std::vector<std::vector<int>> VisibleSets() const override;
  Snapshot Snap() const override { return {}; }

  const EnvConfig& config() const override { return config_; }
  int n_agents() const override { return 2; }
  int n_actions() const override {
    return static_cast<int>(config_.payoff_matrix.size());
  }
  int obs_size() const override { return 1 + n_actions(); }
  int state_size() const override { return 1; }
  int step_count() const override { return step_; }
  bool done() const override { return done_; }
  int attack_action() const override { return -1; }
  int prey_alive() const override { return 0; }

  double OptimalPayoff() const;

 private:
  EnvConfig config_;
  std::vector<int> last_action_;
  int step_ = 0;
  bool done_ = false;
};

}  // namespace jim::env

#endif  // JIM_ENV_GRIDWORLD_H_
