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

#ifndef JIM_ENV_ENVIRONMENT_H_
#define JIM_ENV_ENVIRONMENT_H_

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "jim/env/env_config.h"
#include "jim/numeric/tensor.h"

namespace jim::env {

using numeric::Tensor;

// Grid action ids. Matrix games use 0..rows-1 instead.
enum GridAction : int {
  kStay = 0,
  kUp = 1,
  kDown = 2,
  kLeft = 3,
  kRight = 4,
  kAttack = 5,
};
inline constexpr int kNumGridActions = 6;

struct Position {
  int x = 0;
  int y = 0;
  bool operator==(const Position&) const = default;
};

struct StepInfo {
  int catches = 0;       // prey removed by a coordinated catch
  int kills = 0;         // prey removed by HP reaching 0
  int hits = 0;          // individual successful hits
  int solo_attacks = 0;  // attacks that drew the solo penalty
  std::vector<int> removed_prey;
};

struct StepResult {
  std::vector<Tensor> observations;
  double reward = 0.0;
  bool done = false;
  // True when the episode ended by the task itself rather than the step cap.
  bool terminated = false;
  StepInfo info;
};

// Positions for trajectory dumps.
struct Snapshot {
  std::vector<Position> agents;
  std::vector<Position> prey;  // alive prey only
};

// A Dec-POMDP with a shared scalar reward.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::unique_ptr<Environment> Clone() const = 0;

  virtual std::vector<Tensor> Reset(std::uint64_t seed) = 0;
  virtual StepResult Step(std::span<const int> joint_action) = 0;

  virtual std::vector<Tensor> Observations() const = 0;
  virtual Tensor GlobalState() const = 0;
  // visible[i] lists the agents agent i observes, itself included.
  virtual std::vector<std::vector<int>> VisibleSets() const = 0;
  virtual Snapshot Snap() const = 0;

  virtual const EnvConfig& config() const = 0;
  virtual int n_agents() const = 0;
  virtual int n_actions() const = 0;
  virtual int obs_size() const = 0;
  virtual int state_size() const = 0;
  virtual int step_count() const = 0;
  virtual bool done() const = 0;
  // Id of the attack action, or -1 if the game has none.
  virtual int attack_action() const = 0;
  // Alive prey count; 0 for games without prey.
  virtual int prey_alive() const = 0;
};

// Builds the environment and places entities from config.seed.
std::unique_ptr<Environment> MakeEnv(const EnvConfig& config);

}  // namespace jim::env

#endif  // JIM_ENV_ENVIRONMENT_H_
