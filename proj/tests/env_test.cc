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

#include <algorithm>
#include <map>
#include <vector>

#include <gtest/gtest.h>

#include "jim/env/env_config.h"
#include "jim/env/environment.h"
#include "jim/env/gridworld.h"
#include "jim/env/trajectory.h"
#include "jim/errors.h"
#include "jim/rng.h"
#include "test_util.h"

namespace jim::env {
namespace {

EnvConfig SmallGrid(int w = 9, int h = 9) {
  EnvConfig c;
  c.kind = EnvKind::kPursuit;
  c.n_agents = 2;
  c.n_enemies = 1;
  c.map_w = w;
  c.map_h = h;
  c.n_walls = 0;
  c.view_radius = 1;
  c.episode_limit = 20;
  return c;
}

TEST(PresetTest, TableScenarios) {
  const EnvConfig pursuit = *PresetConfig("pursuit");
  EXPECT_EQ(pursuit.n_agents, 6);
  EXPECT_EQ(pursuit.n_enemies, 4);
  EXPECT_EQ(pursuit.map_w, 60);
  EXPECT_EQ(pursuit.map_h, 60);
  EXPECT_EQ(pursuit.n_walls, 60);
  const EnvConfig tiger = *PresetConfig("tiger");
  EXPECT_EQ(tiger.kind, EnvKind::kTiger);
  EXPECT_EQ(tiger.n_agents, 6);
  EXPECT_EQ(tiger.n_enemies, 24);
  EXPECT_EQ(tiger.map_w, 40);
  EXPECT_EQ(tiger.n_walls, 60);
  const EnvConfig hard = *PresetConfig("pursuit_hard");
  EXPECT_EQ(hard.n_enemies, 6);
  EXPECT_EQ(hard.map_w, 100);
  EXPECT_EQ(hard.n_walls, 300);
  const EnvConfig small = *PresetConfig("pursuit_small");
  EXPECT_EQ(small.n_agents, 4);
  EXPECT_EQ(small.n_enemies, 2);
  EXPECT_EQ(small.map_w, 20);
  EXPECT_FALSE(PresetConfig("nope").has_value());
}

TEST(PresetTest, GridEpisodeCapDefault) {
  EXPECT_EQ(EnvConfig{}.episode_limit, 350);
  EXPECT_EQ(PresetConfig("pursuit")->episode_limit, 350);
}

TEST(ConfigTest, InvalidConfigsRejected) {
  EnvConfig c = SmallGrid();
  c.n_agents = 0;
  EXPECT_THROW(ValidateEnvConfig(c), ConfigError);
  c = SmallGrid();
  c.episode_limit = 0;
  EXPECT_THROW(ValidateEnvConfig(c), ConfigError);
  c = SmallGrid(2, 2);
  EXPECT_THROW(ValidateEnvConfig(c), ConfigError);  // 2 < 2r+1
  c = SmallGrid(3, 3);
  c.n_walls = 8;  // 8 + 2 + 1 > 9 cells
  EXPECT_THROW(MakeEnv(c), ConfigError);
}

TEST(ResetTest, SameSeedSameGrid) {
  const EnvConfig c = *PresetConfig("pursuit_small");
  auto a = MakeEnv(c);
  auto b = MakeEnv(c);
  EXPECT_EQ(a->GlobalState(), b->GlobalState());
  a->Reset(5);
  b->Reset(5);
  EXPECT_EQ(a->GlobalState(), b->GlobalState());
  EXPECT_EQ(a->Snap().agents, b->Snap().agents);
  EXPECT_EQ(a->step_count(), 0);
}

TEST(ResetTest, ObservationLayoutLength) {
  for (int r : {1, 2, 3}) {
    EnvConfig c = SmallGrid(12, 12);
    c.view_radius = r;
    auto env = MakeEnv(c);
    const auto obs = env->Reset(1);
    ASSERT_EQ(obs.size(), 2u);
    EXPECT_EQ(obs[0].size(),
              static_cast<std::size_t>((2 * r + 1) * (2 * r + 1) * 3 + 2 + 6));
    for (double v : obs[0].values()) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(ResetTest, DistantAgentsSeeNoAllies) {
  GridWorld env(SmallGrid());
  env.SetLayout({{}, {{0, 0}, {5, 5}}, {{8, 8}}});
  const int side = 3;
  for (int i = 0; i < 2; ++i) {
    const Tensor obs = env.Observation(i);
    for (int cell = 0; cell < side * side; ++cell) {
      EXPECT_EQ(obs[cell * kNumChannels + kChannelAlly], 0.0);
    }
  }
  EXPECT_EQ(env.VisibleSets()[0], std::vector<int>({0}));
}

TEST(StepTest, CoordinatedCatch) {
  GridWorld env(SmallGrid());
  env.SetLayout({{}, {{3, 4}, {5, 4}}, {{4, 4}}});
  const std::vector<int> u{kAttack, kAttack};
  const StepResult r = env.Step(u);
  EXPECT_EQ(r.reward, 10.0);
  EXPECT_EQ(r.info.catches, 1);
  EXPECT_EQ(env.prey_alive(), 0);
  EXPECT_TRUE(r.done);
  EXPECT_TRUE(r.terminated);
}

TEST(StepTest, SoloAttackPenalized) {
  GridWorld env(SmallGrid());
  env.SetLayout({{}, {{3, 4}, {0, 0}}, {{4, 4}}});
  const std::vector<int> u{kAttack, kStay};
  const StepResult r = env.Step(u);
  EXPECT_EQ(r.reward, -2.0);
  EXPECT_LT(r.reward, 0.0);
  EXPECT_EQ(env.prey_alive(), 1);
}

TEST(StepTest, AttackWithNoTargetPenalized) {
  GridWorld env(SmallGrid());
  env.SetLayout({{}, {{0, 0}, {8, 0}}, {{4, 8}}});
  const std::vector<int> u{kAttack, kStay};
  EXPECT_EQ(env.Step(u).reward, -2.0);
}

TEST(StepTest, AllStayNoPreyAdjacentZeroReward) {
  GridWorld env(SmallGrid());
  env.SetLayout({{}, {{0, 0}, {8, 0}}, {{4, 8}}});
  const std::vector<int> u{kStay, kStay};
  const StepResult r = env.Step(u);
  EXPECT_EQ(r.reward, 0.0);
  EXPECT_EQ(env.step_count(), 1);
  EXPECT_FALSE(r.done);
}

TEST(StepTest, TigerHitsRegenerationAndKill) {
  EnvConfig c = SmallGrid();
  c.kind = EnvKind::kTiger;
  c.prey_hp = 3;
  GridWorld env(c);
  env.SetLayout({{}, {{3, 4}, {5, 4}}, {{4, 4}}});
  // Prey walled in by agents and walls so it cannot escape.
  env.SetLayout({{{4, 3}, {4, 5}}, {{3, 4}, {5, 4}}, {{4, 4}}});
  const std::vector<int> u{kAttack, kAttack};
  StepResult r = env.Step(u);
  EXPECT_EQ(r.reward, 2.0);
  EXPECT_EQ(r.info.hits, 2);
  EXPECT_EQ(env.prey()[0].hp, 2);  // 3 - 2 + 1 regen
  r = env.Step(u);
  EXPECT_EQ(r.info.kills, 1);
  EXPECT_EQ(env.prey_alive(), 0);
}

TEST(StepTest, WrongActionLengthThrows) {
  GridWorld env(SmallGrid());
  const std::vector<int> u{kStay};
  EXPECT_THROW(env.Step(u), DimensionError);
}

TEST(StepTest, MoveIntoWallIsStay) {
  GridWorld env(SmallGrid());
  env.SetLayout({{{2, 1}}, {{1, 1}, {7, 7}}, {{8, 0}}});
  const std::vector<int> u{kRight, kStay};
  env.Step(u);
  EXPECT_EQ(env.agents()[0], (Position{1, 1}));
}

TEST(StepTest, CollisionLowerIndexWins) {
  GridWorld env(SmallGrid());
  env.SetLayout({{}, {{3, 4}, {5, 4}}, {{0, 8}}});
  const std::vector<int> u{kRight, kLeft};
  env.Step(u);
  EXPECT_EQ(env.agents()[0], (Position{4, 4}));
  EXPECT_EQ(env.agents()[1], (Position{5, 4}));
}

TEST(StepTest, EpisodeLimitEndsEpisode) {
  EnvConfig c = SmallGrid();
  c.episode_limit = 3;
  GridWorld env(c);
  env.SetLayout({{}, {{0, 0}, {8, 0}}, {{4, 8}}});
  const std::vector<int> u{kStay, kStay};
  env.Step(u);
  env.Step(u);
  const StepResult r = env.Step(u);
  EXPECT_TRUE(r.done);
  EXPECT_FALSE(r.terminated);
  EXPECT_THROW(env.Step(u), InvariantError);
}

TEST(GlobalStateTest, EmptyMapIsZero) {
  EnvConfig c = SmallGrid(20, 20);
  GridWorld env(c);
  env.SetLayout({});
  for (double v : env.GlobalState().values()) EXPECT_EQ(v, 0.0);
}

TEST(GlobalStateTest, TopLeftAgentBinning) {
  EnvConfig c = *PresetConfig("pursuit");
  GridWorld env(c);
  env.SetLayout({{}, {{0, 0}}, {}});
  const Tensor s = env.GlobalState();
  // 60 / 10 = 6x6 cells per bin.
  EXPECT_DOUBLE_EQ(s[0], 1.0 / 36.0);
  double mass = 0.0;
  for (int k = 0; k < kMinimapSize * kMinimapSize; ++k) mass += s[k];
  EXPECT_DOUBLE_EQ(mass, 1.0 / 36.0);
}

TEST(GlobalStateTest, AgentMassConservation) {
  const EnvConfig c = *PresetConfig("pursuit");
  auto env = MakeEnv(c);
  const Tensor s = env->GlobalState();
  double mass = 0.0;
  for (int k = 0; k < kMinimapSize * kMinimapSize; ++k) mass += s[k];
  EXPECT_NEAR(mass, 6.0 / 36.0, 1e-12);
  for (double v : s.values()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(PreyTest, EscapesAwayFromAgent) {
  GridWorld env(SmallGrid());
  env.SetLayout({{}, {{3, 4}, {0, 8}}, {{4, 4}}});
  env.PreyPolicyStep();
  EXPECT_EQ(env.prey()[0].pos, (Position{5, 4}));
}

TEST(PreyTest, WalledInPreyStays) {
  GridWorld env(SmallGrid());
  env.SetLayout({{{4, 3}, {4, 5}, {3, 4}, {5, 4}}, {{0, 0}, {1, 0}}, {{4, 4}}});
  for (int i = 0; i < 10; ++i) env.PreyPolicyStep();
  EXPECT_EQ(env.prey()[0].pos, (Position{4, 4}));
}

TEST(PreyTest, UnthreatenedMovesUniformly) {
  EnvConfig c = SmallGrid(21, 21);
  GridWorld env(c);
  std::map<std::pair<int, int>, int> counts;
  const int draws = 8000;
  for (int i = 0; i < draws; ++i) {
    env.SetLayout({{}, {{0, 0}, {0, 1}}, {{10, 10}}});
    env.Reseed(static_cast<std::uint64_t>(i));
    env.PreyPolicyStep();
    const Position p = env.prey()[0].pos;
    ++counts[{p.x, p.y}];
  }
  ASSERT_EQ(counts.size(), 4u);
  double chi2 = 0.0;
  for (const auto& [pos, n] : counts) {
    const double e = draws / 4.0;
    chi2 += (n - e) * (n - e) / e;
  }
  EXPECT_LT(chi2, 11.34);  // chi-square, 3 dof, p = 0.01
}

TEST(InvariantTest, EntityConservationAndDeterminism) {
  const EnvConfig c = *PresetConfig("pursuit_small");
  auto a = MakeEnv(c);
  auto b = MakeEnv(c);
  Rng rng(4);
  int prey = a->prey_alive();
  while (!a->done()) {
    std::vector<int> u(4);
    for (int& x : u) x = UniformIndex(rng, kNumGridActions);
    const StepResult ra = a->Step(u);
    const StepResult rb = b->Step(u);
    EXPECT_EQ(ra.reward, rb.reward);
    EXPECT_EQ(a->GlobalState(), b->GlobalState());
    EXPECT_EQ(a->Snap().agents.size(), 4u);
    EXPECT_EQ(a->prey_alive(),
              prey - static_cast<int>(ra.info.removed_prey.size()));
    prey = a->prey_alive();
  }
}

TEST(InvariantTest, AttackValueCrossesZeroWithPartnerAttackRate) {
  // Exhaustive enumeration on a 3x3 map: agent 0 and agent 1 flank the prey.
  // Agent 1 attacks with probability p, otherwise stays.
  EnvConfig c = SmallGrid(3, 3);
  auto attack_value = [&](double p) {
    double value = 0.0;
    for (int partner : {kAttack, kStay}) {
      GridWorld env(c);
      env.SetLayout({{}, {{0, 1}, {2, 1}}, {{1, 1}}});
      const std::vector<int> u{kAttack, partner};
      const double w = partner == kAttack ? p : 1.0 - p;
      value += w * env.Step(u).reward;
    }
    return value;
  };
  EXPECT_LT(attack_value(0.0), 0.0);
  EXPECT_LT(attack_value(0.1), 0.0);
  EXPECT_GT(attack_value(0.5), 0.0);
  EXPECT_GT(attack_value(1.0), 0.0);
  double prev = attack_value(0.0);
  for (int k = 1; k <= 20; ++k) {
    const double v = attack_value(k / 20.0);
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(MatrixGameTest, PayoffAndDone) {
  const EnvConfig c = *PresetConfig("matrix_penalty");
  auto env = MakeEnv(c);
  EXPECT_EQ(env->n_actions(), 3);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      env->Reset(0);
      const std::vector<int> u{a, b};
      const StepResult r = env->Step(u);
      EXPECT_EQ(r.reward, ClimbingGamePayoff()[a][b]);
      EXPECT_TRUE(r.done);
      EXPECT_EQ(r.observations[0][1 + a], 1.0);
    }
  }
  EXPECT_EQ(static_cast<MatrixGame&>(*env).OptimalPayoff(), 11.0);
}

TEST(TrajectoryTest, JsonLineRoundTrip) {
  TrajectoryRecord rec;
  rec.episode = 2;
  rec.step = 7;
  rec.agents = {{1, 2}, {3, 4}};
  rec.prey = {{5, 6}};
  rec.actions = {5, 0};
  rec.reward = -2.5;
  rec.teams = {{0, {0, 1}, 3}};
  rec.observer_z = {3, 4};
  EXPECT_EQ(RecordFromJsonLine(RecordToJsonLine(rec)), rec);
  const auto dir = testing::TempDir("traj");
  DumpHeader header{9, "abc", "pursuit", 16, 6, 5};
  {
    TrajectoryWriter w(dir / "d.jsonl", header);
    w.Write(rec);
    w.Write(rec);
  }
  DumpHeader read;
  const auto recs = ReadTrajectoryDump(dir / "d.jsonl", &read);
  EXPECT_EQ(read, header);
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[1], rec);
}

TEST(TrajectoryTest, MalformedLineIsFormatError) {
  EXPECT_THROW(RecordFromJsonLine("{not json"), FormatError);
}

}  // namespace
}  // namespace jim::env
