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

#include <memory>
#include <vector>

#include <gtest/gtest.h>

#include "jim/config/experiment_config.h"
#include "jim/env/environment.h"
#include "jim/mixer/losses.h"
#include "jim/numeric/params.h"
#include "jim/rng.h"
#include "jim/trainer/gradcheck_suite.h"
#include "jim/trainer/network_bundle.h"
#include "jim/trainer/replay.h"
#include "jim/trainer/rollout.h"
#include "jim/trainer/train_step.h"
#include "jim/trainer/training.h"
#include "test_util.h"

namespace jim::trainer {
namespace {

config::ExperimentConfig TinyConfig(config::TrainMode mode =
                                        config::TrainMode::kFullMethod) {
  config::ExperimentConfig c = config::ParseExperimentConfig(R"(
[env]
preset = pursuit_small
episode_limit = 15
[method]
n_intentions = 4
hidden_dim = 8
mixer_embed = 6
[train]
total_steps = 300
anneal_steps = 200
buffer_size = 50
target_sync = 5
[eval]
interval = 100
episodes = 2
final_episodes = 3
dump_episodes = 1
)");
  c.mode = mode;
  return c;
}

std::vector<std::shared_ptr<const Episode>> CollectEpisodes(
    const NetworkBundle& nets, const config::ExperimentConfig& cfg, int count,
    std::uint64_t seed) {
  auto env = env::MakeEnv(cfg.env);
  Rng rng(seed);
  std::vector<std::shared_ptr<const Episode>> out;
  RolloutOptions ro;
  ro.epsilon = 0.5;
  for (int k = 0; k < count; ++k) {
    out.push_back(std::make_shared<const Episode>(
        RunEpisode(nets, *env, seed * 100 + k, ro, rng).episode));
  }
  return out;
}

TEST(ScheduleTest, Examples) {
  const Schedule s;
  EXPECT_EQ(EpsilonAt(0, s), 1.0);
  EXPECT_EQ(EpsilonAt(70000, s), 0.05);
  EXPECT_EQ(EpsilonAt(1000000, s), 0.05);
  EXPECT_NEAR(EpsilonAt(35000, s), 0.525, 1e-15);
}

TEST(DefaultsTest, PaperHyperparameters) {
  const config::ExperimentConfig c;
  EXPECT_EQ(c.batch_size, 4);
  EXPECT_EQ(c.target_sync, 200);
  EXPECT_EQ(c.gamma, 0.99);
  EXPECT_EQ(c.lr, 5e-4);
  EXPECT_EQ(c.n_intentions, 16);
  EXPECT_EQ(c.lambda_a, 1.0);
  EXPECT_EQ(c.lambda_d, 1.0);
  EXPECT_EQ(c.anneal_steps, 70000);
}

TEST(ReplayTest, UnderfullBufferIsNotReady) {
  ReplayBuffer buffer(10);
  Rng rng(1);
  EXPECT_FALSE(SampleBatch(buffer, 4, rng).has_value());
  for (int i = 0; i < 3; ++i) buffer.Add(Episode{});
  EXPECT_FALSE(SampleBatch(buffer, 4, rng).has_value());
}

TEST(ReplayTest, RingOverwritesOldest) {
  ReplayBuffer buffer(3);
  for (int i = 0; i < 5; ++i) {
    Episode e;
    e.env_seed = static_cast<std::uint64_t>(i);
    buffer.Add(std::move(e));
  }
  EXPECT_EQ(buffer.size(), 3u);
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < 3; ++i) seeds.push_back(buffer.at(i).env_seed);
  std::sort(seeds.begin(), seeds.end());
  EXPECT_EQ(seeds, std::vector<std::uint64_t>({2, 3, 4}));
}

TEST(ReplayTest, MaskAndDeterminism) {
  const auto cfg = TinyConfig();
  auto env = env::MakeEnv(cfg.env);
  Rng rng(2);
  const NetworkBundle nets =
      NetworkBundle::Create(MakeNetworkShape(cfg, *env), rng);
  ReplayBuffer buffer(20);
  for (const auto& e : CollectEpisodes(nets, cfg, 8, 3)) buffer.Add(*e);
  Rng a(7), b(7);
  const auto ba = SampleBatch(buffer, 4, a);
  const auto bb = SampleBatch(buffer, 4, b);
  ASSERT_TRUE(ba && bb);
  EXPECT_EQ(ba->indices, bb->indices);
  EXPECT_EQ(ba->size(), 4u);
  for (std::size_t k = 0; k < ba->size(); ++k) {
    const int len = ba->episodes[k]->length();
    ASSERT_EQ(static_cast<int>(ba->mask[k].size()), ba->max_length);
    for (int t = 0; t < ba->max_length; ++t) {
      EXPECT_EQ(ba->mask[k][t], t < len ? 1 : 0);
    }
  }
}

TEST(RolloutTest, TeamsShareIntentionAndCoverAgents) {
  const auto cfg = TinyConfig();
  auto env = env::MakeEnv(cfg.env);
  Rng rng(4);
  const NetworkBundle nets =
      NetworkBundle::Create(MakeNetworkShape(cfg, *env), rng);
  for (const auto& ep : CollectEpisodes(nets, cfg, 3, 5)) {
    ASSERT_EQ(ep->teams.size(), static_cast<std::size_t>(ep->length() + 1));
    for (int t = 0; t <= ep->length(); ++t) {
      const auto z = ep->AgentZ(t);
      const auto& part = ep->teams[t];
      ASSERT_EQ(ep->team_z[t].size(), part.teams.size());
      for (std::size_t j = 0; j < part.teams.size(); ++j) {
        for (int m : part.teams[j].members) {
          EXPECT_EQ(z[m], ep->team_z[t][j]);
        }
      }
    }
  }
}

TEST(RolloutTest, ReplayingActionsReproducesRewards) {
  const auto cfg = TinyConfig();
  auto env = env::MakeEnv(cfg.env);
  Rng rng(6);
  const NetworkBundle nets =
      NetworkBundle::Create(MakeNetworkShape(cfg, *env), rng);
  for (const auto& ep : CollectEpisodes(nets, cfg, 3, 7)) {
    auto replay = env::MakeEnv(cfg.env);
    replay->Reset(ep->env_seed);
    for (int t = 0; t < ep->length(); ++t) {
      const env::StepResult r = replay->Step(ep->actions[t]);
      ASSERT_EQ(r.reward, ep->rewards[t]);
    }
    EXPECT_TRUE(replay->done());
  }
}

TEST(TrainStepTest, ZeroNetsZeroRewardGiveZeroTd) {
  const auto cfg = TinyConfig();
  auto env = env::MakeEnv(cfg.env);
  const NetworkShape shape = MakeNetworkShape(cfg, *env);
  const NetworkBundle zero(shape);
  std::vector<std::shared_ptr<const Episode>> eps;
  for (const auto& e : CollectEpisodes(zero, cfg, 4, 8)) {
    Episode copy = *e;
    std::fill(copy.rewards.begin(), copy.rewards.end(), 0.0);
    eps.push_back(std::make_shared<const Episode>(std::move(copy)));
  }
  const auto loss = ComputeLoss(zero, MakeBatch(eps), cfg);
  EXPECT_EQ(loss.td_low, 0.0);
  EXPECT_EQ(loss.td_high, 0.0);
}

TEST(TrainStepTest, TotalMatchesObjectiveOfParts) {
  for (auto mode : {config::TrainMode::kFullMethod,
                    config::TrainMode::kNoWeighting,
                    config::TrainMode::kFlatQmix}) {
    const auto cfg = TinyConfig(mode);
    auto env = env::MakeEnv(cfg.env);
    Rng rng(9);
    const NetworkBundle nets =
        NetworkBundle::Create(MakeNetworkShape(cfg, *env), rng);
    const auto loss =
        ComputeLoss(nets, MakeBatch(CollectEpisodes(nets, cfg, 4, 10)), cfg);
    EXPECT_NEAR(loss.total,
                mixer::TotalObjective(loss, cfg.lambda_a, cfg.lambda_d), 1e-12);
    EXPECT_LE(loss.l_d, 0.0);
    EXPECT_GE(loss.l_i, 0.0);
    EXPECT_GE(loss.l_a, 0.0);
    if (mode == config::TrainMode::kFlatQmix) {
      EXPECT_EQ(loss.td_high, 0.0);
      EXPECT_EQ(loss.l_i, 0.0);
    }
  }
}

TEST(TrainStepTest, SmallStepDecreasesLossOnFrozenBatch) {
  auto cfg = TinyConfig();
  cfg.lr = 1e-4;
  auto env = env::MakeEnv(cfg.env);
  Rng rng(11);
  NetworkBundle nets = NetworkBundle::Create(MakeNetworkShape(cfg, *env), rng);
  const EpisodeBatch batch = MakeBatch(CollectEpisodes(nets, cfg, 4, 12));
  // Targets and stop-gradient quantities stay fixed: compare with a frozen
  // copy of the pre-update networks.
  const NetworkBundle frozen = nets;
  const double before = ComputeLoss(nets, batch, cfg, nullptr, &frozen).total;
  auto opt = MakeOptimizer(cfg);
  TrainStep(nets, batch, cfg, opt);
  const double after = ComputeLoss(nets, batch, cfg, nullptr, &frozen).total;
  EXPECT_LT(after, before);
}

TEST(TrainStepTest, EvalDoesNotMutateParameters) {
  const auto cfg = TinyConfig();
  auto env = env::MakeEnv(cfg.env);
  Rng rng(13);
  const NetworkBundle nets =
      NetworkBundle::Create(MakeNetworkShape(cfg, *env), rng);
  const auto hash = nets.ParamHash();
  ComputeLoss(nets, MakeBatch(CollectEpisodes(nets, cfg, 4, 14)), cfg);
  EXPECT_EQ(nets.ParamHash(), hash);
}

TEST(SyncTest, EveryIntervalEpisodes) {
  const auto cfg = TinyConfig();
  auto env = env::MakeEnv(cfg.env);
  Rng rng(15);
  NetworkBundle nets = NetworkBundle::Create(MakeNetworkShape(cfg, *env), rng);
  nets.intention = NetworkBundle::Create(nets.shape(), rng).intention;
  EXPECT_FALSE(SyncTargets(nets, 199, 200));
  EXPECT_NE(numeric::ConstParamsOf(nets.intention)[0].tensor->values()[0],
            numeric::ConstParamsOf(nets.target_intention)[0].tensor->values()[0]);
  EXPECT_TRUE(SyncTargets(nets, 200, 200));
  auto online = numeric::ConstParamsOf(nets.intention);
  auto target = numeric::ConstParamsOf(nets.target_intention);
  for (std::size_t b = 0; b < online.size(); ++b) {
    EXPECT_EQ(*online[b].tensor, *target[b].tensor);
  }
  EXPECT_EQ(numeric::ConstParamsOf(nets.behavior)[0].tensor->values()[0],
            numeric::ConstParamsOf(nets.target_behavior)[0].tensor->values()[0]);
}

TEST(CheckpointTest, BundleRoundTrip) {
  const auto cfg = TinyConfig();
  auto env = env::MakeEnv(cfg.env);
  Rng rng(16);
  const NetworkBundle nets =
      NetworkBundle::Create(MakeNetworkShape(cfg, *env), rng);
  const auto dir = testing::TempDir("bundle");
  nets.Save(dir / "a.ckpt");
  const NetworkBundle loaded = NetworkBundle::Load(dir / "a.ckpt");
  EXPECT_EQ(loaded.shape(), nets.shape());
  EXPECT_EQ(loaded.ParamHash(), nets.ParamHash());
  loaded.Save(dir / "b.ckpt");
  EXPECT_EQ(testing::ReadFile(dir / "a.ckpt"), testing::ReadFile(dir / "b.ckpt"));
}

TEST(TrainingTest, BitExactReproducibility) {
  const auto cfg = TinyConfig();
  const TrainingResult a = RunTraining(cfg, 21);
  const TrainingResult b = RunTraining(cfg, 21);
  EXPECT_EQ(a.log, b.log);
  EXPECT_EQ(a.nets.ParamHash(), b.nets.ParamHash());
  const TrainingResult c = RunTraining(cfg, 22);
  EXPECT_NE(a.nets.ParamHash(), c.nets.ParamHash());
}

TEST(TrainingTest, LogIsMonotoneAndArtifactsCarryHeader) {
  const auto cfg = TinyConfig();
  const auto dir = testing::TempDir("train");
  RunOptions opts;
  opts.output_dir = dir;
  const TrainingResult r = RunTraining(cfg, 23, opts);
  for (std::size_t i = 1; i < r.log.rows.size(); ++i) {
    EXPECT_GE(r.log.rows[i].env_steps, r.log.rows[i - 1].env_steps);
  }
  EXPECT_GE(r.log.env_steps, cfg.total_steps);
  const std::string comment =
      "# " + RunComment(23, config::ConfigHashHex(cfg));
  for (const char* f : {"train_log.csv", "losses.csv", "continuity.csv"}) {
    const std::string text = testing::ReadFile(dir / f);
    EXPECT_EQ(text.substr(0, comment.size()), comment) << f;
  }
  EXPECT_TRUE(std::filesystem::exists(dir / "checkpoints" / "final.ckpt"));
  EXPECT_TRUE(std::filesystem::exists(dir / "summary.json"));
  const auto echoed = config::LoadExperimentConfig((dir / "config.ini").string());
  EXPECT_EQ(echoed, cfg);
}

TEST(TrainingTest, NoWeightingLogMatchesSchema) {
  const TrainingResult full = RunTraining(TinyConfig(), 24);
  const TrainingResult nw =
      RunTraining(TinyConfig(config::TrainMode::kNoWeighting), 24);
  ASSERT_EQ(full.log.rows.size(), nw.log.rows.size());
  for (std::size_t i = 0; i < nw.log.rows.size(); ++i) {
    EXPECT_EQ(full.log.rows[i].env_steps, nw.log.rows[i].env_steps);
  }
}

TEST(GradcheckSuiteTest, AllModulesPass) {
  const auto report = RunGradcheckSuite(0, 1e-4);
  EXPECT_TRUE(report.passed) << report.max_rel_error();
  EXPECT_GT(report.blocks.size(), 100u);
}

}  // namespace
}  // namespace jim::trainer
