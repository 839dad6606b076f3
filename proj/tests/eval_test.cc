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

#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "gtest/gtest.h"
#include "jim/config/experiment_config.h"
#include "jim/env/environment.h"
#include "jim/errors.h"
#include "jim/eval/ablate.h"
#include "jim/eval/evaluate.h"
#include "jim/eval/intention_stats.h"
#include "jim/rng.h"
#include "jim/trainer/network_bundle.h"
#include "jim/trainer/rollout.h"
#include "test_util.h"

namespace jim::eval {
namespace {

config::ExperimentConfig SmallConfig(int n_agents = 4, int limit = 20) {
  config::ExperimentConfig c;
  config::SetConfigField(c, "env.preset", "pursuit_small");
  c.env.n_agents = n_agents;
  c.env.episode_limit = limit;
  c.n_intentions = 4;
  c.hidden_dim = 8;
  c.mixer_embed = 6;
  return c;
}

trainer::NetworkBundle MakeNets(const config::ExperimentConfig& c,
                                std::uint64_t seed) {
  auto env = env::MakeEnv(c.env);
  Rng rng(seed);
  return trainer::NetworkBundle::Create(trainer::MakeNetworkShape(c, *env),
                                        rng);
}

env::TrajectoryRecord Record(int episode, int step, std::vector<int> actions,
                             std::vector<env::TeamRecord> teams,
                             std::vector<int> observer = {}) {
  env::TrajectoryRecord r;
  r.episode = episode;
  r.step = step;
  r.actions = std::move(actions);
  r.teams = std::move(teams);
  r.observer_z = std::move(observer);
  return r;
}

TEST(EvaluateTest, DeterministicGivenSeed) {
  const auto c = SmallConfig();
  const auto nets = MakeNets(c, 1);
  EvalOptions o;
  o.episodes = 4;
  o.seed = 17;
  o.dump_episodes = 1;
  EXPECT_EQ(Evaluate(nets, c, o), Evaluate(nets, c, o));
}

TEST(EvaluateTest, NeverMutatesNetworks) {
  const auto c = SmallConfig();
  const auto nets = MakeNets(c, 2);
  const auto before = nets.ParamHash();
  EvalOptions o;
  o.episodes = 3;
  Evaluate(nets, c, o);
  Rng count_rng(4);
  AdhocEvaluate(nets, c, 2, count_rng, o);
  AblateZeroIntention(nets, c, o);
  EXPECT_EQ(nets.ParamHash(), before);
}

TEST(EvaluateTest, ReturnIsTeamRewardOverAgentCount) {
  const auto c = SmallConfig();
  const auto nets = MakeNets(c, 3);
  EvalOptions o;
  o.episodes = 2;
  o.seed = 5;
  o.dump_episodes = 2;
  const auto m = Evaluate(nets, c, o);
  ASSERT_EQ(m.episode_returns_per_agent.size(), 2u);
  for (int e = 0; e < 2; ++e) {
    double team = 0.0;
    for (const auto& r : m.records) {
      if (r.episode == e) team += r.reward;
    }
    EXPECT_NEAR(m.episode_returns_per_agent[e] * c.env.n_agents, team, 1e-9);
  }
  const double mean =
      std::accumulate(m.episode_returns_per_agent.begin(),
                      m.episode_returns_per_agent.end(), 0.0) / 2.0;
  EXPECT_NEAR(m.mean_return_per_agent, mean, 1e-12);
  EXPECT_GE(m.success_rate, 0.0);
  EXPECT_LE(m.success_rate, 1.0);
}

TEST(EvaluateTest, RandomNetworksRarelyCatch) {
  const auto c = SmallConfig(4, 100);
  for (std::uint64_t s : {1u, 2u, 3u}) {
    EvalOptions o;
    o.episodes = 10;
    o.seed = s;
    EXPECT_LT(Evaluate(MakeNets(c, s), c, o).success_rate, 0.2) << s;
  }
}

TEST(AdhocTest, ZeroDeltaMatchesEvaluate) {
  const auto c = SmallConfig();
  const auto nets = MakeNets(c, 6);
  EvalOptions o;
  o.episodes = 3;
  o.seed = 9;
  Rng count_rng(1);
  const auto adhoc = AdhocEvaluate(nets, c, 0, count_rng, o);
  const auto fixed = Evaluate(nets, c, o);
  EXPECT_EQ(adhoc.episode_returns_per_agent, fixed.episode_returns_per_agent);
  EXPECT_EQ(adhoc.mean_return_per_agent, fixed.mean_return_per_agent);
  EXPECT_EQ(adhoc.success_rate, fixed.success_rate);
}

TEST(AdhocTest, CountsCoverBasePlusMinusTwo) {
  const auto c = SmallConfig(6, 3);
  const auto nets = MakeNets(c, 7);
  EvalOptions o;
  o.episodes = 100;
  Rng count_rng(3);
  const auto m = AdhocEvaluate(nets, c, 2, count_rng, o);
  ASSERT_EQ(m.agent_counts.size(), 100u);
  const std::set<int> seen(m.agent_counts.begin(), m.agent_counts.end());
  EXPECT_EQ(seen, (std::set<int>{4, 5, 6, 7, 8}));
}

TEST(AdhocTest, DeltaBeyondEncodingThrows) {
  const auto c = SmallConfig();
  const auto nets = MakeNets(c, 8);
  EvalOptions o;
  o.episodes = 1;
  Rng count_rng(1);
  EXPECT_THROW(AdhocEvaluate(nets, c, c.adhoc_delta + 1, count_rng, o),
               ParameterError);
}

TEST(AdhocTest, SmallTeamsClampToOne) {
  const auto c = SmallConfig(1, 3);
  const auto nets = MakeNets(c, 9);
  EvalOptions o;
  o.episodes = 30;
  Rng count_rng(2);
  const auto m = AdhocEvaluate(nets, c, 2, count_rng, o);
  EXPECT_GE(*std::min_element(m.agent_counts.begin(), m.agent_counts.end()),
            1);
}

TEST(IntentionStatsTest, HeldIntentionGivesOneRunPerAgent) {
  std::vector<env::TrajectoryRecord> recs;
  const int length = 7;
  for (int ep = 0; ep < 2; ++ep) {
    for (int t = 0; t < length; ++t) {
      recs.push_back(Record(ep, t, {0, 1, 2},
                            {{0, {0, 1}, 2}, {2, {2}, 1}}));
    }
  }
  const auto r = IntentionStats(recs, 4, 1);
  ASSERT_EQ(r.continuity.size(), 1u);
  EXPECT_EQ(r.continuity.at(length), 6);
  EXPECT_EQ(r.RunCount(), 6);
  EXPECT_DOUBLE_EQ(r.MeanRunLength(), length);
  EXPECT_EQ(r.selection_counts, (std::vector<std::int64_t>{0, 14, 28, 0}));
}

TEST(IntentionStatsTest, HistogramTotalsRunCount) {
  std::vector<env::TrajectoryRecord> recs;
  const std::vector<int> zs = {1, 1, 0, 0, 0, 3, 1};
  for (int t = 0; t < static_cast<int>(zs.size()); ++t) {
    recs.push_back(Record(0, t, {0}, {{0, {0}, zs[t]}}));
  }
  const auto r = IntentionStats(recs, 4, 1);
  EXPECT_EQ(r.continuity, (std::map<int, std::int64_t>{{1, 2}, {2, 1},
                                                       {3, 1}}));
  EXPECT_EQ(r.RunCount(), 4);
}

TEST(IntentionStatsTest, MatchingObserversAgreeFully) {
  std::vector<env::TrajectoryRecord> recs;
  for (int t = 0; t < 5; ++t) {
    const int z = t % 3;
    recs.push_back(Record(0, t, {1, 1, 0}, {{1, {0, 1, 2}, z}}, {z, z, z}));
  }
  const auto r = IntentionStats(recs, 3, 1);
  EXPECT_DOUBLE_EQ(r.agreement, 1.0);
  EXPECT_EQ(r.selection_counts, r.observer_counts);
  EXPECT_DOUBLE_EQ(r.ObserverDistance(), 0.0);
  EXPECT_EQ(r.cooccurrence[0][kMixed], 2);
  EXPECT_EQ(r.cooccurrence[1][kMixed], 2);
}

TEST(IntentionStatsTest, BucketsJointActions) {
  const std::vector<int> attack = {4, 4}, move = {0, 2}, mixed = {4, 1};
  EXPECT_EQ(BucketOf(attack, 4), kAllAttack);
  EXPECT_EQ(BucketOf(move, 4), kAllMove);
  EXPECT_EQ(BucketOf(mixed, 4), kMixed);
}

TEST(IntentionStatsTest, MissingPartitionIsFormatError) {
  std::vector<env::TrajectoryRecord> recs = {Record(0, 0, {0, 1}, {})};
  EXPECT_THROW(IntentionStats(recs, 4, 1), FormatError);
  recs = {Record(0, 0, {0, 1}, {{0, {0}, 2}})};
  EXPECT_THROW(IntentionStats(recs, 4, 1), FormatError);
  recs = {Record(0, 0, {0}, {{0, {0}, 9}})};
  EXPECT_THROW(IntentionStats(recs, 4, 1), FormatError);
}

TEST(IntentionStatsTest, TotalVariationExamples) {
  const std::vector<std::int64_t> a = {1, 0}, b = {0, 3}, c = {2, 2};
  EXPECT_DOUBLE_EQ(TotalVariation(a, b), 1.0);
  EXPECT_DOUBLE_EQ(TotalVariation(a, c), 0.5);
  EXPECT_DOUBLE_EQ(TotalVariation(c, c), 0.0);
}

// Exploratory rollouts pick intentions uniformly; chi-square at the 5% level
// over commander choices (one per team and step).
TEST(IntentionStatsTest, ExploratorySelectionIsUniform) {
  auto c = SmallConfig(4, 50);
  c.n_intentions = 16;
  const auto nets = MakeNets(c, 10);
  auto env = env::MakeEnv(c.env);
  Rng rng(12);
  trainer::RolloutOptions o;
  o.epsilon = 1.0;
  o.record_episode = false;
  o.record_trajectory = true;
  std::vector<env::TrajectoryRecord> recs;
  for (int ep = 0; ep < 20; ++ep) {
    o.episode_index = ep;
    auto res = trainer::RunEpisode(nets, *env, 100 + ep, o, rng);
    recs.insert(recs.end(), res.records.begin(), res.records.end());
  }
  const auto r = IntentionStats(recs, c.n_intentions, env->attack_action());
  std::vector<double> counts;
  double total = 0.0;
  for (const auto& row : r.cooccurrence) {
    counts.push_back(static_cast<double>(row[0] + row[1] + row[2]));
    total += counts.back();
  }
  const double expected = total / counts.size();
  double chi2 = 0.0;
  for (double k : counts) chi2 += (k - expected) * (k - expected) / expected;
  EXPECT_GT(total, 500.0);
  EXPECT_LT(chi2, 24.996);  // 95th percentile, 15 degrees of freedom
}

TEST(IntentionStatsTest, WritesFourCsvsWithComment) {
  std::vector<env::TrajectoryRecord> recs = {
      Record(0, 0, {0, 1}, {{0, {0, 1}, 1}}, {1, 0})};
  const auto r = IntentionStats(recs, 2, 1);
  const auto dir = testing::TempDir("stats");
  WriteIntentionReport(r, dir, "seed=3 config_hash=abc");
  for (const char* f : {"selection.csv", "observer.csv", "continuity.csv",
                        "cooccurrence.csv"}) {
    const std::string text = testing::ReadFile(dir / f);
    EXPECT_EQ(text.rfind("# seed=3 config_hash=abc\n", 0), 0u) << f;
  }
  EXPECT_NE(testing::ReadFile(dir / "selection.csv").find("max_normalized"),
            std::string::npos);
}

TEST(AblateTest, ZeroIntentionRequiresIntentionLevel) {
  auto c = SmallConfig();
  c.mode = config::TrainMode::kFlatQmix;
  const auto nets = MakeNets(c, 11);
  EvalOptions o;
  o.episodes = 1;
  EXPECT_THROW(AblateZeroIntention(nets, c, o), ParameterError);
}

TEST(AblateTest, ZeroIntentionSharesEpisodeSeeds) {
  const auto c = SmallConfig();
  const auto nets = MakeNets(c, 12);
  EvalOptions o;
  o.episodes = 3;
  o.seed = 4;
  const auto res = AblateZeroIntention(nets, c, o);
  EXPECT_EQ(res.full, Evaluate(nets, c, o));
  EXPECT_EQ(res.zero.episodes, 3);
  if (res.full.mean_return_per_agent > 0.0) {
    ASSERT_TRUE(res.retained.has_value());
    EXPECT_NEAR(*res.retained,
                res.zero.mean_return_per_agent /
                    res.full.mean_return_per_agent,
                1e-12);
  } else {
    EXPECT_FALSE(res.retained.has_value());
  }
  EXPECT_EQ(ParseAblationMode("zero_intention"), AblationMode::kZeroIntention);
  EXPECT_EQ(ParseAblationMode("no_weighting"), AblationMode::kNoWeighting);
  EXPECT_FALSE(ParseAblationMode("other").has_value());
}

}  // namespace
}  // namespace jim::eval
