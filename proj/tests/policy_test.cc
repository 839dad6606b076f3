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
#include <vector>

#include <gtest/gtest.h>

#include "jim/errors.h"
#include "jim/mixer/losses.h"
#include "jim/numeric/optimizer.h"
#include "jim/numeric/params.h"
#include "jim/policy/networks.h"
#include "jim/policy/selection.h"
#include "jim/rng.h"
#include "test_util.h"

namespace jim::policy {
namespace {

TEST(IntentionNetTest, ZeroNetGivesEqualQ) {
  IntentionNet net(10, 16);
  const Tensor q = IntentionQ(net, Tensor::Vector(std::vector<double>(10, 0.3)));
  ASSERT_EQ(q.size(), 16u);
  for (double v : q.values()) EXPECT_EQ(v, q[0]);
}

TEST(IntentionNetTest, DimensionMismatchThrows) {
  IntentionNet net(10, 16);
  EXPECT_THROW(IntentionQ(net, Tensor::Vector({1, 2})), DimensionError);
}

TEST(PolicyDistributionTest, EqualQIsUniform) {
  const auto p = PolicyDistribution(std::vector<double>(16, 2.5), 1.0);
  for (double v : p) EXPECT_NEAR(v, 1.0 / 16.0, 1e-15);
}

TEST(PolicyDistributionTest, LowTemperatureConcentrates) {
  const std::vector<double> q{0.1, 0.5, 0.49, -1.0};
  EXPECT_GT(PolicyDistribution(q, 1e-3)[1], 0.99);
}

TEST(PolicyDistributionTest, ShiftInvariant) {
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> q(8), shifted(8);
    const double c = 100.0 * (Uniform01(rng) - 0.5);
    for (int i = 0; i < 8; ++i) {
      q[i] = 5.0 * (Uniform01(rng) - 0.5);
      shifted[i] = q[i] + c;
    }
    const auto a = PolicyDistribution(q, 0.7);
    const auto b = PolicyDistribution(shifted, 0.7);
    for (int i = 0; i < 8; ++i) ASSERT_NEAR(a[i], b[i], 1e-12);
  }
}

TEST(PolicyDistributionTest, NonPositiveTemperatureThrows) {
  EXPECT_THROW(PolicyDistribution(std::vector<double>{1, 2}, 0.0),
               ParameterError);
}

TEST(PolicyDistributionTest, ArgmaxConsistentWithGreedySelection) {
  Rng rng(2);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> q(6);
    for (double& v : q) v = static_cast<double>(UniformIndex(rng, 4));
    const auto p = PolicyDistribution(q, 1.0);
    int best = 0;
    for (int i = 1; i < 6; ++i) {
      if (p[i] > p[best]) best = i;
    }
    ASSERT_EQ(SelectDiscrete(q, 0.0, rng), best);
  }
}

TEST(SelectTest, GreedyAtZeroEpsilon) {
  Rng rng(3);
  const std::vector<double> q{0.1, 0.9, 0.9, 0.2};
  for (int i = 0; i < 100; ++i) EXPECT_EQ(SelectDiscrete(q, 0.0, rng), 1);
}

TEST(SelectTest, UniformAtFullEpsilon) {
  Rng rng(4);
  const std::vector<double> q{5, 0, 0, 0, 0};
  const std::vector<bool> avail{true, true, false, true, true};
  std::vector<int> counts(5, 0);
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) ++counts[SelectDiscrete(q, 1.0, rng, avail)];
  EXPECT_EQ(counts[2], 0);
  double chi2 = 0.0;
  for (int i : {0, 1, 3, 4}) {
    const double e = draws / 4.0;
    chi2 += (counts[i] - e) * (counts[i] - e) / e;
  }
  EXPECT_LT(chi2, 11.34);  // chi-square, 3 dof, p = 0.01
}

TEST(SelectTest, MaskedArgmaxSkipsUnavailable) {
  const std::vector<double> q{1.0, 3.0, 2.0};
  EXPECT_EQ(MaskedArgmax(q, {true, false, true}), 2);
}

TEST(SelectTest, Errors) {
  Rng rng(5);
  const std::vector<double> q{1.0, 2.0};
  EXPECT_THROW(SelectDiscrete(q, 0.0, rng, {false, false}), ParameterError);
  EXPECT_THROW(SelectDiscrete(q, 1.5, rng), ParameterError);
  EXPECT_THROW(SelectDiscrete(q, -0.1, rng), ParameterError);
}

BehaviorNetShape SmallBehavior() {
  return {7, 4, 3, 5, 8};
}

TEST(BehaviorNetTest, ZeroNetGivesZeroQ) {
  BehaviorNet net(SmallBehavior());
  for (int z = 0; z < 4; ++z) {
    auto [q, h] = BehaviorQ(net, Tensor::Vector(std::vector<double>(7, 1.0)),
                            IntentionId{z}, 1, Tensor::Zeros(1, 8));
    ASSERT_EQ(q.size(), 5u);
    for (double v : q.values()) EXPECT_EQ(v, 0.0);
  }
}

TEST(BehaviorNetTest, IntentionConditioningIsLive) {
  Rng rng(6);
  BehaviorNet net(SmallBehavior());
  net.Initialize(rng);
  const Tensor obs = testing::RandomTensor(1, 7, rng);
  const Tensor h = Tensor::Zeros(1, 8);
  const Tensor q0 = BehaviorQ(net, obs, IntentionId{0}, 0, h).first;
  const Tensor q1 = BehaviorQ(net, obs, IntentionId{1}, 0, h).first;
  EXPECT_NE(q0, q1);
}

TEST(BehaviorNetTest, HiddenDimensionChecked) {
  BehaviorNet net(SmallBehavior());
  EXPECT_THROW(BehaviorQ(net, Tensor::Vector(std::vector<double>(7)),
                         IntentionId{0}, 0, Tensor::Zeros(1, 3)),
               DimensionError);
  EXPECT_THROW(BehaviorQ(net, Tensor::Vector(std::vector<double>(7)),
                         IntentionId{0}, 3, Tensor::Zeros(1, 8)),
               DimensionError);
}

TEST(BehaviorNetTest, ReplayReproducesHiddenStates) {
  Rng rng(7);
  BehaviorNet net(SmallBehavior());
  net.Initialize(rng);
  std::vector<Tensor> obs;
  for (int t = 0; t < 10; ++t) obs.push_back(testing::RandomTensor(1, 7, rng));
  auto run = [&] {
    std::vector<Tensor> hs;
    Tensor h = Tensor::Zeros(1, 8);
    for (int t = 0; t < 10; ++t) {
      h = BehaviorQ(net, obs[t], IntentionId{t % 4}, 2, h).second;
      hs.push_back(h);
    }
    return hs;
  };
  EXPECT_EQ(run(), run());
}

TEST(BehaviorNetTest, ParameterCountIndependentOfTeamSize) {
  BehaviorNet a({7, 4, 8, 5, 8});
  BehaviorNet b({7, 4, 8, 5, 8});
  EXPECT_EQ(numeric::ParamCount(a), numeric::ParamCount(b));
}

TEST(PosteriorTest, ZeroNetIsUniform) {
  PosteriorNet net(5, 16);
  const auto p = Posterior(net, Tensor::Vector(std::vector<double>(5, 1.0)),
                           Tensor::Vector(std::vector<double>(5, 0.0)));
  for (double v : p) EXPECT_NEAR(v, 1.0 / 16.0, 1e-15);
}

TEST(PosteriorTest, OutputIsDistribution) {
  Rng rng(8);
  PosteriorNet net(5, 16);
  net.Initialize(rng);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = Posterior(net, testing::RandomTensor(1, 5, rng, 3.0),
                             testing::RandomTensor(1, 5, rng, 3.0));
    double sum = 0.0;
    for (double v : p) sum += v;
    ASSERT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(PosteriorTest, DimensionMismatchThrows) {
  PosteriorNet net(5, 16);
  EXPECT_THROW(Posterior(net, Tensor::Vector({1, 2}), Tensor::Vector({1, 2})),
               DimensionError);
}

TEST(PosteriorTest, LearnsDeterministicChannel) {
  // z selects o_t1 = one-hot(z); o_t is constant.
  constexpr int kZ = 16;
  Rng rng(9);
  PosteriorNet net(kZ, kZ);
  net.Initialize(rng);
  numeric::OptimizerState opt{5e-3, 0.99, 1e-5, {}};
  Tensor pairs = Tensor::Zeros(kZ, 2 * kZ);
  for (int z = 0; z < kZ; ++z) {
    pairs.at(z, 0) = 1.0;
    pairs.at(z, kZ + z) = 1.0;
  }
  for (int it = 0; it < 400; ++it) {
    PosteriorNet grads(kZ, kZ);
    PosteriorNet::Cache cache;
    const Tensor probs = net.Forward(pairs, &cache);
    Tensor grad = probs.ZerosLike();
    for (int z = 0; z < kZ; ++z) {
      std::vector<double> onehot(kZ, 0.0);
      onehot[z] = 1.0;
      mixer::LossI(onehot, probs.row(z), grad.row(z));
    }
    net.Backward(grad, cache, &grads);
    numeric::RmsPropUpdate(numeric::ParamsOf(net), numeric::ParamsOf(grads),
                           opt);
  }
  int correct = 0;
  const Tensor probs = net.Forward(pairs);
  for (int z = 0; z < kZ; ++z) {
    int best = 0;
    for (int k = 1; k < kZ; ++k) {
      if (probs.at(z, k) > probs.at(z, best)) best = k;
    }
    correct += best == z;
  }
  EXPECT_GT(correct / static_cast<double>(kZ), 0.95);
}

}  // namespace
}  // namespace jim::policy
