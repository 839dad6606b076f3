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

#include <benchmark/benchmark.h>

#include "jim/config/experiment_config.h"
#include "jim/env/environment.h"
#include "jim/numeric/layers.h"
#include "jim/numeric/ops.h"
#include "jim/partition/partition.h"
#include "jim/rng.h"
#include "jim/trainer/gradcheck_suite.h"
#include "jim/trainer/network_bundle.h"
#include "jim/trainer/replay.h"
#include "jim/trainer/train_step.h"

namespace jim {
namespace {

void BM_GreedyPartition(benchmark::State& state) {
  Rng rng(1);
  const auto g = partition::RandomVisibilityGraph(
      static_cast<int>(state.range(0)), 0.3, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(partition::GreedyPartition(g, rng));
  }
}
BENCHMARK(BM_GreedyPartition)->Arg(4)->Arg(8)->Arg(16)->Arg(64);

void BM_BruteForcePartition(benchmark::State& state) {
  Rng rng(2);
  const auto g = partition::RandomVisibilityGraph(
      static_cast<int>(state.range(0)), 0.4, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(partition::BruteForcePartition(g, 0.01));
  }
}
BENCHMARK(BM_BruteForcePartition)->Arg(4)->Arg(6)->Arg(8);

void BM_Softmax(benchmark::State& state) {
  std::vector<double> logits(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < logits.size(); ++i) logits[i] = 0.1 * i;
  for (auto _ : state) {
    benchmark::DoNotOptimize(numeric::Softmax(logits));
  }
}
BENCHMARK(BM_Softmax)->Arg(16)->Arg(256);

void BM_DenseForward(benchmark::State& state) {
  Rng rng(3);
  const auto batch = static_cast<std::size_t>(state.range(0));
  numeric::DenseLayer layer(64, 64, numeric::Activation::kRelu);
  layer.Initialize(rng);
  const auto x = numeric::Tensor::Zeros(batch, 64);
  for (auto _ : state) {
    benchmark::DoNotOptimize(layer.Forward(x));
  }
}
BENCHMARK(BM_DenseForward)->Arg(1)->Arg(32)->Arg(256);

// One optimizer step on pursuit_small-sized networks over synthetic episodes.
void BM_TrainStep(benchmark::State& state) {
  config::ExperimentConfig cfg;
  config::SetConfigField(cfg, "env.preset", "pursuit_small");
  cfg.mode = static_cast<config::TrainMode>(state.range(0));
  auto env = env::MakeEnv(cfg.env);
  Rng rng(4);
  auto nets = trainer::NetworkBundle::Create(
      trainer::MakeNetworkShape(cfg, *env), rng);
  std::vector<std::shared_ptr<const trainer::Episode>> eps;
  for (int i = 0; i < cfg.batch_size; ++i) {
    eps.push_back(std::make_shared<trainer::Episode>(
        trainer::MakeSyntheticEpisode(nets.shape(), 25, false, rng)));
  }
  const auto batch = trainer::MakeBatch(eps);
  auto opt = trainer::MakeOptimizer(cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(trainer::TrainStep(nets, batch, cfg, opt));
  }
}
BENCHMARK(BM_TrainStep)
    ->Arg(static_cast<int>(config::TrainMode::kFullMethod))
    ->Arg(static_cast<int>(config::TrainMode::kFlatQmix))
    ->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace jim

BENCHMARK_MAIN();
