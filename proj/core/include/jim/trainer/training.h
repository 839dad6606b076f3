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

#ifndef JIM_TRAINER_TRAINING_H_
#define JIM_TRAINER_TRAINING_H_

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "jim/config/experiment_config.h"
#include "jim/eval/evaluate.h"
#include "jim/mixer/losses.h"
#include "jim/trainer/network_bundle.h"

namespace jim::trainer {

// One row per evaluation point.
struct EvalRow {
  int episode = 0;
  std::int64_t env_steps = 0;
  double epsilon = 0.0;
  double mean_return_per_agent = 0.0;
  double success_rate = 0.0;
  // Means over the training steps since the previous row.
  mixer::LossBundle loss;
  int train_steps = 0;
  // Mean intention run length of the training rollouts since the previous
  // row, and observer statistics of the greedy evaluation episodes.
  double train_run_length = 0.0;
  double observer_distance = 0.0;
  double agreement = 0.0;
  bool operator==(const EvalRow&) const = default;
};

struct LossRow {
  std::int64_t env_steps = 0;
  int episode = 0;
  mixer::LossBundle loss;
  bool operator==(const LossRow&) const = default;
};

// Intention runs of one training episode.
struct ContinuityPoint {
  std::int64_t env_steps = 0;  // at the end of the episode
  std::int64_t run_total = 0;
  std::int64_t runs = 0;
  bool operator==(const ContinuityPoint&) const = default;
};

struct TrainingLog {
  std::uint64_t seed = 0;
  std::string config_hash;
  std::vector<EvalRow> rows;
  std::vector<LossRow> losses;
  std::vector<ContinuityPoint> continuity;
  eval::EvalMetrics final_eval;
  int episodes = 0;
  std::int64_t env_steps = 0;

  // Mean run length over the first and final tenth of the step budget.
  double ContinuityFirst() const;
  double ContinuityFinal() const;
  bool operator==(const TrainingLog&) const = default;
};

struct RunOptions {
  // When non-empty, artifacts are written here.
  std::filesystem::path output_dir;
  // Progress lines, or null for silence.
  std::ostream* progress = nullptr;
};

struct TrainingResult {
  TrainingLog log;
  NetworkBundle nets;
};

// Full training run for config.mode. Identical config and seed give an
// identical log.
TrainingResult RunTraining(const config::ExperimentConfig& config,
                           std::uint64_t seed, const RunOptions& options = {});

// Writes train_log.csv, losses.csv, continuity.csv and summary.json.
void WriteTrainingLog(const TrainingLog& log,
                      const config::ExperimentConfig& config,
                      const std::filesystem::path& dir);

// "seed=<seed> config_hash=<hash>", the leading comment of every CSV.
std::string RunComment(std::uint64_t seed, const std::string& config_hash);

}  // namespace jim::trainer

#endif  // JIM_TRAINER_TRAINING_H_
