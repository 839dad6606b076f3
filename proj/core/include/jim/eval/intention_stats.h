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

#ifndef JIM_EVAL_INTENTION_STATS_H_
#define JIM_EVAL_INTENTION_STATS_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "jim/env/trajectory.h"

namespace jim::eval {

enum ActionBucket : int { kAllAttack = 0, kAllMove = 1, kMixed = 2 };
inline constexpr int kNumBuckets = 3;

// Bucket of a team's joint action. Any non-attack action counts as a move.
ActionBucket BucketOf(std::span<const int> member_actions, int attack_action);

struct IntentionReport {
  // Intention received, counted once per agent and step.
  std::vector<std::int64_t> selection_counts;
  // Greedy intention from each agent's own observation.
  std::vector<std::int64_t> observer_counts;
  // run length -> number of runs, per agent within each episode.
  std::map<int, std::int64_t> continuity;
  // Fraction of agent-steps whose own greedy choice matches the received z.
  double agreement = 0.0;
  // cooccurrence[z][bucket], counted once per team and step.
  std::vector<std::array<std::int64_t, kNumBuckets>> cooccurrence;

  double MeanRunLength() const;
  std::int64_t RunCount() const;
  // Total-variation distance between normalized selection and observer
  // counts.
  double ObserverDistance() const;
};

// Throws FormatError when a record lacks team or intention data.
IntentionReport IntentionStats(std::span<const env::TrajectoryRecord> records,
                               int n_intentions, int attack_action);

// Mean length of runs, or 0 when there are none.
double MeanRunLength(std::span<const int> run_lengths);

// 0.5 * sum |a/|a| - b/|b||.
double TotalVariation(std::span<const std::int64_t> a,
                      std::span<const std::int64_t> b);

// Writes selection.csv, observer.csv, continuity.csv and cooccurrence.csv
// with raw, max-normalized and share columns. comment is written as a
// leading '#' row.
void WriteIntentionReport(const IntentionReport& report,
                          const std::filesystem::path& dir,
                          const std::string& comment);

}  // namespace jim::eval

#endif  // JIM_EVAL_INTENTION_STATS_H_
