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

#ifndef JIM_EVAL_ABLATE_H_
#define JIM_EVAL_ABLATE_H_

#include <cstdint>
#include <optional>
#include <string_view>

#include "jim/config/experiment_config.h"
#include "jim/eval/evaluate.h"
#include "jim/trainer/network_bundle.h"
#include "jim/trainer/training.h"

namespace jim::eval {

enum class AblationMode { kZeroIntention, kNoWeighting };

std::optional<AblationMode> ParseAblationMode(std::string_view name);

struct ZeroIntentionResult {
  EvalMetrics full;
  EvalMetrics zero;
  // zero / full mean return per agent; empty when the full return is not
  // positive.
  std::optional<double> retained;
};

// Evaluates trained networks normally and with every team's intention fixed
// to index 0, on the same episode seeds. Throws ParameterError for networks
// without an intention level.
ZeroIntentionResult AblateZeroIntention(const trainer::NetworkBundle& nets,
                                        const config::ExperimentConfig& config,
                                        const EvalOptions& options);

// Trains with every team weight fixed to 1.
trainer::TrainingResult AblateNoWeighting(config::ExperimentConfig config,
                                          std::uint64_t seed,
                                          const trainer::RunOptions& options);

}  // namespace jim::eval

#endif  // JIM_EVAL_ABLATE_H_
