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

#include "jim/eval/ablate.h"

#include "jim/errors.h"

namespace jim::eval {

std::optional<AblationMode> ParseAblationMode(std::string_view name) {
  if (name == "zero_intention") return AblationMode::kZeroIntention;
  if (name == "no_weighting") return AblationMode::kNoWeighting;
  return std::nullopt;
}

ZeroIntentionResult AblateZeroIntention(const trainer::NetworkBundle& nets,
                                        const config::ExperimentConfig& config,
                                        const EvalOptions& options) {
  if (!nets.has_intentions()) {
    throw ParameterError("zero_intention ablation needs an intention level");
  }
  ZeroIntentionResult result;
  EvalOptions full = options;
  full.zero_intention = false;
  EvalOptions zero = options;
  zero.zero_intention = true;
  result.full = Evaluate(nets, config, full);
  result.zero = Evaluate(nets, config, zero);
  if (result.full.mean_return_per_agent > 0.0) {
    result.retained =
        result.zero.mean_return_per_agent / result.full.mean_return_per_agent;
  }
  return result;
}

trainer::TrainingResult AblateNoWeighting(config::ExperimentConfig config,
                                          std::uint64_t seed,
                                          const trainer::RunOptions& options) {
  config.mode = config::TrainMode::kNoWeighting;
  return trainer::RunTraining(config, seed, options);
}

}  // namespace jim::eval
