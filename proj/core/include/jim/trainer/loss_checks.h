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

#ifndef JIM_TRAINER_LOSS_CHECKS_H_
#define JIM_TRAINER_LOSS_CHECKS_H_

#include <cstdint>
#include <vector>

namespace jim::trainer {

// High-level weighted TD loss on a toy with two teams: compares the
// back-propagated parameter gradient with 2 * delta * sum_j alpha_j dQ_j,
// where each dQ_j is back-propagated on its own.
struct GradientIdentityReport {
  double td_error = 0.0;
  double max_abs_diff = 0.0;
  double max_abs_grad = 0.0;
  std::size_t params = 0;
};
GradientIdentityReport HighLevelGradientIdentity(std::uint64_t seed);

// Synthetic channel: context o (one of n_contexts), z ~ prior(z | o) over
// n_symbols, o' = z with probability 1 - noise(o), otherwise a uniform
// symbol. The posterior net is trained on the exact joint; the variational
// estimate E[ln q(z|o,o') - ln p(z|o)] is evaluated in closed form after
// every update.
struct MiChannelOptions {
  int n_symbols = 16;
  int n_contexts = 4;
  int iterations = 600;
  double lr = 3e-3;
  std::uint64_t seed = 0;
};
struct MiChannelReport {
  double true_mi = 0.0;
  std::vector<double> estimates;  // one per iteration, before the update
  double final_estimate = 0.0;
  double max_excess = 0.0;  // max(estimate - true_mi) over all iterations
  double final_gap = 0.0;   // true_mi - final_estimate
};
MiChannelReport RunMiChannel(const MiChannelOptions& options);

}  // namespace jim::trainer

#endif  // JIM_TRAINER_LOSS_CHECKS_H_
