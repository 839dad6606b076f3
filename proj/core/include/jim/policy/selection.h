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

#ifndef JIM_POLICY_SELECTION_H_
#define JIM_POLICY_SELECTION_H_

#include <span>
#include <vector>

#include "jim/numeric/ops.h"
#include "jim/rng.h"

namespace jim::policy {

// Boltzmann distribution softmax(q / temperature).
numeric::Distribution PolicyDistribution(std::span<const double> qvals,
                                         double temperature);

// Index of the largest available value; lowest index wins ties.
int MaskedArgmax(std::span<const double> qvals,
                 const std::vector<bool>& available = {});

// Epsilon-greedy choice. An empty mask means every index is available.
// Always consumes one uniform draw, plus one more when exploring.
int SelectDiscrete(std::span<const double> qvals, double epsilon, Rng& rng,
                   const std::vector<bool>& available = {});

}  // namespace jim::policy

#endif  // JIM_POLICY_SELECTION_H_
