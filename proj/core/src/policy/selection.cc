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

#include "jim/policy/selection.h"

#include <string>
#include <vector>

#include "jim/errors.h"

namespace jim::policy {

numeric::Distribution PolicyDistribution(std::span<const double> qvals,
                                         double temperature) {
  return numeric::Softmax(qvals, temperature);
}

int MaskedArgmax(std::span<const double> qvals,
                 const std::vector<bool>& available) {
  if (!available.empty() && available.size() != qvals.size()) {
    throw DimensionError("availability mask has " +
                         std::to_string(available.size()) + " entries for " +
                         std::to_string(qvals.size()) + " values");
  }
  int best = -1;
  for (std::size_t i = 0; i < qvals.size(); ++i) {
    if (!available.empty() && !available[i]) continue;
    if (best < 0 || qvals[i] > qvals[static_cast<std::size_t>(best)]) {
      best = static_cast<int>(i);
    }
  }
  if (best < 0) throw ParameterError("select_discrete: no available choice");
  return best;
}

int SelectDiscrete(std::span<const double> qvals, double epsilon, Rng& rng,
                   const std::vector<bool>& available) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw ParameterError("select_discrete: epsilon must lie in [0, 1], got " +
                         std::to_string(epsilon));
  }
  const int greedy = MaskedArgmax(qvals, available);
  if (Uniform01(rng) >= epsilon) return greedy;
  if (available.empty()) {
    return static_cast<int>(UniformIndex(rng, static_cast<int>(qvals.size())));
  }
  std::vector<int> open;
  for (std::size_t i = 0; i < available.size(); ++i) {
    if (available[i]) open.push_back(static_cast<int>(i));
  }
  return open[static_cast<std::size_t>(
      UniformIndex(rng, static_cast<int>(open.size())))];
}

}  // namespace jim::policy
