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

#include "jim/numeric/optimizer.h"

#include <cmath>

#include "jim/errors.h"

namespace jim::numeric {

void RmsPropUpdate(std::span<const NamedTensor> params,
                   std::span<const NamedTensor> grads, OptimizerState& state) {
  if (params.size() != grads.size()) {
    throw DimensionError("rmsprop: parameter and gradient block counts differ");
  }
  for (std::size_t b = 0; b < params.size(); ++b) {
    Tensor& p = *params[b].tensor;
    const Tensor& g = *grads[b].tensor;
    if (p.shape() != g.shape()) {
      throw DimensionError("rmsprop: gradient shape mismatch for " +
                           params[b].name);
    }
    if (!g.AllFinite()) {
      throw NumericError("rmsprop: non-finite gradient in " + params[b].name);
    }
    auto [it, inserted] = state.accumulators.try_emplace(params[b].name);
    Tensor& acc = it->second;
    if (inserted) acc = p.ZerosLike();
    for (std::size_t i = 0; i < p.size(); ++i) {
      acc[i] = state.decay * acc[i] + (1.0 - state.decay) * g[i] * g[i];
      p[i] -= state.lr * g[i] / std::sqrt(acc[i] + state.eps_stability);
    }
  }
}

double ClipGradNorm(std::span<const NamedTensor> grads, double max_norm) {
  double sq = 0.0;
  for (const auto& g : grads) {
    for (double v : g.tensor->values()) sq += v * v;
  }
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for (const auto& g : grads) {
      for (double& v : g.tensor->values()) v *= scale;
    }
  }
  return norm;
}

}  // namespace jim::numeric
