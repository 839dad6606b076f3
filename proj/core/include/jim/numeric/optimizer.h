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

#ifndef JIM_NUMERIC_OPTIMIZER_H_
#define JIM_NUMERIC_OPTIMIZER_H_

#include <map>
#include <span>
#include <string>

#include "jim/numeric/tensor.h"

namespace jim::numeric {

// RMSprop state. Accumulators are keyed by parameter name and created on
// first use.
struct OptimizerState {
  double lr = 5e-4;
  double decay = 0.99;
  double eps_stability = 1e-5;
  std::map<std::string, Tensor> accumulators;
};

// acc <- decay * acc + (1 - decay) * g^2
// p   <- p - lr * g / sqrt(acc + eps_stability)
// params and grads must be aligned block by block. Throws NumericError
// naming the parameter if a gradient is NaN or Inf.
void RmsPropUpdate(std::span<const NamedTensor> params,
                   std::span<const NamedTensor> grads, OptimizerState& state);

// Scales grads in place so their global L2 norm is at most max_norm.
// Returns the norm before clipping.
double ClipGradNorm(std::span<const NamedTensor> grads, double max_norm);

}  // namespace jim::numeric

#endif  // JIM_NUMERIC_OPTIMIZER_H_
