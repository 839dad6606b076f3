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

#ifndef JIM_NUMERIC_OPS_H_
#define JIM_NUMERIC_OPS_H_

#include <span>
#include <vector>

#include "jim/numeric/tensor.h"

namespace jim::numeric {

// A categorical distribution stored as a probability vector.
using Distribution = std::vector<double>;

// Probabilities below this are floored inside logarithms.
inline constexpr double kProbFloor = 1e-8;

// softmax(logits / temperature), max-subtracted. Throws ParameterError when
// temperature <= 0.
Distribution Softmax(std::span<const double> logits, double temperature = 1.0);

// Row-wise softmax over a [rows x cols] tensor.
Tensor SoftmaxRows(const Tensor& logits, double temperature = 1.0);

// Pulls dL/dprobs back through softmax(logits / temperature).
std::vector<double> SoftmaxBackward(std::span<const double> probs,
                                    std::span<const double> grad_probs,
                                    double temperature = 1.0);

// KL(p || q) = sum p ln(p / max(q, floor)); terms with p == 0 contribute 0.
double CategoricalKl(std::span<const double> p, std::span<const double> q,
                     double floor = kProbFloor);

// KL value plus its gradients with respect to q and p (either may be empty
// to skip).
double CategoricalKlWithGrad(std::span<const double> p,
                             std::span<const double> q,
                             std::span<double> grad_q, std::span<double> grad_p,
                             double floor = kProbFloor);

}  // namespace jim::numeric

#endif  // JIM_NUMERIC_OPS_H_
