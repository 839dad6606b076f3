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

#ifndef JIM_NUMERIC_GRADCHECK_H_
#define JIM_NUMERIC_GRADCHECK_H_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "jim/numeric/tensor.h"

namespace jim::numeric {

struct GradCheckBlock {
  std::string name;
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double analytic = 0.0;   // at worst_index
  double numerical = 0.0;  // at worst_index
  // Coordinates checked against a one-sided difference (kink in the
  // central interval).
  std::size_t one_sided = 0;
};

struct GradCheckReport {
  std::vector<GradCheckBlock> blocks;
  double tolerance = 0.0;
  bool passed = true;
  double max_rel_error() const;
};

// Relative error |a - n| / max(|a|, |n|, kGradCheckFloor).
inline constexpr double kGradCheckFloor = 1e-3;
double RelativeError(double analytic, double numerical);

// Compares analytic gradients against central differences
// (f(p + h) - f(p - h)) / 2h of a deterministic scalar function, one
// coordinate at a time. params and analytic are aligned block by block;
// params are restored after probing. When the central difference misses
// tol and the two one-sided differences disagree by more than tol (a
// ReLU-style kink inside [p - h, p + h]), the coordinate is compared with
// whichever one-sided difference agrees with the analytic value.
GradCheckReport FiniteDiffGradCheck(const std::function<double()>& scalar_fn,
                                    std::span<const NamedTensor> params,
                                    std::span<const ConstNamedTensor> analytic,
                                    double perturb = 1e-5,
                                    double tol = 1e-4);

}  // namespace jim::numeric

#endif  // JIM_NUMERIC_GRADCHECK_H_
