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

#include "jim/numeric/gradcheck.h"

#include <algorithm>
#include <cmath>

#include "jim/errors.h"

namespace jim::numeric {

double GradCheckReport::max_rel_error() const {
  double worst = 0.0;
  for (const auto& b : blocks) worst = std::max(worst, b.max_rel_error);
  return worst;
}

double RelativeError(double analytic, double numerical) {
  const double denom =
      std::max({std::abs(analytic), std::abs(numerical), kGradCheckFloor});
  return std::abs(analytic - numerical) / denom;
}

GradCheckReport FiniteDiffGradCheck(const std::function<double()>& scalar_fn,
                                    std::span<const NamedTensor> params,
                                    std::span<const ConstNamedTensor> analytic,
                                    double perturb, double tol) {
  if (params.size() != analytic.size()) {
    throw DimensionError("gradcheck: parameter and gradient block counts differ");
  }
  GradCheckReport report;
  report.tolerance = tol;
  for (std::size_t b = 0; b < params.size(); ++b) {
    Tensor& p = *params[b].tensor;
    const Tensor& g = *analytic[b].tensor;
    if (p.shape() != g.shape()) {
      throw DimensionError("gradcheck: shape mismatch for " + params[b].name);
    }
    GradCheckBlock block;
    block.name = params[b].name;
    const double center = p.size() > 0 ? scalar_fn() : 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double saved = p[i];
      p[i] = saved + perturb;
      const double up = scalar_fn();
      p[i] = saved - perturb;
      const double down = scalar_fn();
      p[i] = saved;
      double numerical = (up - down) / (2.0 * perturb);
      double err = RelativeError(g[i], numerical);
      if (err > tol) {
        const double forward = (up - center) / perturb;
        const double backward = (center - down) / perturb;
        if (RelativeError(forward, backward) > tol) {
          const double err_f = RelativeError(g[i], forward);
          const double err_b = RelativeError(g[i], backward);
          numerical = err_f <= err_b ? forward : backward;
          err = std::min(err_f, err_b);
          ++block.one_sided;
        }
      }
      if (i == 0 || err > block.max_rel_error) {
        block.max_rel_error = err;
        block.worst_index = i;
        block.analytic = g[i];
        block.numerical = numerical;
      }
    }
    if (block.max_rel_error > tol) report.passed = false;
    report.blocks.push_back(std::move(block));
  }
  return report;
}

}  // namespace jim::numeric
