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

#include "jim/numeric/ops.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "jim/errors.h"

namespace jim::numeric {
namespace {

void RequireTemperature(double temperature) {
  if (!(temperature > 0.0)) {
    throw ParameterError("softmax temperature must be > 0, got " +
                         std::to_string(temperature));
  }
}

void RequireSameSupport(std::size_t p, std::size_t q) {
  if (p != q) {
    throw DimensionError("distributions over different supports: " +
                         std::to_string(p) + " vs " + std::to_string(q));
  }
}

}  // namespace

Distribution Softmax(std::span<const double> logits, double temperature) {
  RequireTemperature(temperature);
  Distribution out(logits.size());
  if (logits.empty()) return out;
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp((logits[i] - top) / temperature);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

Tensor SoftmaxRows(const Tensor& logits, double temperature) {
  Tensor out = logits;
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    const Distribution row = Softmax(logits.row(r), temperature);
    std::copy(row.begin(), row.end(), out.row(r).begin());
  }
  return out;
}

std::vector<double> SoftmaxBackward(std::span<const double> probs,
                                    std::span<const double> grad_probs,
                                    double temperature) {
  RequireTemperature(temperature);
  RequireSameSupport(probs.size(), grad_probs.size());
  double dot = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) dot += probs[i] * grad_probs[i];
  std::vector<double> out(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    out[i] = probs[i] * (grad_probs[i] - dot) / temperature;
  }
  return out;
}

double CategoricalKl(std::span<const double> p, std::span<const double> q,
                     double floor) {
  return CategoricalKlWithGrad(p, q, {}, {}, floor);
}

double CategoricalKlWithGrad(std::span<const double> p,
                             std::span<const double> q,
                             std::span<double> grad_q, std::span<double> grad_p,
                             double floor) {
  RequireSameSupport(p.size(), q.size());
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double qi = std::max(q[i], floor);
    if (p[i] > 0.0) {
      const double pi = std::max(p[i], floor);
      kl += p[i] * (std::log(pi) - std::log(qi));
      if (!grad_p.empty()) grad_p[i] += std::log(pi) - std::log(qi) + 1.0;
      if (!grad_q.empty() && q[i] > floor) grad_q[i] -= p[i] / qi;
    }
  }
  if (!std::isfinite(kl)) throw NumericError("categorical_kl is not finite");
  // Flooring q can push the sum a hair below zero.
  return std::max(kl, 0.0);
}

}  // namespace jim::numeric
