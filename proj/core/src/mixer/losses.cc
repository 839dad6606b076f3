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

#include "jim/mixer/losses.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "jim/errors.h"

namespace jim::mixer {
using numeric::kProbFloor;

double MiEstimate(std::span<const double> p, std::span<const double> q,
                  int chosen_z, double mi_floor) {
  if (p.size() != q.size()) {
    throw DimensionError("mi_estimate: prior and posterior supports differ");
  }
  if (chosen_z < 0 || static_cast<std::size_t>(chosen_z) >= p.size()) {
    throw DimensionError("mi_estimate: intention id out of range");
  }
  const auto z = static_cast<std::size_t>(chosen_z);
  const double est = std::log(std::max(q[z], kProbFloor)) -
                     std::log(std::max(p[z], kProbFloor));
  return std::max(est, mi_floor);
}

std::vector<double> AlphaWeights(std::span<const double> mi,
                                 std::span<const int> team_sizes) {
  if (mi.empty()) throw ParameterError("alpha_weights: no teams");
  if (mi.size() != team_sizes.size()) {
    throw DimensionError("alpha_weights: " + std::to_string(mi.size()) +
                         " estimates for " +
                         std::to_string(team_sizes.size()) + " teams");
  }
  double total = 0.0;
  for (double v : mi) {
    if (!(v > 0.0)) {
      throw ParameterError("alpha_weights: estimates must be positive");
    }
    total += v;
  }
  std::vector<double> alpha(mi.size());
  for (std::size_t j = 0; j < mi.size(); ++j) {
    alpha[j] = team_sizes[j] * mi[j] / total;
  }
  return alpha;
}

double WeightedVdnMix(std::span<const double> team_qs,
                      std::span<const double> alphas) {
  if (team_qs.size() != alphas.size()) {
    throw DimensionError("weighted_vdn_mix: " +
                         std::to_string(team_qs.size()) + " values for " +
                         std::to_string(alphas.size()) + " weights");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < team_qs.size(); ++j) {
    total += alphas[j] * team_qs[j];
  }
  return total;
}

double LossI(std::span<const double> p, std::span<const double> q,
             std::span<double> grad_q, std::span<double> grad_p) {
  return numeric::CategoricalKlWithGrad(p, q, grad_q, grad_p);
}

double LossA(std::span<const double> p,
             std::span<const Distribution> member_qs,
             std::vector<std::vector<double>>* grad_members,
             std::span<double> grad_p) {
  if (member_qs.empty()) throw ParameterError("loss_A: empty member list");
  const double scale = 1.0 / static_cast<double>(member_qs.size());
  std::vector<double> gp(grad_p.empty() ? 0 : p.size(), 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < member_qs.size(); ++k) {
    std::vector<double> gq(grad_members != nullptr ? p.size() : 0, 0.0);
    total += numeric::CategoricalKlWithGrad(p, member_qs[k], gq, gp);
    if (grad_members != nullptr) {
      auto& dst = (*grad_members)[k];
      for (std::size_t i = 0; i < gq.size(); ++i) dst[i] += scale * gq[i];
    }
  }
  for (std::size_t i = 0; i < gp.size(); ++i) grad_p[i] += scale * gp[i];
  return scale * total;
}

double LossD(std::span<const double> p, std::span<const double> q,
             int chosen_z, std::span<double> grad_q, std::span<double> grad_p) {
  if (p.size() != q.size()) {
    throw DimensionError("loss_D: prior and posterior supports differ");
  }
  if (p.size() < 2) {
    throw ParameterError("loss_D: undefined for a single intention");
  }
  if (chosen_z < 0 || static_cast<std::size_t>(chosen_z) >= p.size()) {
    throw DimensionError("loss_D: intention id out of range");
  }
  const auto c = static_cast<std::size_t>(chosen_z);
  const double p_rest = 1.0 - p[c];
  if (p_rest <= kProbFloor) return 0.0;
  const double q_rest = std::max(1.0 - q[c], kProbFloor);

  double kl = 0.0;
  double dkl_dpc = 0.0;
  double dkl_dqc = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (k == c || p[k] <= 0.0) continue;
    const double pk = p[k] / p_rest;
    const double qk_raw = std::max(q[k], kProbFloor);
    const double qk = qk_raw / q_rest;
    const double log_ratio = std::log(pk / qk);
    kl += pk * log_ratio;
    // d(-KL)/dq_k, and the share flowing through the normalizer q_rest.
    if (!grad_q.empty()) grad_q[k] += pk / qk_raw;
    dkl_dqc += pk / q_rest;
    if (!grad_p.empty()) grad_p[k] -= (log_ratio + 1.0) / p_rest;
    dkl_dpc += (log_ratio + 1.0) * pk / p_rest;
  }
  if (!grad_q.empty()) grad_q[c] += dkl_dqc;
  if (!grad_p.empty()) grad_p[c] -= dkl_dpc;
  return -std::max(kl, 0.0);
}

double TdTarget(double reward, double gamma, bool terminated,
                double next_value) {
  return terminated ? reward : reward + gamma * next_value;
}

double HighLevelTdLoss(std::span<const double> team_qs,
                       std::span<const double> alphas, double target,
                       std::span<double> grad_team_qs) {
  const double delta = WeightedVdnMix(team_qs, alphas) - target;
  if (!grad_team_qs.empty()) {
    for (std::size_t j = 0; j < alphas.size(); ++j) {
      grad_team_qs[j] += 2.0 * delta * alphas[j];
    }
  }
  return delta * delta;
}

double TotalObjective(const LossBundle& parts, double lambda_a,
                      double lambda_d) {
  if (lambda_a < 0.0 || lambda_d < 0.0) {
    throw ParameterError("total_objective: multipliers must be non-negative");
  }
  return parts.td_high + parts.td_low + parts.l_i + lambda_a * parts.l_a +
         lambda_d * parts.l_d;
}

}  // namespace jim::mixer
