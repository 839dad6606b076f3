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

#ifndef JIM_MIXER_LOSSES_H_
#define JIM_MIXER_LOSSES_H_

#include <span>
#include <vector>

#include "jim/numeric/ops.h"

namespace jim::mixer {

using numeric::Distribution;

// Lower clamp on per-team mutual-information estimates.
inline constexpr double kMiFloor = 1e-6;

// ln q(z) - ln p(z) for the chosen z, clamped below at mi_floor.
double MiEstimate(std::span<const double> p, std::span<const double> q,
                  int chosen_z, double mi_floor = kMiFloor);

// alpha_j = K_j * I_j / sum_m I_m. Throws ParameterError on an empty or
// ragged input.
std::vector<double> AlphaWeights(std::span<const double> mi,
                                 std::span<const int> team_sizes);

// sum_j alpha_j * Q_j.
double WeightedVdnMix(std::span<const double> team_qs,
                      std::span<const double> alphas);

// KL(p || q). Gradients are accumulated into the non-empty spans.
double LossI(std::span<const double> p, std::span<const double> q,
             std::span<double> grad_q = {}, std::span<double> grad_p = {});

// Mean over members of KL(p || q_k). grad_members, when non-null, must hold
// one buffer per member.
double LossA(std::span<const double> p,
             std::span<const Distribution> member_qs,
             std::vector<std::vector<double>>* grad_members = nullptr,
             std::span<double> grad_p = {});

// Negated KL between p and q after both are restricted to the intentions
// other than chosen_z and renormalized. Zero when p puts all of its mass on
// chosen_z. Throws ParameterError when there is a single intention.
double LossD(std::span<const double> p, std::span<const double> q,
             int chosen_z, std::span<double> grad_q = {},
             std::span<double> grad_p = {});

// r when the step terminated the episode, else r + gamma * next_value.
double TdTarget(double reward, double gamma, bool terminated,
                double next_value);

// Squared error (sum_j alpha_j Q_j - target)^2 with its gradient
// 2 * delta * alpha_j written to grad_team_qs.
double HighLevelTdLoss(std::span<const double> team_qs,
                       std::span<const double> alphas, double target,
                       std::span<double> grad_team_qs = {});

struct LossBundle {
  double td_low = 0.0;
  double td_high = 0.0;
  double l_i = 0.0;
  double l_a = 0.0;
  double l_d = 0.0;
  double total = 0.0;
  double mean_alpha = 0.0;
  double mean_mi = 0.0;
  bool operator==(const LossBundle&) const = default;
};

// td_high + td_low + l_i + lambda_a * l_a + lambda_d * l_d. The mutual
// information terms are already summed over teams.
double TotalObjective(const LossBundle& parts, double lambda_a,
                      double lambda_d);

}  // namespace jim::mixer

#endif  // JIM_MIXER_LOSSES_H_
