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

#include "jim/trainer/loss_checks.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "jim/mixer/losses.h"
#include "jim/numeric/ops.h"
#include "jim/numeric/optimizer.h"
#include "jim/numeric/params.h"
#include "jim/policy/networks.h"
#include "jim/rng.h"

namespace jim::trainer {
namespace {

using numeric::Tensor;

Tensor RandomRow(std::size_t n, Rng& rng) {
  Tensor t = Tensor::Zeros(1, n);
  for (double& v : t.values()) v = 2.0 * Uniform01(rng) - 1.0;
  return t;
}

}  // namespace

GradientIdentityReport HighLevelGradientIdentity(std::uint64_t seed) {
  constexpr std::size_t kObs = 6;
  constexpr std::size_t kZ = 5;
  Rng rng(seed);
  policy::IntentionNet net(kObs, kZ);
  net.Initialize(rng);
  const std::vector<Tensor> obs{RandomRow(kObs, rng), RandomRow(kObs, rng)};
  const std::vector<int> z{1, 3};
  const std::vector<int> sizes{2, 3};
  const std::vector<double> mi{0.4, 1.3};
  const std::vector<double> alphas = mixer::AlphaWeights(mi, sizes);
  const double target = 2.0 * Uniform01(rng) - 1.0;

  std::vector<policy::IntentionNet::Cache> caches(2);
  std::vector<double> team_qs(2);
  for (int j = 0; j < 2; ++j) {
    team_qs[j] = net.Forward(obs[j], &caches[j])[z[j]];
  }
  std::vector<double> grad_qs(2, 0.0);
  mixer::HighLevelTdLoss(team_qs, alphas, target, grad_qs);
  policy::IntentionNet autodiff(kObs, kZ);
  for (int j = 0; j < 2; ++j) {
    Tensor g = Tensor::Zeros(1, kZ);
    g[z[j]] = grad_qs[j];
    net.Backward(g, caches[j], &autodiff);
  }

  GradientIdentityReport report;
  report.td_error = mixer::WeightedVdnMix(team_qs, alphas) - target;
  std::vector<policy::IntentionNet> per_team(2, policy::IntentionNet(kObs, kZ));
  for (int j = 0; j < 2; ++j) {
    Tensor g = Tensor::Zeros(1, kZ);
    g[z[j]] = 1.0;
    net.Backward(g, caches[j], &per_team[j]);
  }
  const auto a = numeric::ConstParamsOf(autodiff);
  const auto g0 = numeric::ConstParamsOf(per_team[0]);
  const auto g1 = numeric::ConstParamsOf(per_team[1]);
  for (std::size_t b = 0; b < a.size(); ++b) {
    for (std::size_t i = 0; i < a[b].tensor->size(); ++i) {
      const double hand = 2.0 * report.td_error *
                          (alphas[0] * (*g0[b].tensor)[i] +
                           alphas[1] * (*g1[b].tensor)[i]);
      const double auto_g = (*a[b].tensor)[i];
      report.max_abs_diff =
          std::max(report.max_abs_diff, std::abs(auto_g - hand));
      report.max_abs_grad = std::max(report.max_abs_grad, std::abs(auto_g));
      ++report.params;
    }
  }
  return report;
}

MiChannelReport RunMiChannel(const MiChannelOptions& options) {
  const int S = options.n_symbols;
  const int C = options.n_contexts;
  const auto dim = static_cast<std::size_t>(std::max(S, C));
  Rng rng(options.seed);

  // Context-dependent prior and noise level.
  std::vector<std::vector<double>> prior(C);
  std::vector<double> noise(C);
  for (int c = 0; c < C; ++c) {
    std::vector<double> logits(S);
    for (double& l : logits) l = 2.0 * (Uniform01(rng) - 0.5);
    prior[c] = numeric::Softmax(logits);
    noise[c] = 0.1 + 0.5 * Uniform01(rng);
  }
  const double p_context = 1.0 / C;
  // joint[c][z][s] = P(o = c, z, o' = s).
  auto channel = [&](int c, int z, int s) {
    return (1.0 - noise[c]) * (s == z ? 1.0 : 0.0) + noise[c] / S;
  };

  // One input row per (context, observed symbol).
  const auto rows = static_cast<std::size_t>(C * S);
  Tensor pairs = Tensor::Zeros(rows, 2 * dim);
  std::vector<double> row_weight(rows, 0.0);
  std::vector<std::vector<double>> true_post(rows, std::vector<double>(S));
  MiChannelReport report;
  for (int c = 0; c < C; ++c) {
    for (int s = 0; s < S; ++s) {
      const auto r = static_cast<std::size_t>(c * S + s);
      pairs.at(r, static_cast<std::size_t>(c)) = 1.0;
      pairs.at(r, dim + static_cast<std::size_t>(s)) = 1.0;
      double marginal = 0.0;
      for (int z = 0; z < S; ++z) {
        true_post[r][z] = p_context * prior[c][z] * channel(c, z, s);
        marginal += true_post[r][z];
      }
      row_weight[r] = marginal;
      for (int z = 0; z < S; ++z) {
        true_post[r][z] /= marginal;
        if (true_post[r][z] > 0.0) {
          report.true_mi += marginal * true_post[r][z] *
                            (std::log(true_post[r][z]) - std::log(prior[c][z]));
        }
      }
    }
  }

  auto estimate = [&](const Tensor& q) {
    double total = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      const int c = static_cast<int>(r) / S;
      for (int z = 0; z < S; ++z) {
        const double w = row_weight[r] * true_post[r][z];
        if (w == 0.0) continue;
        total += w * (std::log(std::max(q.at(r, z), numeric::kProbFloor)) -
                      std::log(prior[c][z]));
      }
    }
    return total;
  };

  policy::PosteriorNet net(dim, static_cast<std::size_t>(S));
  net.Initialize(rng);
  numeric::OptimizerState opt{options.lr, 0.99, 1e-5, {}};
  report.max_excess = -std::numeric_limits<double>::infinity();
  for (int it = 0; it < options.iterations; ++it) {
    policy::PosteriorNet grads(dim, static_cast<std::size_t>(S));
    policy::PosteriorNet::Cache cache;
    const Tensor q = net.Forward(pairs, &cache);
    const double est = estimate(q);
    report.estimates.push_back(est);
    report.max_excess = std::max(report.max_excess, est - report.true_mi);
    Tensor grad = q.ZerosLike();
    for (std::size_t r = 0; r < rows; ++r) {
      std::vector<double> g(S, 0.0);
      mixer::LossI(true_post[r], q.row(r), g);
      for (int z = 0; z < S; ++z) grad.at(r, z) = row_weight[r] * g[z];
    }
    net.Backward(grad, cache, &grads);
    numeric::RmsPropUpdate(numeric::ParamsOf(net), numeric::ParamsOf(grads),
                           opt);
  }
  report.final_estimate = estimate(net.Forward(pairs));
  report.max_excess =
      std::max(report.max_excess, report.final_estimate - report.true_mi);
  report.final_gap = report.true_mi - report.final_estimate;
  return report;
}

}  // namespace jim::trainer
