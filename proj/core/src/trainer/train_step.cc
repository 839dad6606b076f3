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

#include "jim/trainer/train_step.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "jim/errors.h"
#include "jim/numeric/params.h"
#include "jim/policy/selection.h"

namespace jim::trainer {
namespace {

using config::KlPrior;
using config::TrainMode;
using numeric::Tensor;

struct TeamRow {
  int b = 0;
  int t = 0;
  int z = 0;
  int size = 0;
  std::size_t member_row = 0;  // first member row in the posterior input
};

void CopyRow(std::span<const float> src, std::span<double> dst) {
  std::copy(src.begin(), src.end(), dst.begin());
}

double RowMax(std::span<const double> row) {
  return *std::max_element(row.begin(), row.end());
}

std::string Describe(const EpisodeBatch& batch) {
  std::string out;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    out += (b ? ", " : "") + std::string("env_seed=") +
           std::to_string(batch.episodes[b]->env_seed) +
           " length=" + std::to_string(batch.episodes[b]->length());
  }
  return out;
}

// Mixer input for step t of an episode: global state, then the share of
// agents holding each intention.
void MixerState(const Episode& ep, int t, std::size_t n_intentions,
                std::span<double> row) {
  std::fill(row.begin(), row.end(), 0.0);
  const auto& s = ep.states[static_cast<std::size_t>(t)];
  std::copy(s.begin(), s.end(), row.begin());
  if (n_intentions == 0) return;
  const auto z = ep.AgentZ(t);
  for (int v : z) {
    row[s.size() + static_cast<std::size_t>(v)] += 1.0 / ep.n_agents;
  }
}

}  // namespace

numeric::OptimizerState MakeOptimizer(const config::ExperimentConfig& config) {
  numeric::OptimizerState opt;
  opt.lr = config.lr;
  opt.decay = config.rms_decay;
  opt.eps_stability = config.rms_eps;
  return opt;
}

mixer::LossBundle ComputeLoss(const NetworkBundle& nets,
                              const EpisodeBatch& batch,
                              const config::ExperimentConfig& config,
                              NetworkBundle* grads,
                              const NetworkBundle* stop_grad_nets) {
  const NetworkBundle& sg = stop_grad_nets ? *stop_grad_nets : nets;
  const bool shared_sg = &sg == &nets;
  const NetworkShape& shape = nets.shape();
  const int n_batch = static_cast<int>(batch.size());
  const int horizon = batch.max_length;
  const auto n = shape.n_agents;
  const auto obs_dim = shape.obs_dim;
  const auto n_z = shape.n_intentions;
  const bool intentions = nets.has_intentions();
  const double gamma = config.gamma;
  const double temp = config.temperature;

  int n_valid = 0;
  for (const auto& ep : batch.episodes) {
    if (static_cast<std::size_t>(ep->n_agents) != n ||
        static_cast<std::size_t>(ep->obs_dim) != obs_dim) {
      throw DimensionError("train_step: episode shape differs from networks");
    }
    if (intentions && ep->team_z.empty()) {
      throw DimensionError("train_step: episode has no intention records");
    }
    n_valid += ep->length();
  }
  mixer::LossBundle loss;
  if (n_valid == 0) return loss;
  const double inv_n = 1.0 / n_valid;

  auto terminal = [&](int b, int t) {
    const Episode& ep = *batch.episodes[static_cast<std::size_t>(b)];
    return ep.terminated && t == ep.length() - 1;
  };

  // Intrinsic reward per (b, t), filled by the intention level.
  std::vector<double> intrinsic(
      static_cast<std::size_t>(n_batch) * static_cast<std::size_t>(horizon),
      0.0);

  // ---- Intention level, posterior and mutual-information losses.
  if (intentions) {
    std::vector<TeamRow> rows;
    std::size_t member_rows = 0;
    for (int b = 0; b < n_batch; ++b) {
      const Episode& ep = *batch.episodes[static_cast<std::size_t>(b)];
      for (int t = 0; t < ep.length(); ++t) {
        const auto& p = ep.teams[static_cast<std::size_t>(t)];
        for (std::size_t j = 0; j < p.teams.size(); ++j) {
          TeamRow r;
          r.b = b;
          r.t = t;
          r.z = ep.team_z[static_cast<std::size_t>(t)][j];
          r.size = static_cast<int>(p.teams[j].members.size());
          r.member_row = member_rows;
          member_rows += p.teams[j].members.size();
          rows.push_back(r);
        }
      }
    }
    const std::size_t n_rows = rows.size();
    Tensor now = Tensor::Zeros(n_rows, obs_dim);
    Tensor next = Tensor::Zeros(n_rows, obs_dim);
    // Posterior rows: commanders first, then every member.
    Tensor pairs = Tensor::Zeros(n_rows + member_rows, 2 * obs_dim);
    {
      std::size_t r = 0;
      for (int b = 0; b < n_batch; ++b) {
        const Episode& ep = *batch.episodes[static_cast<std::size_t>(b)];
        for (int t = 0; t < ep.length(); ++t) {
          for (const auto& team : ep.teams[static_cast<std::size_t>(t)].teams) {
            const int c = team.commander;
            CopyRow(ep.Obs(t, c), now.row(r));
            CopyRow(ep.Obs(t + 1, c), next.row(r));
            auto pr = pairs.row(r);
            CopyRow(ep.Obs(t, c), pr.subspan(0, obs_dim));
            CopyRow(ep.Obs(t + 1, c), pr.subspan(obs_dim, obs_dim));
            std::size_t m = n_rows + rows[r].member_row;
            for (int k : team.members) {
              auto mr = pairs.row(m++);
              CopyRow(ep.Obs(t, c), mr.subspan(0, obs_dim));
              CopyRow(ep.Obs(t + 1, k), mr.subspan(obs_dim, obs_dim));
            }
            ++r;
          }
        }
      }
    }

    policy::IntentionNet::Cache icache;
    policy::PosteriorNet::Cache pcache;
    const Tensor q_now = nets.intention.Forward(now, &icache);
    const Tensor q_now_sg = shared_sg ? q_now : sg.intention.Forward(now);
    const Tensor q_next = nets.target_intention.Forward(next);
    const Tensor post = nets.posterior.Forward(pairs, &pcache);
    const Tensor post_sg = shared_sg ? post : sg.posterior.Forward(pairs);

    Tensor grad_q = q_now.ZerosLike();
    Tensor grad_post = post.ZerosLike();
    double alpha_sum = 0.0;
    double mi_sum = 0.0;

    std::size_t r0 = 0;
    while (r0 < n_rows) {
      std::size_t r1 = r0;
      while (r1 < n_rows && rows[r1].b == rows[r0].b &&
             rows[r1].t == rows[r0].t) {
        ++r1;
      }
      const int b = rows[r0].b;
      const int t = rows[r0].t;
      const Episode& ep = *batch.episodes[static_cast<std::size_t>(b)];
      const std::size_t m = r1 - r0;

      std::vector<numeric::Distribution> prior(m);
      std::vector<double> mi(m);
      std::vector<int> sizes(m);
      for (std::size_t j = 0; j < m; ++j) {
        const TeamRow& row = rows[r0 + j];
        prior[j] = policy::PolicyDistribution(q_now_sg.row(r0 + j), temp);
        mi[j] = mixer::MiEstimate(prior[j], post_sg.row(r0 + j), row.z);
        sizes[j] = row.size;
      }
      std::vector<double> alpha =
          config.mode == TrainMode::kNoWeighting
              ? std::vector<double>(m, 1.0)
              : mixer::AlphaWeights(mi, sizes);

      // High-level TD with the weights reused in the bootstrapped target.
      std::vector<double> team_q(m);
      double next_value = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        team_q[j] = q_now.at(r0 + j, static_cast<std::size_t>(rows[r0 + j].z));
        next_value += alpha[j] * RowMax(q_next.row(r0 + j));
        alpha_sum += alpha[j];
        mi_sum += mi[j];
      }
      const double y_high = mixer::TdTarget(
          ep.rewards[static_cast<std::size_t>(t)], gamma, terminal(b, t),
          next_value);
      std::vector<double> g_team(m, 0.0);
      loss.td_high += mixer::HighLevelTdLoss(team_q, alpha, y_high, g_team);

      double r_int = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        const TeamRow& row = rows[r0 + j];
        const auto zi = static_cast<std::size_t>(row.z);
        const std::size_t r = r0 + j;
        grad_q.at(r, zi) += g_team[j] * inv_n;

        const double log_prior =
            std::log(std::max(prior[j][zi], numeric::kProbFloor));
        double member_term = 0.0;
        std::vector<numeric::Distribution> member_q;
        for (int k = 0; k < row.size; ++k) {
          const std::size_t mr = n_rows + row.member_row + k;
          member_term +=
              std::log(std::max(post_sg.at(mr, zi), numeric::kProbFloor)) -
              log_prior;
          const auto qk = post.row(mr);
          member_q.emplace_back(qk.begin(), qk.end());
        }
        r_int += member_term / row.size;

        // Prior inside the posterior losses.
        const numeric::Distribution live =
            config.kl_to_intention ? policy::PolicyDistribution(q_now.row(r), temp)
                                   : prior[j];
        numeric::Distribution p_kl = live;
        if (config.kl_prior == KlPrior::kSampled) {
          std::fill(p_kl.begin(), p_kl.end(), 0.0);
          p_kl[zi] = 1.0;
        }
        const bool prior_grad =
            config.kl_to_intention && config.kl_prior == KlPrior::kBoltzmann;
        std::vector<double> gq_i(n_z, 0.0), gp_i(n_z, 0.0);
        std::vector<double> gq_d(n_z, 0.0), gp_d(n_z, 0.0), gp_a(n_z, 0.0);
        std::vector<std::vector<double>> gm(member_q.size(),
                                            std::vector<double>(n_z, 0.0));
        const auto q_cmd = post.row(r);
        loss.l_i += mixer::LossI(p_kl, q_cmd, gq_i,
                                 prior_grad ? std::span<double>(gp_i)
                                            : std::span<double>());
        loss.l_a += mixer::LossA(p_kl, member_q, &gm,
                                 prior_grad ? std::span<double>(gp_a)
                                            : std::span<double>());
        loss.l_d += mixer::LossD(live, q_cmd, row.z, gq_d,
                                 config.kl_to_intention ? std::span<double>(gp_d)
                                                        : std::span<double>());
        auto gpost = grad_post.row(r);
        for (std::size_t z = 0; z < n_z; ++z) {
          gpost[z] += inv_n * (gq_i[z] + config.lambda_d * gq_d[z]);
        }
        for (int k = 0; k < row.size; ++k) {
          auto gmr = grad_post.row(n_rows + row.member_row + k);
          for (std::size_t z = 0; z < n_z; ++z) {
            gmr[z] += inv_n * config.lambda_a * gm[static_cast<std::size_t>(k)][z];
          }
        }
        if (config.kl_to_intention) {
          std::vector<double> gp(n_z);
          for (std::size_t z = 0; z < n_z; ++z) {
            gp[z] = inv_n * (gp_i[z] + config.lambda_a * gp_a[z] +
                             config.lambda_d * gp_d[z]);
          }
          const auto gl = numeric::SoftmaxBackward(live, gp, temp);
          for (std::size_t z = 0; z < n_z; ++z) grad_q.at(r, z) += gl[z];
        }
      }
      intrinsic[static_cast<std::size_t>(b * horizon + t)] = r_int;
      r0 = r1;
    }
    loss.td_high *= inv_n;
    loss.l_i *= inv_n;
    loss.l_a *= inv_n;
    loss.l_d *= inv_n;
    loss.mean_alpha = n_rows ? alpha_sum / n_rows : 0.0;
    loss.mean_mi = n_rows ? mi_sum / n_rows : 0.0;

    if (grads != nullptr) {
      nets.intention.Backward(grad_q, icache, &grads->intention);
      nets.posterior.Backward(grad_post, pcache, &grads->posterior);
    }
  }

  // ---- Behavior level through the monotonic mixer.
  const auto& bnet = nets.behavior;
  const std::size_t rows_bn = static_cast<std::size_t>(n_batch) * n;
  const std::size_t in_dim = bnet.shape().input_dim();
  std::vector<double> zero_obs(obs_dim, 0.0);
  auto build_inputs = [&](int t) {
    Tensor in = Tensor::Zeros(rows_bn, in_dim);
    std::vector<double> o(obs_dim);
    for (int b = 0; b < n_batch; ++b) {
      const Episode& ep = *batch.episodes[static_cast<std::size_t>(b)];
      const bool real = t <= ep.length();
      const std::vector<int> z =
          real ? ep.AgentZ(t) : std::vector<int>(n, 0);
      for (std::size_t i = 0; i < n; ++i) {
        if (real) {
          const auto src = ep.Obs(t, static_cast<int>(i));
          std::copy(src.begin(), src.end(), o.begin());
        } else {
          std::fill(o.begin(), o.end(), 0.0);
        }
        bnet.BuildInput(o, z[i], static_cast<int>(i),
                        in.row(static_cast<std::size_t>(b) * n + i));
      }
    }
    return in;
  };

  std::vector<policy::BehaviorNet::StepCache> caches(
      static_cast<std::size_t>(horizon));
  std::vector<Tensor> q_online(static_cast<std::size_t>(horizon));
  std::vector<Tensor> q_target(static_cast<std::size_t>(horizon) + 1);
  {
    Tensor h = Tensor::Zeros(rows_bn, bnet.hidden_dim());
    Tensor h_target = h;
    for (int t = 0; t <= horizon; ++t) {
      const Tensor in = build_inputs(t);
      if (t < horizon) {
        auto [q, h_next] =
            bnet.Step(in, h, &caches[static_cast<std::size_t>(t)]);
        q_online[static_cast<std::size_t>(t)] = std::move(q);
        h = std::move(h_next);
      }
      auto [qt, ht_next] = nets.target_behavior.Step(in, h_target);
      q_target[static_cast<std::size_t>(t)] = std::move(qt);
      h_target = std::move(ht_next);
    }
  }

  const std::size_t mix_rows =
      static_cast<std::size_t>(n_batch) * static_cast<std::size_t>(horizon);
  const std::size_t mix_state = shape.mixer_state_dim();
  Tensor agent_qs = Tensor::Zeros(mix_rows, n);
  Tensor next_qs = Tensor::Zeros(mix_rows, n);
  Tensor states = Tensor::Zeros(mix_rows, mix_state);
  Tensor next_states = Tensor::Zeros(mix_rows, mix_state);
  for (int b = 0; b < n_batch; ++b) {
    const Episode& ep = *batch.episodes[static_cast<std::size_t>(b)];
    for (int t = 0; t < ep.length(); ++t) {
      const std::size_t mr = static_cast<std::size_t>(b * horizon + t);
      const auto& acts = ep.actions[static_cast<std::size_t>(t)];
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t row = static_cast<std::size_t>(b) * n + i;
        agent_qs.at(mr, i) = q_online[static_cast<std::size_t>(t)].at(
            row, static_cast<std::size_t>(acts[i]));
        next_qs.at(mr, i) =
            RowMax(q_target[static_cast<std::size_t>(t) + 1].row(row));
      }
      MixerState(ep, t, n_z, states.row(mr));
      MixerState(ep, t + 1, n_z, next_states.row(mr));
    }
  }
  mixer::MonotonicMixer::Cache mcache;
  const Tensor q_tot = nets.mixer.Forward(agent_qs, states, &mcache);
  const Tensor q_tot_next = nets.target_mixer.Forward(next_qs, next_states);
  Tensor grad_tot = Tensor::Zeros(mix_rows, 1);
  for (int b = 0; b < n_batch; ++b) {
    const Episode& ep = *batch.episodes[static_cast<std::size_t>(b)];
    for (int t = 0; t < ep.length(); ++t) {
      const std::size_t mr = static_cast<std::size_t>(b * horizon + t);
      const double reward = ep.rewards[static_cast<std::size_t>(t)] +
                            config.beta * intrinsic[mr];
      const double y = mixer::TdTarget(reward, gamma, terminal(b, t),
                                       q_tot_next.at(mr, 0));
      const double delta = q_tot.at(mr, 0) - y;
      loss.td_low += delta * delta;
      grad_tot.at(mr, 0) = 2.0 * delta * inv_n;
    }
  }
  loss.td_low *= inv_n;
  loss.total = mixer::TotalObjective(loss, config.lambda_a, config.lambda_d);

  if (grads != nullptr) {
    const Tensor d_agent = nets.mixer.Backward(grad_tot, mcache, &grads->mixer);
    Tensor dh = Tensor::Zeros(rows_bn, bnet.hidden_dim());
    for (int t = horizon - 1; t >= 0; --t) {
      Tensor gq = q_online[static_cast<std::size_t>(t)].ZerosLike();
      for (int b = 0; b < n_batch; ++b) {
        const Episode& ep = *batch.episodes[static_cast<std::size_t>(b)];
        if (t >= ep.length()) continue;
        const std::size_t mr = static_cast<std::size_t>(b * horizon + t);
        const auto& acts = ep.actions[static_cast<std::size_t>(t)];
        for (std::size_t i = 0; i < n; ++i) {
          gq.at(static_cast<std::size_t>(b) * n + i,
                static_cast<std::size_t>(acts[i])) = d_agent.at(mr, i);
        }
      }
      dh = bnet.Backward(gq, dh, caches[static_cast<std::size_t>(t)],
                         &grads->behavior);
    }
  }

  if (!std::isfinite(loss.total)) {
    throw NumericError("non-finite training loss on batch [" +
                       Describe(batch) + "]");
  }
  return loss;
}

mixer::LossBundle TrainStep(NetworkBundle& nets, const EpisodeBatch& batch,
                            const config::ExperimentConfig& config,
                            numeric::OptimizerState& optimizer) {
  NetworkBundle grads(nets.shape());
  const mixer::LossBundle loss = ComputeLoss(nets, batch, config, &grads);
  const auto grad_list = numeric::ParamsOf(grads);
  if (config.grad_clip > 0.0) numeric::ClipGradNorm(grad_list, config.grad_clip);
  numeric::RmsPropUpdate(numeric::ParamsOf(nets), grad_list, optimizer);
  return loss;
}

}  // namespace jim::trainer
