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

#include "jim/trainer/gradcheck_suite.h"

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "jim/config/experiment_config.h"
#include "jim/numeric/layers.h"
#include "jim/numeric/params.h"
#include "jim/partition/partition.h"
#include "jim/trainer/train_step.h"

namespace jim::trainer {
namespace {

using numeric::GradCheckReport;
using numeric::Tensor;

Tensor RandomTensor(std::size_t rows, std::size_t cols, Rng& rng) {
  Tensor t = Tensor::Zeros(rows, cols);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (double& v : t.values()) v = dist(rng);
  return t;
}

double Dot(const Tensor& a, const Tensor& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void Merge(GradCheckReport& into, GradCheckReport part,
           const std::string& prefix) {
  for (auto& block : part.blocks) {
    block.name = prefix + block.name;
    into.blocks.push_back(std::move(block));
  }
  into.passed = into.passed && part.passed;
}

// Checks d(sum(weights * f(x)))/dparams for a module with Visit().
template <typename Module, typename Forward, typename Backward>
GradCheckReport CheckModule(Module& module, Forward forward,
                            Backward backward, double tol) {
  Module grads = module;
  numeric::ZeroParams(grads);
  backward(grads);
  return numeric::FiniteDiffGradCheck(forward, numeric::ParamsOf(module),
                                      numeric::ConstParamsOf(grads), 1e-5,
                                      tol);
}

}  // namespace

NetworkShape SmallShape(bool intentions) {
  NetworkShape s;
  s.obs_dim = 5;
  s.state_dim = 4;
  s.n_agents = 3;
  s.max_agents = 4;
  s.n_actions = 4;
  s.n_intentions = intentions ? 4 : 0;
  s.hidden_dim = 6;
  s.mixer_embed = 5;
  return s;
}

Episode MakeSyntheticEpisode(const NetworkShape& shape, int length,
                             bool terminated, Rng& rng) {
  Episode ep;
  ep.n_agents = static_cast<int>(shape.n_agents);
  ep.obs_dim = static_cast<int>(shape.obs_dim);
  ep.state_dim = static_cast<int>(shape.state_dim);
  ep.env_seed = rng();
  ep.terminated = terminated;
  std::normal_distribution<double> reward(0.0, 1.0);
  const int n = ep.n_agents;
  for (int t = 0; t <= length; ++t) {
    std::vector<float> obs(shape.n_agents * shape.obs_dim);
    for (float& v : obs) v = static_cast<float>(Uniform01(rng));
    std::vector<float> state(shape.state_dim);
    for (float& v : state) v = static_cast<float>(Uniform01(rng));
    ep.obs.push_back(std::move(obs));
    ep.states.push_back(std::move(state));
    std::vector<std::vector<int>> sees(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i != j && Uniform01(rng) < 0.5) {
          sees[static_cast<std::size_t>(i)].push_back(j);
        }
      }
    }
    const auto teams =
        partition::GreedyPartition(partition::VisibilityGraph(sees), rng);
    if (shape.n_intentions > 0) {
      std::vector<int> z;
      for (std::size_t j = 0; j < teams.teams.size(); ++j) {
        z.push_back(
            UniformIndex(rng, static_cast<int>(shape.n_intentions)));
      }
      ep.team_z.push_back(std::move(z));
    }
    ep.teams.push_back(teams);
    if (t < length) {
      std::vector<int> actions;
      for (int i = 0; i < n; ++i) {
        actions.push_back(UniformIndex(rng, static_cast<int>(shape.n_actions)));
      }
      ep.actions.push_back(std::move(actions));
      ep.rewards.push_back(reward(rng));
    }
  }
  return ep;
}

GradCheckReport RunGradcheckSuite(std::uint64_t seed, double tol) {
  Rng rng(seed);
  GradCheckReport report;
  report.tolerance = tol;

  for (auto act : {numeric::Activation::kIdentity, numeric::Activation::kRelu,
                   numeric::Activation::kTanh}) {
    numeric::DenseLayer layer(4, 3, act);
    layer.Initialize(rng);
    const Tensor x = RandomTensor(2, 4, rng);
    const Tensor w = RandomTensor(2, 3, rng);
    Merge(report,
          CheckModule(
              layer, [&] { return Dot(layer.Forward(x), w); },
              [&](numeric::DenseLayer& g) {
                numeric::DenseCache c;
                layer.Forward(x, &c);
                layer.Backward(w, c, &g);
              },
              tol),
          "dense_" + std::string(numeric::ActivationName(act)) + "/");
  }

  {
    numeric::GruCell cell(3, 4);
    cell.Initialize(rng);
    const Tensor x0 = RandomTensor(2, 3, rng);
    const Tensor x1 = RandomTensor(2, 3, rng);
    const Tensor h0 = RandomTensor(2, 4, rng);
    const Tensor w = RandomTensor(2, 4, rng);
    Merge(report,
          CheckModule(
              cell,
              [&] { return Dot(cell.Step(x1, cell.Step(x0, h0)), w); },
              [&](numeric::GruCell& g) {
                numeric::GruCache c0, c1;
                const Tensor h1 = cell.Step(x0, h0, &c0);
                cell.Step(x1, h1, &c1);
                auto [dx1, dh1] = cell.Backward(w, c1, &g);
                cell.Backward(dh1, c0, &g);
              },
              tol),
          "gru/");
  }

  const NetworkShape shape = SmallShape(true);
  NetworkBundle nets = NetworkBundle::Create(shape, rng);
  {
    const Tensor x = RandomTensor(3, shape.obs_dim, rng);
    const Tensor w = RandomTensor(3, shape.n_intentions, rng);
    auto& net = nets.intention;
    Merge(report,
          CheckModule(
              net, [&] { return Dot(net.Forward(x), w); },
              [&](policy::IntentionNet& g) {
                policy::IntentionNet::Cache c;
                net.Forward(x, &c);
                net.Backward(w, c, &g);
              },
              tol),
          "intention/");
  }
  {
    const Tensor x = RandomTensor(3, 2 * shape.obs_dim, rng);
    const Tensor w = RandomTensor(3, shape.n_intentions, rng);
    auto& net = nets.posterior;
    Merge(report,
          CheckModule(
              net, [&] { return Dot(net.Forward(x), w); },
              [&](policy::PosteriorNet& g) {
                policy::PosteriorNet::Cache c;
                net.Forward(x, &c);
                net.Backward(w, c, &g);
              },
              tol),
          "posterior/");
  }
  {
    auto& net = nets.behavior;
    const std::size_t steps = 3;
    std::vector<Tensor> xs, ws;
    for (std::size_t t = 0; t < steps; ++t) {
      xs.push_back(RandomTensor(2, net.shape().input_dim(), rng));
      ws.push_back(RandomTensor(2, shape.n_actions, rng));
    }
    auto forward = [&] {
      Tensor h = Tensor::Zeros(2, net.hidden_dim());
      double total = 0.0;
      for (std::size_t t = 0; t < steps; ++t) {
        auto [q, hn] = net.Step(xs[t], h);
        total += Dot(q, ws[t]);
        h = std::move(hn);
      }
      return total;
    };
    Merge(report,
          CheckModule(
              net, forward,
              [&](policy::BehaviorNet& g) {
                std::vector<policy::BehaviorNet::StepCache> caches(steps);
                Tensor h = Tensor::Zeros(2, net.hidden_dim());
                for (std::size_t t = 0; t < steps; ++t) {
                  h = net.Step(xs[t], h, &caches[t]).second;
                }
                Tensor dh = Tensor::Zeros(2, net.hidden_dim());
                for (std::size_t t = steps; t-- > 0;) {
                  dh = net.Backward(ws[t], dh, caches[t], &g);
                }
              },
              tol),
          "behavior/");
  }
  for (auto act : {mixer::MixerActivation::kElu,
                   mixer::MixerActivation::kIdentity}) {
    mixer::MixerShape ms{3, 6, 5, act};
    mixer::MonotonicMixer mix(ms);
    mix.Initialize(rng);
    const Tensor qs = RandomTensor(4, 3, rng);
    const Tensor st = RandomTensor(4, 6, rng);
    const Tensor w = RandomTensor(4, 1, rng);
    Merge(report,
          CheckModule(
              mix, [&] { return Dot(mix.Forward(qs, st), w); },
              [&](mixer::MonotonicMixer& g) {
                mixer::MonotonicMixer::Cache c;
                mix.Forward(qs, st, &c);
                mix.Backward(w, c, &g);
              },
              tol),
          act == mixer::MixerActivation::kElu ? "mixer_elu/"
                                              : "mixer_identity/");
  }

  struct Variant {
    std::string name;
    config::TrainMode mode;
    config::KlPrior prior;
    bool to_intention;
  };
  const std::vector<Variant> variants = {
      {"objective_full/", config::TrainMode::kFullMethod,
       config::KlPrior::kSampled, false},
      {"objective_full_boltzmann/", config::TrainMode::kFullMethod,
       config::KlPrior::kBoltzmann, true},
      {"objective_no_weighting/", config::TrainMode::kNoWeighting,
       config::KlPrior::kSampled, false},
      {"objective_flat/", config::TrainMode::kFlatQmix,
       config::KlPrior::kSampled, false},
  };
  for (const auto& v : variants) {
    config::ExperimentConfig cfg;
    cfg.mode = v.mode;
    cfg.kl_prior = v.prior;
    cfg.kl_to_intention = v.to_intention;
    const NetworkShape s = SmallShape(cfg.uses_intentions());
    NetworkBundle online = NetworkBundle::Create(s, rng);
    // Distinct targets so bootstrapped values are not trivially tied.
    NetworkBundle other = NetworkBundle::Create(s, rng);
    online.target_behavior = other.behavior;
    online.target_intention = other.intention;
    online.target_mixer = other.mixer;
    const NetworkBundle frozen = online;
    std::vector<std::shared_ptr<const Episode>> eps;
    eps.push_back(std::make_shared<Episode>(MakeSyntheticEpisode(s, 3, true, rng)));
    eps.push_back(std::make_shared<Episode>(MakeSyntheticEpisode(s, 2, false, rng)));
    const EpisodeBatch batch = MakeBatch(eps);
    NetworkBundle grads(s);
    ComputeLoss(online, batch, cfg, &grads, &frozen);
    auto fn = [&] { return ComputeLoss(online, batch, cfg, nullptr, &frozen).total; };
    Merge(report,
          numeric::FiniteDiffGradCheck(fn, numeric::ParamsOf(online),
                                       numeric::ConstParamsOf(grads), 1e-5,
                                       tol),
          v.name);
  }
  return report;
}

}  // namespace jim::trainer
