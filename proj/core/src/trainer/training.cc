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

#include "jim/trainer/training.h"

#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "jim/env/trajectory.h"
#include "jim/errors.h"
#include "jim/eval/intention_stats.h"
#include "jim/trainer/replay.h"
#include "jim/trainer/rollout.h"
#include "jim/trainer/train_step.h"

namespace jim::trainer {
namespace {

// Independent random streams of one run.
enum Stream : std::uint64_t {
  kInitStream = 1,
  kRolloutStream = 2,
  kSampleStream = 3,
  kEnvStream = 4,
  kEvalStream = 5,
};

double WindowMean(const std::vector<ContinuityPoint>& points,
                  std::int64_t lo, std::int64_t hi) {
  std::int64_t total = 0;
  std::int64_t runs = 0;
  for (const auto& p : points) {
    if (p.env_steps > lo && p.env_steps <= hi) {
      total += p.run_total;
      runs += p.runs;
    }
  }
  return runs > 0 ? static_cast<double>(total) / static_cast<double>(runs)
                  : 0.0;
}

void Accumulate(mixer::LossBundle& acc, const mixer::LossBundle& l) {
  acc.td_low += l.td_low;
  acc.td_high += l.td_high;
  acc.l_i += l.l_i;
  acc.l_a += l.l_a;
  acc.l_d += l.l_d;
  acc.total += l.total;
  acc.mean_alpha += l.mean_alpha;
  acc.mean_mi += l.mean_mi;
}

mixer::LossBundle Scaled(mixer::LossBundle l, int count) {
  if (count == 0) return l;
  const double s = 1.0 / count;
  l.td_low *= s;
  l.td_high *= s;
  l.l_i *= s;
  l.l_a *= s;
  l.l_d *= s;
  l.total *= s;
  l.mean_alpha *= s;
  l.mean_mi *= s;
  return l;
}

void WriteEpisodeDiagnostic(const EpisodeBatch& batch,
                            const std::filesystem::path& path) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& ep : batch.episodes) {
    j.push_back({{"env_seed", ep->env_seed},
                 {"length", ep->length()},
                 {"terminated", ep->terminated},
                 {"actions", ep->actions},
                 {"rewards", ep->rewards},
                 {"team_z", ep->team_z}});
  }
  std::ofstream(path) << j.dump(1) << "\n";
}

}  // namespace

double TrainingLog::ContinuityFirst() const {
  return WindowMean(continuity, 0, env_steps / 10);
}

double TrainingLog::ContinuityFinal() const {
  return WindowMean(continuity, env_steps - env_steps / 10, env_steps);
}

std::string RunComment(std::uint64_t seed, const std::string& config_hash) {
  return "seed=" + std::to_string(seed) + " config_hash=" + config_hash;
}

TrainingResult RunTraining(const config::ExperimentConfig& config,
                           std::uint64_t seed, const RunOptions& options) {
  config::ValidateExperimentConfig(config);
  const std::string hash = config::ConfigHashHex(config);
  const bool write = !options.output_dir.empty();
  if (write) {
    std::filesystem::create_directories(options.output_dir);
    std::ofstream(options.output_dir / "config.ini")
        << "# " << RunComment(seed, hash) << "\n"
        << config::CanonicalConfig(config);
  }

  env::EnvConfig env_config = config.env;
  env_config.seed = DeriveSeed(seed, kEnvStream);
  std::unique_ptr<env::Environment> env = env::MakeEnv(env_config);

  Rng init_rng(DeriveSeed(seed, kInitStream));
  Rng rollout_rng(DeriveSeed(seed, kRolloutStream));
  Rng sample_rng(DeriveSeed(seed, kSampleStream));

  TrainingResult result;
  TrainingLog& log = result.log;
  log.seed = seed;
  log.config_hash = hash;
  NetworkBundle& nets = result.nets;
  nets = NetworkBundle::Create(MakeNetworkShape(config, *env), init_rng);
  numeric::OptimizerState optimizer = MakeOptimizer(config);
  ReplayBuffer buffer(static_cast<std::size_t>(config.buffer_size));
  const Schedule schedule{config.eps_start, config.eps_end,
                          config.anneal_steps};

  eval::EvalOptions eval_options;
  eval_options.episodes = config.eval_episodes;
  eval_options.seed = DeriveSeed(seed, kEvalStream);
  // Every greedy episode is traced for the observer statistics; only the
  // first dump_episodes are written to disk.
  eval_options.dump_episodes =
      nets.has_intentions() ? config.eval_episodes : config.dump_episodes;

  mixer::LossBundle loss_acc;
  int loss_count = 0;
  std::int64_t run_total = 0;
  std::int64_t run_count = 0;
  std::int64_t next_eval = 0;

  auto evaluate_now = [&](bool final_point) {
    eval::EvalOptions eo = eval_options;
    if (final_point) eo.episodes = config.final_eval_episodes;
    eval::EvalMetrics m = eval::Evaluate(nets, config, eo);
    EvalRow row;
    row.episode = log.episodes;
    row.env_steps = log.env_steps;
    row.epsilon = EpsilonAt(log.env_steps, schedule);
    row.mean_return_per_agent = m.mean_return_per_agent;
    row.success_rate = m.success_rate;
    row.loss = Scaled(loss_acc, loss_count);
    row.train_steps = loss_count;
    row.train_run_length =
        run_count > 0 ? static_cast<double>(run_total) / run_count : 0.0;
    if (nets.has_intentions() && !m.records.empty()) {
      const eval::IntentionReport report = eval::IntentionStats(
          m.records, config.n_intentions, env->attack_action());
      row.observer_distance = report.ObserverDistance();
      row.agreement = report.agreement;
    }
    if (write && config.dump_episodes > 0 && !m.records.empty()) {
      std::filesystem::create_directories(options.output_dir / "dumps");
      env::DumpHeader header{seed, hash,
                             std::string(env::EnvKindName(config.env.kind)),
                             nets.has_intentions() ? config.n_intentions : 0,
                             env->n_actions(), env->attack_action()};
      std::ostringstream name;
      name << "eval_" << std::setw(9) << std::setfill('0') << log.env_steps
           << ".jsonl";
      env::TrajectoryWriter writer(options.output_dir / "dumps" / name.str(),
                                   header);
      for (const auto& rec : m.records) {
        if (rec.episode < config.dump_episodes) writer.Write(rec);
      }
    }
    m.records.clear();
    if (final_point) log.final_eval = m;
    log.rows.push_back(row);
    loss_acc = {};
    loss_count = 0;
    run_total = 0;
    run_count = 0;
    if (options.progress != nullptr) {
      *options.progress << "[seed " << seed << "] steps " << log.env_steps
                        << " episodes " << log.episodes << " eps "
                        << row.epsilon << " return/agent "
                        << row.mean_return_per_agent << " success "
                        << row.success_rate << " loss " << row.loss.total
                        << "\n";
    }
  };

  while (log.env_steps < config.total_steps &&
         (config.total_episodes == 0 || log.episodes < config.total_episodes)) {
    if (log.env_steps >= next_eval) {
      evaluate_now(false);
      next_eval += config.eval_interval;
    }
    RolloutOptions ro;
    ro.epsilon = EpsilonAt(log.env_steps, schedule);
    ro.sampling = config.intention_sampling;
    ro.temperature = config.temperature;
    RolloutResult r = RunEpisode(
        nets, *env,
        DeriveSeed(env_config.seed, static_cast<std::uint64_t>(log.episodes)),
        ro, rollout_rng);
    log.env_steps += r.steps;
    ++log.episodes;
    ContinuityPoint cp;
    cp.env_steps = log.env_steps;
    for (int len : r.run_lengths) cp.run_total += len;
    cp.runs = static_cast<std::int64_t>(r.run_lengths.size());
    run_total += cp.run_total;
    run_count += cp.runs;
    log.continuity.push_back(cp);
    buffer.Add(std::move(r.episode));

    if (auto batch = SampleBatch(buffer, config.batch_size, sample_rng)) {
      mixer::LossBundle loss;
      try {
        loss = TrainStep(nets, *batch, config, optimizer);
      } catch (const NumericError&) {
        if (write) {
          WriteEpisodeDiagnostic(*batch,
                                 options.output_dir / "nan_episode.json");
        }
        throw;
      }
      log.losses.push_back({log.env_steps, log.episodes, loss});
      Accumulate(loss_acc, loss);
      ++loss_count;
    }
    SyncTargets(nets, log.episodes, config.target_sync);
    if (write && config.checkpoint_interval > 0 &&
        log.episodes % config.checkpoint_interval == 0) {
      std::filesystem::create_directories(options.output_dir / "checkpoints");
      nets.Save(options.output_dir / "checkpoints" /
                ("episode_" + std::to_string(log.episodes) + ".ckpt"));
    }
  }
  evaluate_now(true);

  if (write) {
    std::filesystem::create_directories(options.output_dir / "checkpoints");
    nets.Save(options.output_dir / "checkpoints" / "final.ckpt");
    WriteTrainingLog(log, config, options.output_dir);
  }
  return result;
}

void WriteTrainingLog(const TrainingLog& log,
                      const config::ExperimentConfig& config,
                      const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::string comment = "# " + RunComment(log.seed, log.config_hash);
  {
    std::ofstream out(dir / "train_log.csv");
    out << comment << "\n"
        << "episode,env_steps,epsilon,mean_return_per_agent,success_rate,"
           "td_low,td_high,l_I,l_A,l_D,total,mean_alpha,mean_mi,train_steps,"
           "train_run_length,observer_distance,agreement\n";
    out << std::setprecision(10);
    for (const auto& r : log.rows) {
      out << r.episode << "," << r.env_steps << "," << r.epsilon << ","
          << r.mean_return_per_agent << "," << r.success_rate << ","
          << r.loss.td_low << "," << r.loss.td_high << "," << r.loss.l_i
          << "," << r.loss.l_a << "," << r.loss.l_d << "," << r.loss.total
          << "," << r.loss.mean_alpha << "," << r.loss.mean_mi << ","
          << r.train_steps << "," << r.train_run_length << ","
          << r.observer_distance << "," << r.agreement << "\n";
    }
  }
  {
    std::ofstream out(dir / "losses.csv");
    out << comment << "\n"
        << "step,td_low,td_high,l_I,l_A,l_D,total,mean_alpha,mean_mi\n";
    out << std::setprecision(10);
    for (const auto& r : log.losses) {
      out << r.env_steps << "," << r.loss.td_low << "," << r.loss.td_high
          << "," << r.loss.l_i << "," << r.loss.l_a << "," << r.loss.l_d
          << "," << r.loss.total << "," << r.loss.mean_alpha << ","
          << r.loss.mean_mi << "\n";
    }
  }
  {
    std::ofstream out(dir / "continuity.csv");
    out << comment << "\n" << "env_steps,run_total,runs\n";
    for (const auto& p : log.continuity) {
      out << p.env_steps << "," << p.run_total << "," << p.runs << "\n";
    }
  }
  nlohmann::json summary;
  summary["seed"] = log.seed;
  summary["config_hash"] = log.config_hash;
  summary["mode"] = std::string(config::TrainModeName(config.mode));
  summary["beta"] = config.beta;
  summary["episodes"] = log.episodes;
  summary["env_steps"] = log.env_steps;
  summary["final_eval"] = {
      {"episodes", log.final_eval.episodes},
      {"mean_return_per_agent", log.final_eval.mean_return_per_agent},
      {"success_rate", log.final_eval.success_rate}};
  summary["continuity_first"] = log.ContinuityFirst();
  summary["continuity_final"] = log.ContinuityFinal();
  if (!log.rows.empty()) {
    summary["observer_distance_first"] = log.rows.front().observer_distance;
    summary["observer_distance_final"] = log.rows.back().observer_distance;
  }
  summary["config"] = config::CanonicalConfig(config);
  std::ofstream(dir / "summary.json") << summary.dump(2) << "\n";
}

}  // namespace jim::trainer
