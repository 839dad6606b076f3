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

#include "cli.h"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "jim/config/experiment_config.h"
#include "jim/env/trajectory.h"
#include "jim/errors.h"
#include "jim/eval/ablate.h"
#include "jim/eval/evaluate.h"
#include "jim/eval/intention_stats.h"
#include "jim/partition/partition.h"
#include "jim/trainer/gradcheck_suite.h"
#include "jim/trainer/network_bundle.h"
#include "jim/trainer/training.h"

namespace jim::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;  // "section.key=value"
  std::string output;
  bool quiet = false;
};

void AddCommon(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "Experiment config file");
  cmd->add_option("--set", opts.overrides,
                  "Override a config field, e.g. train.lr=1e-3");
  cmd->add_option("--output", opts.output, "Output directory");
  cmd->add_flag("--quiet", opts.quiet, "Suppress progress lines");
}

config::ExperimentConfig LoadConfig(const CommonOptions& opts) {
  config::ExperimentConfig cfg;
  if (!opts.config_path.empty()) {
    cfg = config::LoadExperimentConfig(opts.config_path);
  }
  for (const auto& item : opts.overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(item, "override must have the form section.key=value");
    }
    config::SetConfigField(cfg, item.substr(0, eq), item.substr(eq + 1));
  }
  // Precedence: --output, then JIM_OUTPUT_DIR, then the config file.
  if (!opts.output.empty()) {
    cfg.output_dir = opts.output;
  } else if (const char* env_dir = std::getenv("JIM_OUTPUT_DIR")) {
    if (*env_dir != '\0') cfg.output_dir = env_dir;
  }
  config::ValidateExperimentConfig(cfg);
  return cfg;
}

void WriteJson(const fs::path& path, const json& j) {
  fs::create_directories(path.parent_path());
  std::ofstream(path) << j.dump(2) << "\n";
}

json MetricsJson(const eval::EvalMetrics& m) {
  json per_seed = json::object();
  for (const auto& [seed, ret] : m.per_seed_return) {
    per_seed[std::to_string(seed)] = ret;
  }
  return {{"episodes", m.episodes},
          {"mean_return_per_agent", m.mean_return_per_agent},
          {"success_rate", m.success_rate},
          {"per_seed_return", per_seed}};
}

json Spread(const std::vector<double>& values) {
  if (values.empty()) return json::object();
  double sum = 0.0;
  for (double v : values) sum += v;
  return {{"mean", sum / static_cast<double>(values.size())},
          {"min", *std::min_element(values.begin(), values.end())},
          {"max", *std::max_element(values.begin(), values.end())}};
}

std::vector<std::uint64_t> ResolveSeeds(const config::ExperimentConfig& cfg,
                                        const std::vector<std::uint64_t>& one,
                                        const std::vector<std::uint64_t>& many) {
  if (!one.empty()) return one;
  if (!many.empty()) return many;
  return cfg.seeds;
}

// Runs fn(seed) for every seed with at most jobs concurrent runs.
template <typename Fn>
void ForEachSeed(const std::vector<std::uint64_t>& seeds, int jobs, Fn fn) {
  jobs = std::max(1, jobs);
  std::vector<std::future<void>> running;
  for (std::uint64_t seed : seeds) {
    if (static_cast<int>(running.size()) >= jobs) {
      running.front().get();
      running.erase(running.begin());
    }
    running.push_back(std::async(std::launch::async, fn, seed));
  }
  for (auto& f : running) f.get();
}

// Progress sink that serializes whole lines across concurrent runs.
class LockedStream : public std::stringbuf {
 public:
  explicit LockedStream(std::mutex& mu) : mu_(mu) {}
  int sync() override {
    std::lock_guard<std::mutex> lock(mu_);
    std::cout << str() << std::flush;
    str("");
    return 0;
  }

 private:
  std::mutex& mu_;
};

int TrainSeeds(const config::ExperimentConfig& cfg,
               const std::vector<std::uint64_t>& seeds, int jobs, bool quiet,
               const fs::path& root) {
  std::mutex mu;
  std::vector<std::pair<std::uint64_t, trainer::TrainingLog>> logs;
  ForEachSeed(seeds, jobs, [&](std::uint64_t seed) {
    LockedStream buf(mu);
    std::ostream progress(&buf);
    trainer::RunOptions ro;
    ro.output_dir = root / ("seed_" + std::to_string(seed));
    ro.progress = quiet ? nullptr : &progress;
    trainer::TrainingResult r = trainer::RunTraining(cfg, seed, ro);
    progress.flush();
    std::lock_guard<std::mutex> lock(mu);
    logs.emplace_back(seed, std::move(r.log));
  });
  std::sort(logs.begin(), logs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<double> returns, success, cont_first, cont_final;
  json runs = json::array();
  for (const auto& [seed, log] : logs) {
    returns.push_back(log.final_eval.mean_return_per_agent);
    success.push_back(log.final_eval.success_rate);
    cont_first.push_back(log.ContinuityFirst());
    cont_final.push_back(log.ContinuityFinal());
    runs.push_back({{"seed", seed},
                    {"mean_return_per_agent",
                     log.final_eval.mean_return_per_agent},
                    {"success_rate", log.final_eval.success_rate},
                    {"env_steps", log.env_steps},
                    {"episodes", log.episodes}});
  }
  json agg = {{"config_hash", config::ConfigHashHex(cfg)},
              {"mode", std::string(config::TrainModeName(cfg.mode))},
              {"seeds", seeds},
              {"runs", runs},
              {"mean_return_per_agent", Spread(returns)},
              {"success_rate", Spread(success)},
              {"continuity_first", Spread(cont_first)},
              {"continuity_final", Spread(cont_final)}};
  WriteJson(root / "aggregate.json", agg);
  std::cout << agg.dump(2) << "\n";
  return 0;
}

std::vector<fs::path> FindDumps(const fs::path& root) {
  std::vector<fs::path> files;
  if (fs::is_regular_file(root)) return {root};
  if (!fs::is_directory(root)) {
    throw Error("dump path " + root.string() + " does not exist");
  }
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

int Analyze(const std::string& dumps, const std::string& output) {
  const auto files = FindDumps(dumps);
  if (files.empty()) throw Error("no .jsonl dumps under " + dumps);
  std::vector<env::TrajectoryRecord> records;
  env::DumpHeader first;
  std::string comment;
  for (std::size_t k = 0; k < files.size(); ++k) {
    env::DumpHeader header;
    auto recs = env::ReadTrajectoryDump(files[k], &header);
    if (k == 0) {
      first = header;
    } else if (header.n_intentions != first.n_intentions ||
               header.attack_action != first.attack_action) {
      throw FormatError("dump " + files[k].string() +
                        " has a different intention space or action set");
    }
    if (comment.find("config_hash=" + header.config_hash) ==
            std::string::npos ||
        comment.find("seed=" + std::to_string(header.seed) + " ") ==
            std::string::npos) {
      comment += trainer::RunComment(header.seed, header.config_hash) + " ";
    }
    // Episode ids restart per file; offset them to keep runs separate.
    const int offset = records.empty() ? 0 : records.back().episode + 1;
    for (auto& r : recs) {
      r.episode += offset;
      records.push_back(std::move(r));
    }
  }
  if (first.n_intentions <= 0) {
    throw FormatError("dumps carry no intention records");
  }
  const eval::IntentionReport report = eval::IntentionStats(
      records, first.n_intentions, first.attack_action);
  const fs::path out =
      output.empty() ? fs::path(dumps) / "analysis" : fs::path(output);
  if (!comment.empty()) comment.pop_back();
  eval::WriteIntentionReport(report, out, comment);
  json j = {{"records", records.size()},
            {"files", files.size()},
            {"mean_run_length", report.MeanRunLength()},
            {"agreement", report.agreement},
            {"observer_distance", report.ObserverDistance()},
            {"output", out.string()}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int Gradcheck(std::uint64_t seed, double tol, const std::string& output) {
  const numeric::GradCheckReport report = trainer::RunGradcheckSuite(seed, tol);
  json blocks = json::array();
  for (const auto& b : report.blocks) {
    std::cout << (b.max_rel_error <= tol ? "ok   " : "FAIL ") << b.name
              << " max_rel_error=" << b.max_rel_error << "\n";
    blocks.push_back({{"name", b.name},
                      {"max_rel_error", b.max_rel_error},
                      {"worst_index", b.worst_index},
                      {"analytic", b.analytic},
                      {"numerical", b.numerical},
                      {"one_sided", b.one_sided}});
  }
  json j = {{"tolerance", tol},
            {"passed", report.passed},
            {"max_rel_error", report.max_rel_error()},
            {"blocks", blocks}};
  if (!output.empty()) WriteJson(fs::path(output) / "gradcheck.json", j);
  std::cout << (report.passed ? "gradcheck passed" : "gradcheck FAILED")
            << " (" << report.blocks.size() << " blocks, max rel error "
            << report.max_rel_error() << ")\n";
  return report.passed ? 0 : 1;
}

int PartitionBench(const partition::PartitionBenchOptions& opts,
                   const std::string& output) {
  const partition::PartitionBenchReport r = partition::RunPartitionBench(opts);
  json j = {{"graphs", r.graphs},
            {"cover_failures", r.cover_failures},
            {"determinism_failures", r.determinism_failures},
            {"brute_graphs", r.brute_graphs},
            {"brute_worse", r.brute_worse},
            {"mean_greedy_gap", r.mean_greedy_gap},
            {"mean_optimal_gap", r.mean_optimal_gap},
            {"mean_gap_ratio", r.mean_gap_ratio},
            {"ratio_graphs", r.ratio_graphs},
            {"passed", r.passed()}};
  if (!output.empty()) WriteJson(fs::path(output) / "partition_bench.json", j);
  std::cout << j.dump(2) << "\n";
  return r.passed() ? 0 : 1;
}

void PrintError(const std::string& kind, const std::string& message,
                const std::string& field = "") {
  json j = {{"error", kind}, {"message", message}};
  if (!field.empty()) j["field"] = field;
  std::cerr << j.dump() << "\n";
}

}  // namespace

int Run(int argc, char** argv) {
  CLI::App app{"jim: team intentions for cooperative multi-agent learning"};
  app.require_subcommand(1);

  CommonOptions common;
  std::vector<std::uint64_t> seed_one;
  std::vector<std::uint64_t> seed_list;
  int jobs = 1;
  std::string checkpoint;
  int episodes = 0;
  int delta = -1;
  std::string ablation_mode;
  std::string dumps;
  double tol = 1e-4;
  std::uint64_t gc_seed = 0;
  partition::PartitionBenchOptions bench;

  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed_one, "Single run seed")->expected(1);
  };

  CLI::App* train = app.add_subcommand("train", "Train one run per seed");
  AddCommon(train, common);
  add_seed(train);
  train->add_option("--seeds", seed_list, "Seed list")->delimiter(',');
  train->add_option("--jobs", jobs, "Concurrent runs")->check(CLI::PositiveNumber);

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Greedy evaluation of a checkpoint");
  AddCommon(evaluate, common);
  add_seed(evaluate);
  evaluate->add_option("--checkpoint", checkpoint)->required();
  evaluate->add_option("--episodes", episodes);

  CLI::App* adhoc = app.add_subcommand(
      "adhoc", "Evaluation with agent counts drawn from n +/- delta");
  AddCommon(adhoc, common);
  add_seed(adhoc);
  adhoc->add_option("--checkpoint", checkpoint)->required();
  adhoc->add_option("--episodes", episodes);
  adhoc->add_option("--delta", delta);

  CLI::App* ablate = app.add_subcommand("ablate", "Run an ablation");
  AddCommon(ablate, common);
  add_seed(ablate);
  ablate->add_option("--seeds", seed_list, "Seed list")->delimiter(',');
  ablate->add_option("--jobs", jobs)->check(CLI::PositiveNumber);
  ablate->add_option("--mode", ablation_mode, "zero_intention | no_weighting")
      ->required();
  ablate->add_option("--checkpoint", checkpoint);
  ablate->add_option("--episodes", episodes);

  CLI::App* analyze =
      app.add_subcommand("analyze", "Intention statistics from trajectory dumps");
  analyze->add_option("--dumps", dumps, "Dump file or directory")->required();
  analyze->add_option("--output", common.output);

  CLI::App* gradcheck =
      app.add_subcommand("gradcheck", "Finite-difference check of all modules");
  gradcheck->add_option("--seed", gc_seed);
  gradcheck->add_option("--tol", tol);
  gradcheck->add_option("--output", common.output);

  CLI::App* pbench = app.add_subcommand(
      "partition-bench", "Greedy partition checks against exhaustive search");
  pbench->add_option("--graphs", bench.graphs);
  pbench->add_option("--brute-graphs", bench.brute_graphs);
  pbench->add_option("--max-agents", bench.max_agents);
  pbench->add_option("--eps-gap", bench.eps_gap);
  pbench->add_option("--seed", bench.seed);
  pbench->add_option("--output", common.output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*analyze) return Analyze(dumps, common.output);
    if (*gradcheck) return Gradcheck(gc_seed, tol, common.output);
    if (*pbench) return PartitionBench(bench, common.output);

    const config::ExperimentConfig cfg = LoadConfig(common);
    const fs::path root = cfg.output_dir;
    const auto seeds = ResolveSeeds(cfg, seed_one, seed_list);

    if (*train) return TrainSeeds(cfg, seeds, jobs, common.quiet, root);

    if (*evaluate || *adhoc) {
      const trainer::NetworkBundle nets = trainer::NetworkBundle::Load(checkpoint);
      eval::EvalOptions eo;
      eo.episodes = episodes > 0 ? episodes : cfg.final_eval_episodes;
      eo.seed = seeds.front();
      json j = {{"seed", eo.seed},
                {"config_hash", config::ConfigHashHex(cfg)},
                {"checkpoint", checkpoint}};
      const eval::EvalMetrics fixed = eval::Evaluate(nets, cfg, eo);
      j["fixed"] = MetricsJson(fixed);
      std::string name = "evaluate.json";
      if (*adhoc) {
        const int d = delta >= 0 ? delta : cfg.adhoc_delta;
        Rng count_rng(DeriveSeed(eo.seed, 0xad40c));
        const eval::EvalMetrics varied =
            eval::AdhocEvaluate(nets, cfg, d, count_rng, eo);
        j["delta"] = d;
        j["adhoc"] = MetricsJson(varied);
        j["agent_counts"] = varied.agent_counts;
        if (fixed.mean_return_per_agent > 0.0) {
          j["retained"] =
              varied.mean_return_per_agent / fixed.mean_return_per_agent;
        }
        name = "adhoc.json";
      }
      WriteJson(root / name, j);
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (*ablate) {
      const auto mode = eval::ParseAblationMode(ablation_mode);
      if (!mode) {
        throw ConfigError("--mode", "unknown ablation '" + ablation_mode + "'");
      }
      if (*mode == eval::AblationMode::kZeroIntention) {
        if (checkpoint.empty()) {
          throw ConfigError("--checkpoint",
                            "zero_intention needs a trained checkpoint");
        }
        const trainer::NetworkBundle nets =
            trainer::NetworkBundle::Load(checkpoint);
        eval::EvalOptions eo;
        eo.episodes = episodes > 0 ? episodes : cfg.final_eval_episodes;
        eo.seed = seeds.front();
        const auto r = eval::AblateZeroIntention(nets, cfg, eo);
        json j = {{"seed", eo.seed},
                  {"config_hash", config::ConfigHashHex(cfg)},
                  {"full", MetricsJson(r.full)},
                  {"zero_intention", MetricsJson(r.zero)}};
        if (r.retained) j["retained"] = *r.retained;
        WriteJson(root / "ablation_zero_intention.json", j);
        std::cout << j.dump(2) << "\n";
        return 0;
      }
      config::ExperimentConfig nw = cfg;
      nw.mode = config::TrainMode::kNoWeighting;
      return TrainSeeds(nw, seeds, jobs, common.quiet, root / "no_weighting");
    }
  } catch (const ConfigError& e) {
    PrintError("config", e.what(), e.field());
    return 2;
  } catch (const Error& e) {
    PrintError(e.kind(), e.what());
    return 1;
  } catch (const std::exception& e) {
    PrintError("runtime", e.what());
    return 1;
  }
  return 0;
}

}  // namespace jim::cli
