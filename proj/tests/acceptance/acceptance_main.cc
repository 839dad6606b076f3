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

// Acceptance runner. Prints one PASS/FAIL line per criterion and exits
// nonzero when any selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jim/config/experiment_config.h"
#include "jim/eval/ablate.h"
#include "jim/eval/evaluate.h"
#include "jim/numeric/ops.h"
#include "jim/partition/partition.h"
#include "jim/rng.h"
#include "jim/trainer/gradcheck_suite.h"
#include "jim/trainer/loss_checks.h"
#include "jim/trainer/training.h"

namespace jim::acceptance {
namespace {

namespace fs = std::filesystem;
using config::ExperimentConfig;
using config::TrainMode;
using trainer::TrainingResult;

// Tolerances and budgets.
constexpr double kMatrixOptimalReturn = 5.5;  // payoff 11 shared by 2 agents
constexpr double kMatrixSafeReturn = 2.5;     // payoff 5 shared by 2 agents
constexpr double kReturnTol = 1e-9;
constexpr int kMatrixFullMinSeeds = 4;
constexpr double kMatrixBudgetSec = 600.0;
constexpr double kPursuitRatio = 2.0;
constexpr double kPursuitBudgetSec = 45.0 * 60.0;
constexpr double kZeroIntentionMaxRetained = 0.60;
constexpr double kAblationBudgetSec = 300.0;
constexpr int kAblationEpisodes = 100;
constexpr int kNoWeightingMinSeeds = 3;
constexpr double kAdhocMinRetained = 0.70;
constexpr int kAdhocDelta = 2;
constexpr double kPartitionBudgetSec = 120.0;
constexpr double kGradIdentityTol = 1e-6;
constexpr double kMiExcessTol = 1e-3;
constexpr double kMiGapTol = 0.05;
constexpr double kMiBudgetSec = 60.0;
constexpr double kGradcheckTol = 1e-4;
constexpr int kPropertyTrials = 10000;
constexpr double kSoftmaxSumTol = 1e-12;
constexpr double kContinuityRatio = 1.5;

using Clock = std::chrono::steady_clock;

double Since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int Majority(std::size_t n) { return static_cast<int>(n / 2 + 1); }

std::string Fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(4) << v;
  return s.str();
}

class Reporter {
 public:
  void Line(int id, bool pass, const std::string& detail) {
    std::cout << "criterion " << id << ": " << (pass ? "PASS" : "FAIL")
              << " | " << detail << std::endl;
    all_pass_ = all_pass_ && pass;
  }
  bool all_pass() const { return all_pass_; }

 private:
  bool all_pass_ = true;
};

struct SeedRuns {
  std::vector<std::uint64_t> seeds;
  std::vector<TrainingResult> runs;
  double seconds = 0.0;
};

SeedRuns TrainAll(ExperimentConfig cfg, TrainMode mode, const fs::path& dir) {
  cfg.mode = mode;
  SeedRuns out;
  out.seeds = cfg.seeds;
  const auto start = Clock::now();
  for (std::uint64_t seed : cfg.seeds) {
    trainer::RunOptions ro;
    ro.output_dir = dir / std::string(config::TrainModeName(mode)) /
                    ("seed_" + std::to_string(seed));
    out.runs.push_back(trainer::RunTraining(cfg, seed, ro));
    std::cerr << "  trained " << config::TrainModeName(mode) << " seed "
              << seed << " final return/agent "
              << out.runs.back().log.final_eval.mean_return_per_agent
              << " (" << Fmt(Since(start)) << " s)\n";
  }
  out.seconds = Since(start);
  return out;
}

double FinalReturn(const TrainingResult& r) {
  return r.log.final_eval.mean_return_per_agent;
}

std::string ListReturns(const SeedRuns& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.runs.size(); ++i) {
    out += (i ? " " : "") + Fmt(FinalReturn(s.runs[i]));
  }
  return out + "]";
}

void MatrixCriterion(const fs::path& config_dir, const fs::path& out,
                     Reporter& rep) {
  const ExperimentConfig cfg = config::LoadExperimentConfig(
      (config_dir / "matrix_penalty.cfg").string());
  const auto start = Clock::now();
  const SeedRuns flat = TrainAll(cfg, TrainMode::kFlatQmix, out / "matrix");
  const SeedRuns full = TrainAll(cfg, TrainMode::kFullMethod, out / "matrix");
  const double secs = Since(start);
  int flat_safe = 0;
  int flat_optimal = 0;
  int full_optimal = 0;
  for (const auto& r : flat.runs) {
    flat_safe += std::abs(FinalReturn(r) - kMatrixSafeReturn) < kReturnTol;
    flat_optimal += std::abs(FinalReturn(r) - kMatrixOptimalReturn) < kReturnTol;
  }
  for (const auto& r : full.runs) {
    full_optimal += std::abs(FinalReturn(r) - kMatrixOptimalReturn) < kReturnTol;
  }
  const bool pass = flat_safe >= Majority(flat.runs.size()) &&
                    flat_optimal == 0 && full_optimal >= kMatrixFullMinSeeds &&
                    secs <= kMatrixBudgetSec;
  rep.Line(1, pass,
           "flat returns/agent " + ListReturns(flat) + " (safe cell " +
               std::to_string(flat_safe) + "/" +
               std::to_string(flat.runs.size()) + ", optimal " +
               std::to_string(flat_optimal) + "); full " + ListReturns(full) +
               " (optimal " + std::to_string(full_optimal) + "/" +
               std::to_string(full.runs.size()) + ", need " +
               std::to_string(kMatrixFullMinSeeds) + "); " + Fmt(secs) +
               " s of " + Fmt(kMatrixBudgetSec));
}

struct PursuitRuns {
  ExperimentConfig cfg;
  SeedRuns full, flat, no_weighting;
  double train_seconds = 0.0;
};

void PursuitCriterion(const PursuitRuns& p, Reporter& rep) {
  int wins = 0;
  for (std::size_t i = 0; i < p.full.runs.size(); ++i) {
    const double full = FinalReturn(p.full.runs[i]);
    wins += full > 0.0 && full >= kPursuitRatio * FinalReturn(p.flat.runs[i]);
  }
  const bool pass = wins >= Majority(p.full.runs.size()) &&
                    p.train_seconds <= kPursuitBudgetSec;
  rep.Line(2, pass,
           "full " + ListReturns(p.full) + " vs flat " + ListReturns(p.flat) +
               "; seeds with full > 0 and >= " + Fmt(kPursuitRatio) +
               "x flat: " +
               std::to_string(wins) + "/" + std::to_string(p.full.runs.size()) +
               "; " + Fmt(p.train_seconds) + " s of " +
               Fmt(kPursuitBudgetSec));
}

void ZeroIntentionCriterion(const PursuitRuns& p, Reporter& rep) {
  int ok = 0;
  double worst_secs = 0.0;
  std::string detail = "retained [";
  for (std::size_t i = 0; i < p.full.runs.size(); ++i) {
    eval::EvalOptions eo;
    eo.episodes = kAblationEpisodes;
    eo.seed = 7000 + p.full.seeds[i];
    const auto start = Clock::now();
    const auto res = eval::AblateZeroIntention(p.full.runs[i].nets, p.cfg, eo);
    worst_secs = std::max(worst_secs, Since(start));
    if (res.retained) {
      ok += *res.retained <= kZeroIntentionMaxRetained;
      detail += (i ? " " : "") + Fmt(*res.retained);
    } else {
      detail += (i ? " " : "") + std::string("n/a");
    }
  }
  const bool pass = ok >= Majority(p.full.runs.size()) &&
                    worst_secs <= kAblationBudgetSec;
  rep.Line(3, pass,
           detail + "]; seeds <= " + Fmt(kZeroIntentionMaxRetained) + ": " +
               std::to_string(ok) + "/" + std::to_string(p.full.runs.size()) +
               "; slowest ablation " + Fmt(worst_secs) + " s");
}

void NoWeightingCriterion(const PursuitRuns& p, Reporter& rep) {
  int worse = 0;
  for (std::size_t i = 0; i < p.full.runs.size(); ++i) {
    worse += FinalReturn(p.no_weighting.runs[i]) < FinalReturn(p.full.runs[i]);
  }
  rep.Line(4, worse >= kNoWeightingMinSeeds,
           "no_weighting " + ListReturns(p.no_weighting) + " vs full " +
               ListReturns(p.full) + "; seeds below full: " +
               std::to_string(worse) + "/" +
               std::to_string(p.full.runs.size()));
}

double AdhocRetention(const trainer::NetworkBundle& nets,
                      const ExperimentConfig& cfg, std::uint64_t seed) {
  eval::EvalOptions eo;
  eo.episodes = kAblationEpisodes;
  eo.seed = 9000 + seed;
  const double fixed = eval::Evaluate(nets, cfg, eo).mean_return_per_agent;
  Rng count_rng(seed);
  const double adhoc =
      eval::AdhocEvaluate(nets, cfg, kAdhocDelta, count_rng, eo)
          .mean_return_per_agent;
  return fixed > 0.0 ? adhoc / fixed : 0.0;
}

void AdhocCriterion(const PursuitRuns& p, Reporter& rep) {
  int ok = 0;
  std::string full_s = "[", flat_s = "[";
  for (std::size_t i = 0; i < p.full.runs.size(); ++i) {
    const double full = AdhocRetention(p.full.runs[i].nets, p.cfg,
                                       p.full.seeds[i]);
    ExperimentConfig flat_cfg = p.cfg;
    flat_cfg.mode = TrainMode::kFlatQmix;
    const double flat = AdhocRetention(p.flat.runs[i].nets, flat_cfg,
                                       p.flat.seeds[i]);
    ok += full >= kAdhocMinRetained && flat < full;
    full_s += (i ? " " : "") + Fmt(full);
    flat_s += (i ? " " : "") + Fmt(flat);
  }
  rep.Line(5, ok >= Majority(p.full.runs.size()),
           "retention full " + full_s + "] flat " + flat_s +
               "]; seeds with full >= " + Fmt(kAdhocMinRetained) +
               " and flat lower: " + std::to_string(ok) + "/" +
               std::to_string(p.full.runs.size()));
}

void PartitionCriterion(Reporter& rep) {
  const auto start = Clock::now();
  const auto r = partition::RunPartitionBench({});
  const double secs = Since(start);
  rep.Line(6, r.passed() && secs <= kPartitionBudgetSec,
           std::to_string(r.graphs) + " graphs: cover failures " +
               std::to_string(r.cover_failures) + ", determinism failures " +
               std::to_string(r.determinism_failures) + "; " +
               std::to_string(r.brute_graphs) +
               " exhaustive graphs: exhaustive worse " +
               std::to_string(r.brute_worse) + ", mean greedy/optimal gap " +
               Fmt(r.mean_gap_ratio) + " over " +
               std::to_string(r.ratio_graphs) + "; " + Fmt(secs) + " s");
}

void GradientIdentityCriterion(Reporter& rep) {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    worst = std::max(worst, trainer::HighLevelGradientIdentity(seed).max_abs_diff);
  }
  rep.Line(7, worst <= kGradIdentityTol,
           "max |autodiff - identity| " + Fmt(worst) + " over 5 toys (tol " +
               Fmt(kGradIdentityTol) + ")");
}

void MiCriterion(Reporter& rep) {
  const auto start = Clock::now();
  const auto r = trainer::RunMiChannel({});
  const double secs = Since(start);
  rep.Line(8,
           r.max_excess <= kMiExcessTol && r.final_gap <= kMiGapTol &&
               secs <= kMiBudgetSec,
           "true MI " + Fmt(r.true_mi) + " nats, final estimate " +
               Fmt(r.final_estimate) + ", max excess " + Fmt(r.max_excess) +
               ", final gap " + Fmt(r.final_gap) + "; " + Fmt(secs) + " s");
}

void NumericsCriterion(Reporter& rep) {
  const auto gc = trainer::RunGradcheckSuite(0, kGradcheckTol);
  double worst_rel = 0.0;
  for (const auto& b : gc.blocks) worst_rel = std::max(worst_rel, b.max_rel_error);

  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> size(1, 32);
  std::uniform_real_distribution<double> scale(0.0, 60.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  int kl_violations = 0;
  int softmax_violations = 0;
  for (int trial = 0; trial < kPropertyTrials; ++trial) {
    const int n = size(rng);
    const double s = scale(rng);
    std::vector<double> a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a[i] = s * normal(rng);
      b[i] = s * normal(rng);
    }
    const auto p = numeric::Softmax(a);
    const auto q = numeric::Softmax(b);
    double sum = 0.0;
    bool ok = p.size() == a.size();
    for (double v : p) {
      ok = ok && std::isfinite(v) && v >= 0.0 && v <= 1.0;
      sum += v;
    }
    softmax_violations += !(ok && std::abs(sum - 1.0) <= kSoftmaxSumTol);
    const double kl = numeric::CategoricalKl(p, q);
    kl_violations += !(std::isfinite(kl) && kl >= 0.0);
  }
  rep.Line(9, gc.passed && kl_violations == 0 && softmax_violations == 0,
           "gradcheck " + std::string(gc.passed ? "passed" : "failed") +
               " over " + std::to_string(gc.blocks.size()) +
               " blocks (worst rel " + Fmt(worst_rel) + "); KL violations " +
               std::to_string(kl_violations) + ", softmax violations " +
               std::to_string(softmax_violations) + " over " +
               std::to_string(kPropertyTrials));
}

void EmergenceCriterion(const PursuitRuns& p, Reporter& rep) {
  int ok = 0;
  std::string detail = "continuity first/final, observer distance first/final: ";
  for (std::size_t i = 0; i < p.full.runs.size(); ++i) {
    const auto& log = p.full.runs[i].log;
    const double first = log.ContinuityFirst();
    const double final = log.ContinuityFinal();
    const double d0 = log.rows.front().observer_distance;
    const double d1 = log.rows.back().observer_distance;
    ok += final >= kContinuityRatio * first && d1 < d0;
    detail += (i ? "; " : "") + Fmt(first) + "/" + Fmt(final) + ", " +
              Fmt(d0) + "/" + Fmt(d1);
  }
  rep.Line(10, ok >= Majority(p.full.runs.size()),
           detail + "; seeds meeting both: " + std::to_string(ok) + "/" +
               std::to_string(p.full.runs.size()));
}

}  // namespace
}  // namespace jim::acceptance

int main(int argc, char** argv) {
  using namespace jim::acceptance;
  CLI::App app{"Acceptance criteria"};
  std::string config_dir = JIM_CONFIG_DIR;
  std::string output = "acceptance_runs";
  std::vector<int> only;
  app.add_option("--config-dir", config_dir, "Directory holding run configs");
  app.add_option("--output", output, "Directory for run artifacts");
  app.add_option("--criteria", only, "Subset of criteria to run")
      ->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  std::set<int> selected(only.begin(), only.end());
  if (selected.empty()) {
    for (int i = 1; i <= 10; ++i) selected.insert(i);
  }
  auto want = [&](int id) { return selected.count(id) > 0; };

  Reporter rep;
  try {
    if (want(6)) PartitionCriterion(rep);
    if (want(7)) GradientIdentityCriterion(rep);
    if (want(8)) MiCriterion(rep);
    if (want(9)) NumericsCriterion(rep);
    if (want(1)) MatrixCriterion(config_dir, output, rep);
    const bool pursuit = want(2) || want(3) || want(4) || want(5) || want(10);
    if (pursuit) {
      PursuitRuns p;
      p.cfg = jim::config::LoadExperimentConfig(
          (fs::path(config_dir) / "pursuit_small.cfg").string());
      const fs::path dir = fs::path(output) / "pursuit_small";
      if (want(2) || want(3) || want(4) || want(5) || want(10)) {
        p.full = TrainAll(p.cfg, TrainMode::kFullMethod, dir);
      }
      if (want(2) || want(5)) {
        p.flat = TrainAll(p.cfg, TrainMode::kFlatQmix, dir);
      }
      p.train_seconds = p.full.seconds + p.flat.seconds;
      if (want(4)) p.no_weighting = TrainAll(p.cfg, TrainMode::kNoWeighting, dir);
      if (want(2)) PursuitCriterion(p, rep);
      if (want(3)) ZeroIntentionCriterion(p, rep);
      if (want(4)) NoWeightingCriterion(p, rep);
      if (want(5)) AdhocCriterion(p, rep);
      if (want(10)) EmergenceCriterion(p, rep);
    }
  } catch (const std::exception& e) {
    std::cout << "acceptance aborted: " << e.what() << std::endl;
    return 1;
  }
  std::cout << (rep.all_pass() ? "acceptance: all selected criteria passed"
                               : "acceptance: some criteria failed")
            << std::endl;
  return rep.all_pass() ? 0 : 1;
}
