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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace jim::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome Invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "jim");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  auto* old_out = std::cout.rdbuf(out.rdbuf());
  auto* old_err = std::cerr.rdbuf(err.rdbuf());
  Outcome o;
  o.code = Run(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

json LastJsonLine(const std::string& text) {
  std::istringstream in(text);
  std::string line, last;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '{') last = line;
  }
  return json::parse(last);
}

fs::path WriteTinyConfig(const fs::path& dir) {
  const fs::path path = dir / "tiny.cfg";
  std::ofstream(path) << R"([env]
preset = pursuit_small
episode_limit = 10
[method]
n_intentions = 4
hidden_dim = 8
mixer_embed = 6
[train]
total_steps = 60
anneal_steps = 40
buffer_size = 8
target_sync = 2
[eval]
interval = 30
episodes = 2
final_episodes = 2
dump_episodes = 1
)";
  return path;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override { unsetenv("JIM_OUTPUT_DIR"); }
  void TearDown() override { unsetenv("JIM_OUTPUT_DIR"); }
};

TEST_F(CliTest, UnknownKeyExitsTwoWithFieldJson) {
  const auto o = Invoke({"train", "--set", "train.nope=3", "--quiet"});
  EXPECT_EQ(o.code, 2);
  const json j = LastJsonLine(o.err);
  EXPECT_EQ(j["error"], "config");
  EXPECT_EQ(j["field"], "train.nope");
}

TEST_F(CliTest, InvalidValueInFileExitsTwo) {
  const auto dir = testing::TempDir("cli_bad");
  std::ofstream(dir / "bad.cfg") << "[train]\nlr = -3\n";
  const auto o =
      Invoke({"train", "--config", (dir / "bad.cfg").string(), "--quiet"});
  EXPECT_EQ(o.code, 2);
  EXPECT_EQ(LastJsonLine(o.err)["field"], "train.lr");
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(Invoke({"bogus"}).code, 2);
  EXPECT_EQ(Invoke({"evaluate"}).code, 2);
  EXPECT_EQ(Invoke({"--help"}).code, 0);
}

TEST_F(CliTest, RuntimeFailureExitsOneWithJson) {
  const auto o = Invoke({"evaluate", "--checkpoint", "/nonexistent.ckpt"});
  EXPECT_EQ(o.code, 1);
  const json j = LastJsonLine(o.err);
  EXPECT_TRUE(j.contains("error"));
  EXPECT_TRUE(j.contains("message"));
}

TEST_F(CliTest, TrainEvaluateAnalyzeHappyPath) {
  const auto dir = testing::TempDir("cli_train");
  const auto cfg = WriteTinyConfig(dir);
  const fs::path out = dir / "run";
  ASSERT_EQ(Invoke({"train", "--config", cfg.string(), "--seed", "7",
                    "--output", out.string(), "--quiet"})
                .code,
            0);
  const fs::path seed_dir = out / "seed_7";
  for (const char* f : {"train_log.csv", "losses.csv", "continuity.csv",
                        "summary.json", "config.ini",
                        "checkpoints/final.ckpt"}) {
    EXPECT_TRUE(fs::exists(seed_dir / f)) << f;
  }
  const std::string log = testing::ReadFile(seed_dir / "train_log.csv");
  EXPECT_EQ(log.rfind("# seed=7 config_hash=", 0), 0u);

  const fs::path ckpt = seed_dir / "checkpoints" / "final.ckpt";
  const auto eval = Invoke({"evaluate", "--config", cfg.string(),
                            "--checkpoint", ckpt.string(), "--episodes", "2",
                            "--output", (dir / "eval").string()});
  EXPECT_EQ(eval.code, 0) << eval.err;

  const fs::path stats = dir / "stats";
  const auto an = Invoke({"analyze", "--dumps", (seed_dir / "dumps").string(),
                          "--output", stats.string()});
  ASSERT_EQ(an.code, 0) << an.err;
  for (const char* f : {"selection.csv", "observer.csv", "continuity.csv",
                        "cooccurrence.csv"}) {
    EXPECT_TRUE(fs::exists(stats / f)) << f;
  }
}

TEST_F(CliTest, OutputDirFromEnvironment) {
  const auto dir = testing::TempDir("cli_env");
  const auto cfg = WriteTinyConfig(dir);
  const fs::path target = dir / "from_env";
  setenv("JIM_OUTPUT_DIR", target.string().c_str(), 1);
  ASSERT_EQ(
      Invoke({"train", "--config", cfg.string(), "--seed", "3", "--quiet"})
          .code,
      0);
  EXPECT_TRUE(fs::exists(target / "seed_3" / "summary.json"));
  const fs::path explicit_dir = dir / "explicit";
  ASSERT_EQ(Invoke({"train", "--config", cfg.string(), "--seed", "3",
                    "--output", explicit_dir.string(), "--quiet"})
                .code,
            0);
  EXPECT_TRUE(fs::exists(explicit_dir / "seed_3" / "summary.json"));
}

TEST_F(CliTest, PartitionBenchSucceeds) {
  const auto dir = testing::TempDir("cli_bench");
  const auto o = Invoke({"partition-bench", "--graphs", "50", "--brute-graphs",
                         "10", "--output", dir.string()});
  EXPECT_EQ(o.code, 0) << o.err;
  EXPECT_TRUE(fs::exists(dir / "partition_bench.json"));
}

}  // namespace
}  // namespace jim::cli
