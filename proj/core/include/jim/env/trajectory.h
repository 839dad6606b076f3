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

#ifndef JIM_ENV_TRAJECTORY_H_
#define JIM_ENV_TRAJECTORY_H_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "jim/env/environment.h"

namespace jim::env {

struct TeamRecord {
  int commander = 0;
  std::vector<int> members;
  int z = -1;  // -1 when the run has no intention level
  bool operator==(const TeamRecord&) const = default;
};

// One environment step as written to a trajectory dump.
struct TrajectoryRecord {
  int episode = 0;
  int step = 0;
  std::vector<Position> agents;
  std::vector<Position> prey;
  std::vector<int> actions;
  double reward = 0.0;
  std::vector<TeamRecord> teams;
  // Greedy intention each agent would pick from its own observation.
  std::vector<int> observer_z;
  bool operator==(const TrajectoryRecord&) const = default;
};

struct DumpHeader {
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string env_kind;
  int n_intentions = 0;
  int n_actions = 0;
  int attack_action = -1;
  bool operator==(const DumpHeader&) const = default;
};

// Line-delimited JSON: a {"meta": ...} header line followed by one record
// per line.
class TrajectoryWriter {
 public:
  TrajectoryWriter(const std::filesystem::path& path, const DumpHeader& header);
  void Write(const TrajectoryRecord& record);

 private:
  std::ofstream out_;
};

std::string RecordToJsonLine(const TrajectoryRecord& record);
TrajectoryRecord RecordFromJsonLine(const std::string& line);

// Throws FormatError on malformed lines or records without team data.
std::vector<TrajectoryRecord> ReadTrajectoryDump(
    const std::filesystem::path& path, DumpHeader* header = nullptr);

}  // namespace jim::env

#endif  // JIM_ENV_TRAJECTORY_H_
