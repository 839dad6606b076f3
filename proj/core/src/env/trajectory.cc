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

#include "jim/env/trajectory.h"

#include <json.hpp>

#include "jim/errors.h"

namespace jim::env {
namespace {

using nlohmann::json;

json Positions(const std::vector<Position>& ps) {
  json arr = json::array();
  for (const Position& p : ps) arr.push_back({p.x, p.y});
  return arr;
}

std::vector<Position> ParsePositions(const json& arr) {
  std::vector<Position> out;
  for (const auto& p : arr) out.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
  return out;
}

}  // namespace

TrajectoryWriter::TrajectoryWriter(const std::filesystem::path& path,
                                   const DumpHeader& header)
    : out_(path, std::ios::trunc) {
  if (!out_) throw FormatError("cannot open " + path.string());
  json meta = {{"seed", header.seed},
               {"config_hash", header.config_hash},
               {"env_kind", header.env_kind},
               {"n_intentions", header.n_intentions},
               {"n_actions", header.n_actions},
               {"attack_action", header.attack_action}};
  out_ << json{{"meta", meta}}.dump() << '\n';
}

void TrajectoryWriter::Write(const TrajectoryRecord& record) {
  out_ << RecordToJsonLine(record) << '\n';
}

std::string RecordToJsonLine(const TrajectoryRecord& r) {
  json teams = json::array();
  for (const TeamRecord& t : r.teams) {
    teams.push_back({{"commander", t.commander}, {"members", t.members}, {"z", t.z}});
  }
  json j = {{"episode", r.episode},   {"step", r.step},
            {"agents", Positions(r.agents)}, {"prey", Positions(r.prey)},
            {"actions", r.actions},   {"reward", r.reward},
            {"teams", teams},         {"observer_z", r.observer_z}};
  return j.dump();
}

TrajectoryRecord RecordFromJsonLine(const std::string& line) {
  try {
    const json j = json::parse(line);
    if (!j.contains("teams")) throw FormatError("record has no partition (teams)");
    TrajectoryRecord r;
    r.episode = j.at("episode").get<int>();
    r.step = j.at("step").get<int>();
    r.agents = ParsePositions(j.at("agents"));
    r.prey = ParsePositions(j.at("prey"));
    r.actions = j.at("actions").get<std::vector<int>>();
    r.reward = j.at("reward").get<double>();
    for (const auto& t : j.at("teams")) {
      r.teams.push_back({t.at("commander").get<int>(),
                         t.at("members").get<std::vector<int>>(),
                         t.at("z").get<int>()});
    }
    r.observer_z = j.value("observer_z", std::vector<int>{});
    return r;
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad trajectory record: ") + e.what());
  }
}

std::vector<TrajectoryRecord> ReadTrajectoryDump(
    const std::filesystem::path& path, DumpHeader* header) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<TrajectoryRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("{\"meta\"", 0) == 0) {
      if (header != nullptr) {
        try {
          const json m = json::parse(line).at("meta");
          header->seed = m.at("seed").get<std::uint64_t>();
          header->config_hash = m.at("config_hash").get<std::string>();
          header->env_kind = m.at("env_kind").get<std::string>();
          header->n_intentions = m.at("n_intentions").get<int>();
          header->n_actions = m.at("n_actions").get<int>();
          header->attack_action = m.at("attack_action").get<int>();
        } catch (const json::exception& e) {
          throw FormatError(std::string("bad dump header: ") + e.what());
        }
      }
      continue;
    }
    out.push_back(RecordFromJsonLine(line));
  }
  return out;
}

}  // namespace jim::env
