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

#include "jim/eval/intention_stats.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "jim/errors.h"

namespace jim::eval {
namespace {

double Normalize(std::int64_t v, std::int64_t denom) {
  return denom > 0 ? static_cast<double>(v) / static_cast<double>(denom) : 0.0;
}

std::ofstream OpenCsv(const std::filesystem::path& path,
                      const std::string& comment) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "# " << comment << "\n";
  return out;
}

void WriteCounts(const std::filesystem::path& path, const std::string& comment,
                 const std::vector<std::int64_t>& counts) {
  std::ofstream out = OpenCsv(path, comment);
  std::int64_t max = 0;
  std::int64_t total = 0;
  for (auto c : counts) {
    max = std::max(max, c);
    total += c;
  }
  out << "z,count,max_normalized,share\n";
  for (std::size_t z = 0; z < counts.size(); ++z) {
    out << z << "," << counts[z] << "," << Normalize(counts[z], max) << ","
        << Normalize(counts[z], total) << "\n";
  }
}

}  // namespace

ActionBucket BucketOf(std::span<const int> member_actions, int attack_action) {
  bool any_attack = false;
  bool any_move = false;
  for (int a : member_actions) {
    if (a == attack_action) {
      any_attack = true;
    } else {
      any_move = true;
    }
  }
  if (any_attack && !any_move) return kAllAttack;
  if (any_move && !any_attack) return kAllMove;
  return kMixed;
}

double IntentionReport::MeanRunLength() const {
  std::int64_t runs = 0;
  std::int64_t total = 0;
  for (const auto& [len, count] : continuity) {
    runs += count;
    total += len * count;
  }
  return runs > 0 ? static_cast<double>(total) / static_cast<double>(runs)
                  : 0.0;
}

std::int64_t IntentionReport::RunCount() const {
  std::int64_t runs = 0;
  for (const auto& [len, count] : continuity) runs += count;
  return runs;
}

double IntentionReport::ObserverDistance() const {
  return TotalVariation(selection_counts, observer_counts);
}

double MeanRunLength(std::span<const int> run_lengths) {
  if (run_lengths.empty()) return 0.0;
  double total = 0.0;
  for (int r : run_lengths) total += r;
  return total / static_cast<double>(run_lengths.size());
}

double TotalVariation(std::span<const std::int64_t> a,
                      std::span<const std::int64_t> b) {
  if (a.size() != b.size()) {
    throw DimensionError("total variation: supports differ");
  }
  std::int64_t ta = 0;
  std::int64_t tb = 0;
  for (auto v : a) ta += v;
  for (auto v : b) tb += v;
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d += std::abs(Normalize(a[i], ta) - Normalize(b[i], tb));
  }
  return 0.5 * d;
}

IntentionReport IntentionStats(std::span<const env::TrajectoryRecord> records,
                               int n_intentions, int attack_action) {
  if (n_intentions <= 0) {
    throw ParameterError("intention_stats: n_intentions must be positive");
  }
  const auto nz = static_cast<std::size_t>(n_intentions);
  IntentionReport report;
  report.selection_counts.assign(nz, 0);
  report.observer_counts.assign(nz, 0);
  report.cooccurrence.assign(nz, {0, 0, 0});

  std::int64_t agree = 0;
  std::int64_t observed = 0;
  // Per-agent run tracking within one episode.
  std::vector<int> prev_z;
  std::vector<int> run;
  int episode = -1;
  int last_step = -1;
  auto flush = [&] {
    for (int r : run) {
      if (r > 0) ++report.continuity[r];
    }
    std::fill(run.begin(), run.end(), 0);
    std::fill(prev_z.begin(), prev_z.end(), -1);
  };

  for (const auto& rec : records) {
    if (rec.teams.empty()) {
      throw FormatError("trajectory record (episode " +
                        std::to_string(rec.episode) + ", step " +
                        std::to_string(rec.step) + ") has no partition");
    }
    const std::size_t n = rec.actions.size();
    if (rec.episode != episode || rec.step != last_step + 1) {
      flush();
      episode = rec.episode;
    }
    last_step = rec.step;
    if (prev_z.size() < n) {
      prev_z.resize(n, -1);
      run.resize(n, 0);
    }
    std::vector<int> received(n, -1);
    for (const auto& team : rec.teams) {
      if (team.z < 0 || team.z >= n_intentions) {
        throw FormatError("trajectory record lacks a valid intention id");
      }
      std::vector<int> acts;
      for (int m : team.members) {
        if (m < 0 || static_cast<std::size_t>(m) >= n) {
          throw FormatError("trajectory team member out of range");
        }
        received[static_cast<std::size_t>(m)] = team.z;
        acts.push_back(rec.actions[static_cast<std::size_t>(m)]);
      }
      ++report.cooccurrence[static_cast<std::size_t>(team.z)]
                           [BucketOf(acts, attack_action)];
    }
    for (std::size_t i = 0; i < n; ++i) {
      const int z = received[i];
      if (z < 0) throw FormatError("trajectory partition misses an agent");
      ++report.selection_counts[static_cast<std::size_t>(z)];
      if (z == prev_z[i]) {
        ++run[i];
      } else {
        if (run[i] > 0) ++report.continuity[run[i]];
        prev_z[i] = z;
        run[i] = 1;
      }
      if (i < rec.observer_z.size()) {
        const int o = rec.observer_z[i];
        if (o < 0 || o >= n_intentions) {
          throw FormatError("observer intention out of range");
        }
        ++report.observer_counts[static_cast<std::size_t>(o)];
        agree += o == z;
        ++observed;
      }
    }
  }
  flush();
  report.agreement = observed > 0 ? static_cast<double>(agree) /
                                        static_cast<double>(observed)
                                  : 0.0;
  return report;
}

void WriteIntentionReport(const IntentionReport& report,
                          const std::filesystem::path& dir,
                          const std::string& comment) {
  std::filesystem::create_directories(dir);
  WriteCounts(dir / "selection.csv", comment, report.selection_counts);
  WriteCounts(dir / "observer.csv", comment, report.observer_counts);
  {
    std::ofstream out = OpenCsv(dir / "continuity.csv", comment);
    std::int64_t max = 0;
    const std::int64_t runs = report.RunCount();
    for (const auto& [len, count] : report.continuity) {
      max = std::max(max, count);
    }
    out << "run_length,count,max_normalized,share\n";
    for (const auto& [len, count] : report.continuity) {
      out << len << "," << count << "," << Normalize(count, max) << ","
          << Normalize(count, runs) << "\n";
    }
  }
  {
    std::ofstream out = OpenCsv(dir / "cooccurrence.csv", comment);
    std::int64_t max = 0;
    std::int64_t total = 0;
    for (const auto& row : report.cooccurrence) {
      for (auto c : row) {
        max = std::max(max, c);
        total += c;
      }
    }
    out << "z,all_attack,all_move,mixed,all_attack_share,all_move_share,"
           "mixed_share,all_attack_max_normalized,all_move_max_normalized,"
           "mixed_max_normalized\n";
    for (std::size_t z = 0; z < report.cooccurrence.size(); ++z) {
      const auto& row = report.cooccurrence[z];
      out << z;
      for (auto c : row) out << "," << c;
      for (auto c : row) out << "," << Normalize(c, total);
      for (auto c : row) out << "," << Normalize(c, max);
      out << "\n";
    }
  }
}

}  // namespace jim::eval
