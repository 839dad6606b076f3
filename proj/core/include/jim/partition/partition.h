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

#ifndef JIM_PARTITION_PARTITION_H_
#define JIM_PARTITION_PARTITION_H_

#include <cstdint>
#include <vector>

#include "jim/rng.h"

namespace jim::partition {

// sees[i] is the sorted set of agents visible to agent i; i is always a
// member. Visibility need not be mutual.
class VisibilityGraph {
 public:
  VisibilityGraph() = default;
  // Adds self-visibility, sorts and deduplicates. Throws DimensionError on
  // out-of-range ids.
  explicit VisibilityGraph(std::vector<std::vector<int>> sees);

  static VisibilityGraph Empty(int n);
  static VisibilityGraph Complete(int n);

  int n() const { return static_cast<int>(sees_.size()); }
  const std::vector<int>& sees(int i) const { return sees_[i]; }
  bool Sees(int i, int j) const;

 private:
  std::vector<std::vector<int>> sees_;
};

struct Team {
  int commander = 0;
  std::vector<int> members;  // sorted, includes the commander
  bool operator==(const Team&) const = default;
};

struct TeamPartition {
  std::vector<Team> teams;

  int team_count() const { return static_cast<int>(teams.size()); }
  // team_of[i] = index of agent i's team.
  std::vector<int> TeamOf(int n) const;
  bool operator==(const TeamPartition&) const = default;
};

// Repeatedly makes the unassigned agent that sees the most unassigned agents
// a commander and groups it with those agents; ties are broken uniformly
// with rng.
TeamPartition GreedyPartition(const VisibilityGraph& g, Rng& rng);

// Sum over agents i of (2^(n - K_i) - 1) * eps_gap, where K_i counts the
// members of i's own team that i observes (self included). Throws
// InvariantError if some K_i exceeds n.
double OptimalityGap(const TeamPartition& p, const VisibilityGraph& g,
                     double eps_gap);

// Exact cover, commander legality (members within the commander's view),
// throws InvariantError if violated.
void CheckPartition(const TeamPartition& p, const VisibilityGraph& g);

inline constexpr int kBruteForceMaxAgents = 10;

// Exhaustive search over commander-led exact covers for one minimizing
// OptimalityGap. Throws GuardError when n > kBruteForceMaxAgents.
TeamPartition BruteForcePartition(const VisibilityGraph& g, double eps_gap);

// Each ordered pair (i, j), i != j, is an edge with probability edge_prob.
VisibilityGraph RandomVisibilityGraph(int n, double edge_prob, Rng& rng);

struct PartitionBenchOptions {
  int graphs = 1000;        // exact-cover and determinism checks
  int brute_graphs = 200;   // optimality comparison
  int max_agents = 8;
  double eps_gap = 0.01;
  std::uint64_t seed = 0;
};

struct PartitionBenchReport {
  int graphs = 0;
  int cover_failures = 0;
  int determinism_failures = 0;
  int brute_graphs = 0;
  int brute_worse = 0;  // graphs where the exhaustive gap exceeds greedy
  // Mean greedy/optimal gap ratio over graphs with a positive optimal gap.
  double mean_gap_ratio = 0.0;
  int ratio_graphs = 0;
  double mean_greedy_gap = 0.0;
  double mean_optimal_gap = 0.0;

  bool passed() const {
    return cover_failures == 0 && determinism_failures == 0 &&
           brute_worse == 0;
  }
};

// Random graphs with 1..max_agents agents and random edge densities.
PartitionBenchReport RunPartitionBench(const PartitionBenchOptions& options);

}  // namespace jim::partition

#endif  // JIM_PARTITION_PARTITION_H_
