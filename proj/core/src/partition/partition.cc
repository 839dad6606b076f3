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

#include "jim/partition/partition.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "jim/errors.h"

namespace jim::partition {

VisibilityGraph::VisibilityGraph(std::vector<std::vector<int>> sees)
    : sees_(std::move(sees)) {
  const int n = static_cast<int>(sees_.size());
  for (int i = 0; i < n; ++i) {
    auto& s = sees_[i];
    for (int j : s) {
      if (j < 0 || j >= n) {
        throw DimensionError("visibility id " + std::to_string(j) +
                             " out of range for " + std::to_string(n) +
                             " agents");
      }
    }
    s.push_back(i);
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
}

VisibilityGraph VisibilityGraph::Empty(int n) {
  return VisibilityGraph(std::vector<std::vector<int>>(n));
}

VisibilityGraph VisibilityGraph::Complete(int n) {
  std::vector<std::vector<int>> sees(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) sees[i].push_back(j);
  }
  return VisibilityGraph(std::move(sees));
}

bool VisibilityGraph::Sees(int i, int j) const {
  return std::binary_search(sees_[i].begin(), sees_[i].end(), j);
}

std::vector<int> TeamPartition::TeamOf(int n) const {
  std::vector<int> team_of(n, -1);
  for (int t = 0; t < team_count(); ++t) {
    for (int m : teams[t].members) team_of[m] = t;
  }
  return team_of;
}

TeamPartition GreedyPartition(const VisibilityGraph& g, Rng& rng) {
  const int n = g.n();
  std::vector<bool> unassigned(n, true);
  int remaining = n;
  TeamPartition out;
  while (remaining > 0) {
    std::vector<int> best;
    int best_count = -1;
    for (int i = 0; i < n; ++i) {
      if (!unassigned[i]) continue;
      int count = 0;
      for (int j : g.sees(i)) count += unassigned[j] ? 1 : 0;
      if (count > best_count) {
        best_count = count;
        best.assign(1, i);
      } else if (count == best_count) {
        best.push_back(i);
      }
    }
    const int commander =
        best.size() == 1
            ? best[0]
            : best[UniformIndex(rng, static_cast<int>(best.size()))];
    Team team{commander, {}};
    for (int j : g.sees(commander)) {
      if (unassigned[j]) {
        team.members.push_back(j);
        unassigned[j] = false;
        --remaining;
      }
    }
    out.teams.push_back(std::move(team));
  }
  return out;
}

double OptimalityGap(const TeamPartition& p, const VisibilityGraph& g,
                     double eps_gap) {
  if (eps_gap < 0.0) throw ParameterError("eps_gap must be >= 0");
  const int n = g.n();
  double gap = 0.0;
  for (const Team& team : p.teams) {
    for (int i : team.members) {
      int k = 0;
      for (int j : team.members) k += g.Sees(i, j) ? 1 : 0;
      if (n - k < 0) {
        throw InvariantError("agent " + std::to_string(i) +
                             " observes more team members than agents exist");
      }
      gap += (std::ldexp(1.0, n - k) - 1.0) * eps_gap;
    }
  }
  return gap;
}

void CheckPartition(const TeamPartition& p, const VisibilityGraph& g) {
  std::vector<int> seen(g.n(), 0);
  for (const Team& team : p.teams) {
    if (!std::binary_search(team.members.begin(), team.members.end(),
                            team.commander)) {
      throw InvariantError("commander " + std::to_string(team.commander) +
                           " is not a member of its team");
    }
    for (int m : team.members) {
      if (m < 0 || m >= g.n()) throw InvariantError("member id out of range");
      if (!g.Sees(team.commander, m)) {
        throw InvariantError("member " + std::to_string(m) +
                             " is not visible to commander " +
                             std::to_string(team.commander));
      }
      ++seen[m];
    }
  }
  for (int i = 0; i < g.n(); ++i) {
    if (seen[i] != 1) {
      throw InvariantError("agent " + std::to_string(i) + " is covered " +
                           std::to_string(seen[i]) + " times");
    }
  }
}

namespace {

// Enumerates set partitions block by block; the block holding the lowest
// unassigned agent is chosen among subsets that some member can fully see.
class CoverSearch {
 public:
  CoverSearch(const VisibilityGraph& g, double eps) : g_(g), eps_(eps) {
    const int n = g.n();
    sees_mask_.resize(n);
    for (int i = 0; i < n; ++i) {
      for (int j : g.sees(i)) sees_mask_[i] |= 1u << j;
    }
  }

  TeamPartition Run() {
    const unsigned all = g_.n() == 0 ? 0u : (1u << g_.n()) - 1u;
    Recurse(all);
    return best_;
  }

 private:
  void Recurse(unsigned unassigned) {
    if (unassigned == 0) {
      const double gap = OptimalityGap(current_, g_, eps_);
      if (gap < best_gap_) {
        best_gap_ = gap;
        best_ = current_;
      }
      return;
    }
    const int lowest = __builtin_ctz(unassigned);
    const unsigned rest = unassigned & ~(1u << lowest);
    // Every subset of rest, joined with the lowest agent.
    for (unsigned sub = rest;; sub = (sub - 1) & rest) {
      const unsigned block = sub | (1u << lowest);
      const int commander = LegalCommander(block);
      if (commander >= 0) {
        Team team{commander, {}};
        for (unsigned b = block; b != 0; b &= b - 1) {
          team.members.push_back(__builtin_ctz(b));
        }
        current_.teams.push_back(std::move(team));
        Recurse(unassigned & ~block);
        current_.teams.pop_back();
      }
      if (sub == 0) break;
    }
  }

  int LegalCommander(unsigned block) const {
    for (unsigned b = block; b != 0; b &= b - 1) {
      const int c = __builtin_ctz(b);
      if ((block & ~sees_mask_[c]) == 0) return c;
    }
    return -1;
  }

  const VisibilityGraph& g_;
  double eps_;
  std::vector<unsigned> sees_mask_;
  TeamPartition current_;
  TeamPartition best_;
  double best_gap_ = std::numeric_limits<double>::infinity();
};

}  // namespace

TeamPartition BruteForcePartition(const VisibilityGraph& g, double eps_gap) {
  if (g.n() > kBruteForceMaxAgents) {
    throw GuardError("brute-force partition limited to " +
                     std::to_string(kBruteForceMaxAgents) + " agents, got " +
                     std::to_string(g.n()));
  }
  if (eps_gap < 0.0) throw ParameterError("eps_gap must be >= 0");
  return CoverSearch(g, eps_gap).Run();
}

VisibilityGraph RandomVisibilityGraph(int n, double edge_prob, Rng& rng) {
  std::vector<std::vector<int>> sees(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && Uniform01(rng) < edge_prob) {
        sees[static_cast<std::size_t>(i)].push_back(j);
      }
    }
  }
  return VisibilityGraph(std::move(sees));
}

PartitionBenchReport RunPartitionBench(const PartitionBenchOptions& options) {
  if (options.max_agents < 1 || options.max_agents > kBruteForceMaxAgents) {
    throw ParameterError("partition bench: max_agents must lie in [1, " +
                         std::to_string(kBruteForceMaxAgents) + "]");
  }
  PartitionBenchReport report;
  Rng rng(options.seed);
  auto random_graph = [&] {
    const int n = 1 + UniformIndex(rng, options.max_agents);
    return RandomVisibilityGraph(n, Uniform01(rng), rng);
  };
  for (int k = 0; k < options.graphs; ++k) {
    const VisibilityGraph g = random_graph();
    const std::uint64_t tie_seed = rng();
    Rng a(tie_seed);
    Rng b(tie_seed);
    const TeamPartition p = GreedyPartition(g, a);
    try {
      CheckPartition(p, g);
    } catch (const InvariantError&) {
      ++report.cover_failures;
    }
    if (!(GreedyPartition(g, b) == p)) ++report.determinism_failures;
    ++report.graphs;
  }
  double ratio_sum = 0.0;
  for (int k = 0; k < options.brute_graphs; ++k) {
    const VisibilityGraph g = random_graph();
    const double greedy = OptimalityGap(GreedyPartition(g, rng), g,
                                        options.eps_gap);
    const double best =
        OptimalityGap(BruteForcePartition(g, options.eps_gap), g,
                      options.eps_gap);
    if (best > greedy + 1e-12) ++report.brute_worse;
    report.mean_greedy_gap += greedy;
    report.mean_optimal_gap += best;
    if (best > 0.0) {
      ratio_sum += greedy / best;
      ++report.ratio_graphs;
    }
    ++report.brute_graphs;
  }
  if (report.brute_graphs > 0) {
    report.mean_greedy_gap /= report.brute_graphs;
    report.mean_optimal_gap /= report.brute_graphs;
  }
  if (report.ratio_graphs > 0) report.mean_gap_ratio = ratio_sum / report.ratio_graphs;
  return report;
}

}  // namespace jim::partition
