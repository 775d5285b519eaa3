#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "flowscope/graph.hpp"
#include "flowscope/pathfinder.hpp"
#include "flowscope/synth.hpp"

namespace flowscope::testing {

// Five-node example network. Per-path minima towards y:
// x,h,k,y -> 100; x,k,y -> 1000; x,z,y -> 500; x,y -> 250 (total 1850).
inline TemporalNetwork example_network(IntervalId interval = {"2022-W08", 0}) {
  const std::vector<TemporalNetwork::Edge> edges = {
      {"x", "h", 100}, {"h", "k", 300}, {"k", "y", 1200}, {"x", "k", 1000},
      {"x", "z", 500}, {"z", "y", 700}, {"x", "y", 250},
  };
  return TemporalNetwork::from_edges(std::move(interval), edges);
}

inline TemporalNetwork network_of(std::vector<TemporalNetwork::Edge> edges,
                                  IntervalId interval = {"2022-W08", 0}) {
  return TemporalNetwork::from_edges(std::move(interval), edges);
}

// Node names n00, n01, ... so lexical order equals numeric order.
inline std::string node_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "n%02d", i);
  return buf;
}

// Random simple digraph on `nodes` nodes, each ordered pair present with
// probability `density`, weights uniform in [1, 1000].
inline TemporalNetwork random_network(std::mt19937_64& rng, int nodes, double density) {
  std::bernoulli_distribution keep(density);
  std::uniform_int_distribution<Weight> weight(1, 1000);
  std::vector<TemporalNetwork::Edge> edges;
  for (int a = 0; a < nodes; ++a) {
    for (int b = 0; b < nodes; ++b) {
      if (a != b && keep(rng)) {
        edges.push_back({node_name(a), node_name(b), weight(rng)});
      }
    }
  }
  return network_of(edges);
}

inline TemporalNetwork complete_network(int nodes) {
  std::vector<TemporalNetwork::Edge> edges;
  for (int a = 0; a < nodes; ++a) {
    for (int b = 0; b < nodes; ++b) {
      if (a != b) edges.push_back({node_name(a), node_name(b), 10 + a * nodes + b});
    }
  }
  return network_of(edges);
}

struct PathKey {
  std::vector<std::string> nodes;
  std::vector<Weight> weights;
  auto operator<=>(const PathKey&) const = default;
};

inline std::set<PathKey> as_set(const std::vector<Path>& paths) {
  std::set<PathKey> out;
  for (const auto& p : paths) out.insert({p.nodes, p.edge_weights});
  return out;
}

inline std::uint64_t call_bound(std::size_t max_out_degree, int max_len) {
  std::uint64_t power = 1;
  for (int i = 0; i < max_len; ++i) power *= max_out_degree;
  return static_cast<std::uint64_t>(max_len + 1) * power;
}

// Source S, sink T and `intermediaries` accounts M each carrying a weekly
// S->M and M->T baseline of `base` (+-jitter). Injections double the
// through-flow of the listed intermediaries from `cutoff` on.
inline synth::ScenarioConfig fan_scenario(std::uint64_t seed, int intermediaries,
                                          const std::vector<int>& injected, int intervals = 60,
                                          int cutoff = 40, Amount base = 100000,
                                          double jitter = 0.15) {
  synth::ScenarioConfig c;
  c.rng_seed = seed;
  c.bucket = BucketKind::kIsoWeek;
  c.start_date = "2021-01-04";
  c.intervals = intervals;
  c.countries = 1;
  c.institutions_per_country = 1;
  c.accounts_per_institution = intermediaries + 2;
  const std::string source = synth::account_id(0, 0, 0);
  const std::string sink = synth::account_id(0, 0, 1);
  for (int m = 0; m < intermediaries; ++m) {
    const std::string via = synth::account_id(0, 0, m + 2);
    c.baseline.push_back({source, via, 1, 0, base, jitter});
    c.baseline.push_back({via, sink, 1, 0, base, jitter});
  }
  for (int m : injected) {
    c.injections.push_back({source, sink, synth::account_id(0, 0, m + 2), cutoff, 0, base, 1});
  }
  return c;
}

}  // namespace flowscope::testing
