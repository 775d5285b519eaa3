#include <doctest.h>

#include <functional>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "flowscope/error.hpp"
#include "flowscope/pathfinder.hpp"

using namespace flowscope;
using namespace flowscope::testing;

namespace {

// Textbook recursive formulation, kept deliberately naive: extend the
// current path by every out-neighbor not yet on it, emitting each extension.
std::vector<Path> recursive_paths(const TemporalNetwork& net, const std::string& seed, int n) {
  std::vector<Path> out;
  if (!net.contains(seed)) return out;
  std::vector<std::string> nodes{seed};
  std::vector<Weight> weights;
  std::function<void(int)> visit = [&](int depth) {
    if (depth == n) return;
    const std::string last = nodes.back();
    for (const auto& candidate : net.nodes()) {
      const auto w = net.weight(last, candidate);
      if (!w || std::find(nodes.begin(), nodes.end(), candidate) != nodes.end()) continue;
      nodes.push_back(candidate);
      weights.push_back(*w);
      out.push_back({nodes, weights, net.interval()});
      visit(depth + 1);
      nodes.pop_back();
      weights.pop_back();
    }
  };
  visit(0);
  return out;
}

std::vector<std::vector<std::string>> node_lists(const std::vector<Path>& paths) {
  std::vector<std::vector<std::string>> out;
  for (const auto& p : paths) out.push_back(p.nodes);
  return out;
}

Timestamp ts(const char* text) { return *parse_timestamp(text); }

TransactionRecord hop(const char* when, const char* from, const char* to) {
  return {ts(when), from, "B", "DE", to, "B", "DE", 10, "EUR"};
}

}  // namespace

TEST_SUITE("pathfinder") {
  TEST_CASE("example network: paths from x ending at y") {
    const auto net = example_network();
    std::vector<std::vector<std::string>> to_y;
    for (const auto& p : find_paths(net, "x", 3)) {
      if (p.terminal() == "y") to_y.push_back(p.nodes);
    }
    const std::vector<std::vector<std::string>> expected = {
        {"x", "h", "k", "y"}, {"x", "k", "y"}, {"x", "y"}, {"x", "z", "y"}};
    CHECK(to_y == expected);
  }

  TEST_CASE("example network: full ordered output") {
    const auto paths = find_paths(example_network(), "x", 3);
    const std::vector<std::vector<std::string>> expected = {
        {"x", "h"},      {"x", "h", "k"}, {"x", "h", "k", "y"}, {"x", "k"},
        {"x", "k", "y"}, {"x", "y"},      {"x", "z"},           {"x", "z", "y"}};
    CHECK(node_lists(paths) == expected);
    CHECK(paths[2].edge_weights == std::vector<Weight>{100, 300, 1200});
  }

  TEST_CASE("seed without out-edges or absent seed yields nothing") {
    const auto net = example_network();
    CHECK(find_paths(net, "y", 3).empty());
    CHECK(find_paths(net, "nobody", 3).empty());
    CHECK(find_paths(TemporalNetwork{}, "x", 3).empty());
  }

  TEST_CASE("cycles are never revisited") {
    const auto net = network_of({{"a", "b", 1}, {"b", "c", 1}, {"c", "a", 1}});
    const std::vector<std::vector<std::string>> expected = {{"a", "b"}, {"a", "b", "c"}};
    CHECK(node_lists(find_paths(net, "a", 5)) == expected);
  }

  TEST_CASE("max_len below one is rejected") {
    CHECK_THROWS_AS(find_paths(example_network(), "x", 0), Error);
    CHECK_THROWS_AS(find_paths(example_network(), "x", -3), Error);
    CHECK_THROWS_AS(brute_force_paths(example_network(), "x", 0), Error);
  }

  TEST_CASE("brute force refuses large networks") {
    CHECK_THROWS_AS(brute_force_paths(complete_network(13), node_name(0), 1), Error);
    CHECK_NOTHROW(brute_force_paths(complete_network(12), node_name(0), 1));
  }

  TEST_CASE("output order equals the recursive formulation") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 60; ++trial) {
      const int nodes = 2 + static_cast<int>(rng() % 9);
      const auto net = random_network(rng, nodes, 0.35);
      const auto seed = node_name(static_cast<int>(rng() % nodes));
      for (int n = 1; n <= 4; ++n) {
        CHECK(find_paths(net, seed, n) == recursive_paths(net, seed, n));
      }
    }
  }

  TEST_CASE("set equality with the brute-force enumeration") {
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 120; ++trial) {
      const int nodes = 2 + static_cast<int>(rng() % 11);
      const double density = 0.1 + 0.6 * static_cast<double>(rng() % 100) / 100.0;
      const auto net = random_network(rng, nodes, density);
      const auto seed = node_name(static_cast<int>(rng() % nodes));
      for (int n = 1; n <= 4; ++n) {
        const auto fast = find_paths(net, seed, n);
        const auto slow = brute_force_paths(net, seed, n);
        CHECK(fast.size() == slow.size());
        CHECK(as_set(fast) == as_set(slow));
      }
    }
  }

  TEST_CASE("path invariants, prefix closure and determinism") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 40; ++trial) {
      const int nodes = 3 + static_cast<int>(rng() % 10);
      const auto net = random_network(rng, nodes, 0.4);
      const auto seed = node_name(0);
      const int n = 1 + static_cast<int>(rng() % 4);
      const auto paths = find_paths(net, seed, n);
      CHECK(paths == find_paths(net, seed, n));
      std::set<std::vector<std::string>> seen;
      for (const auto& p : paths) seen.insert(p.nodes);
      CHECK(seen.size() == paths.size());
      for (const auto& p : paths) {
        REQUIRE(p.nodes.size() == p.edge_weights.size() + 1);
        CHECK(p.edge_length() >= 1);
        CHECK(p.edge_length() <= static_cast<std::size_t>(n));
        CHECK(p.nodes.front() == seed);
        CHECK(std::set<std::string>(p.nodes.begin(), p.nodes.end()).size() == p.nodes.size());
        for (std::size_t i = 0; i < p.edge_weights.size(); ++i) {
          CHECK(net.weight(p.nodes[i], p.nodes[i + 1]) == p.edge_weights[i]);
        }
        if (p.nodes.size() > 2) {
          CHECK(seen.count(std::vector<std::string>(p.nodes.begin(), p.nodes.end() - 1)) == 1);
        }
      }
    }
  }

  TEST_CASE("search call counts") {
    // Search-tree sizes; on K(d+1) with n = 3 this is 1 + d + d(d-1) + d(d-1)(d-2).
    CHECK(count_calls(network_of({{"a", "b", 1}, {"b", "c", 1}}), "a", 2) == 3);
    CHECK(count_calls(network_of({{"s", "a", 1}, {"s", "b", 1}, {"s", "c", 1}, {"s", "d", 1}}),
                      "s", 1) == 5);
    const std::vector<std::pair<int, std::uint64_t>> complete = {
        {5, 41}, {6, 86}, {7, 157}, {8, 260}};
    for (const auto& [k, calls] : complete) {
      const auto net = complete_network(k);
      CHECK(count_calls(net, node_name(0), 3) == calls);
      CHECK(calls <= call_bound(net.max_out_degree(), 3));
    }
    CHECK(count_calls(example_network(), "nobody", 3) == 0);
  }

  TEST_CASE("call count stays within the (n+1) d^n bound") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
      const int nodes = 2 + static_cast<int>(rng() % 11);
      const auto net = random_network(rng, nodes, 0.5);
      if (net.max_out_degree() == 0) continue;
      for (int n = 1; n <= 4; ++n) {
        CHECK(count_calls(net, node_name(0), n) <= call_bound(net.max_out_degree(), n));
      }
    }
  }

  TEST_CASE("temporal feasibility") {
    const AggregationSpec spec{Granularity::kAccount, BucketKind::kIsoWeek};
    const Path path{{"x", "k", "y"}, {1, 1}, {"2022-W08", 0}};

    const std::vector<TransactionRecord> ordered = {
        hop("2022-02-21T09:00:00Z", "x", "k"), hop("2022-02-22T09:00:00Z", "k", "y")};
    CHECK(temporal_feasibility(ordered, path, spec));

    const std::vector<TransactionRecord> reversed = {
        hop("2022-02-22T09:00:00Z", "x", "k"), hop("2022-02-21T09:00:00Z", "k", "y")};
    CHECK_FALSE(temporal_feasibility(reversed, path, spec));

    // The second edge only has an earlier record plus one in another week.
    const std::vector<TransactionRecord> mixed = {
        hop("2022-02-23T09:00:00Z", "x", "k"), hop("2022-02-21T09:00:00Z", "k", "y"),
        hop("2022-03-01T09:00:00Z", "k", "y")};
    CHECK_FALSE(temporal_feasibility(mixed, path, spec));

    // A late second record on the first edge does not spoil an early one.
    const std::vector<TransactionRecord> choice = {
        hop("2022-02-25T09:00:00Z", "x", "k"), hop("2022-02-21T09:00:00Z", "x", "k"),
        hop("2022-02-22T09:00:00Z", "k", "y")};
    CHECK(temporal_feasibility(choice, path, spec));
  }

  TEST_CASE("temporal feasibility matches exhaustive choice") {
    const AggregationSpec spec{Granularity::kAccount, BucketKind::kIsoWeek};
    const Path path{{"a", "b", "c", "d"}, {1, 1, 1}, {"2022-W08", 0}};
    const std::vector<std::pair<const char*, const char*>> edges = {{"a", "b"}, {"b", "c"}, {"c", "d"}};
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 300; ++trial) {
      std::vector<TransactionRecord> records;
      std::vector<std::vector<Timestamp>> per_edge(3);
      for (std::size_t e = 0; e < 3; ++e) {
        const int k = static_cast<int>(rng() % 4);
        for (int i = 0; i < k; ++i) {
          auto r = hop("2022-02-21T00:00:00Z", edges[e].first, edges[e].second);
          r.timestamp += std::chrono::hours{static_cast<int>(rng() % 24)};
          per_edge[e].push_back(r.timestamp);
          records.push_back(r);
        }
      }
      bool exhaustive = false;
      for (auto t0 : per_edge[0])
        for (auto t1 : per_edge[1])
          for (auto t2 : per_edge[2])
            if (t0 < t1 && t1 < t2) exhaustive = true;
      CHECK(temporal_feasibility(records, path, spec) == exhaustive);
    }
  }
}
