#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flowscope/graph.hpp"

namespace flowscope {

// Simple path: distinct nodes, nodes.size() == edge_weights.size() + 1.
struct Path {
  std::vector<std::string> nodes;
  std::vector<Weight> edge_weights;
  IntervalId interval;

  std::size_t edge_length() const { return edge_weights.size(); }
  const std::string& terminal() const { return nodes.back(); }

  bool operator==(const Path&) const = default;
};

// Streams every simple path of edge-length 1..max_len that starts at `seed`,
// in depth-first preorder with out-neighbors visited by ascending id. This
// is the order a recursive search produces; the recursion is replaced by an
// explicit stack of (node, next-neighbor cursor) frames whose height never
// exceeds max_len + 1.
//
//   PathEnumerator it(net, "x", 3);
//   while (it.next()) use(it.nodes(), it.weights());
//
// The enumerator borrows the network; it must outlive the enumerator.
class PathEnumerator {
 public:
  // Throws if max_len < 1. An absent seed yields no paths.
  PathEnumerator(const TemporalNetwork& network, std::string_view seed, int max_len);

  bool next();

  std::span<const NodeIndex> nodes() const { return path_; }
  std::span<const Weight> weights() const { return weights_; }
  NodeIndex terminal() const { return path_.back(); }

  Path materialize() const;

  // Search frames entered so far, the root included.
  std::uint64_t calls() const { return calls_; }

 private:
  const TemporalNetwork* network_;
  std::size_t max_len_;
  std::vector<NodeIndex> path_;
  std::vector<Weight> weights_;
  std::vector<std::size_t> cursor_;
  std::vector<bool> on_path_;
  std::uint64_t calls_ = 0;
};

std::vector<Path> find_paths(const TemporalNetwork& network, std::string_view seed, int max_len);

// Reference enumeration over every node sequence of length 2..max_len+1.
// Limited to networks of at most 12 nodes.
std::vector<Path> brute_force_paths(const TemporalNetwork& network, std::string_view seed,
                                    int max_len);
inline constexpr std::size_t kBruteForceNodeLimit = 12;

// Search frames a full enumeration enters. Bounded by
// (max_len + 1) * max_out_degree^max_len whenever max_out_degree >= 1.
std::uint64_t count_calls(const TemporalNetwork& network, std::string_view seed, int max_len);

// True when one record per edge can be picked, all inside the path's
// interval, with strictly increasing timestamps along the path.
bool temporal_feasibility(std::span<const TransactionRecord> records, const Path& path,
                          const AggregationSpec& spec);

}  // namespace flowscope
