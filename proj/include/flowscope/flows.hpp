#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flowscope/graph.hpp"
#include "flowscope/pathfinder.hpp"

namespace flowscope {

// All paths source -> sink of edge-length <= max_len in one interval.
struct Flow {
  std::string source;
  std::string sink;
  int max_len = 0;
  IntervalId interval;
  std::vector<Path> paths;
};

Weight path_weight(const Path& path);
Weight path_min(const Path& path);

// Throws if source == sink or max_len < 1. Missing or unreachable sink
// gives an empty flow.
Flow build_flow(const TemporalNetwork& network, std::string_view source, std::string_view sink,
                int max_len);

// Sum over paths of the smallest edge weight. Paths may share edges, so this
// is an upper estimate of what could be routed, not a max-flow value.
Weight flow_weight(const Flow& flow);

// Sub-flow of the paths that pass through `via` as an interior node.
Flow flow_through(const TemporalNetwork& network, std::string_view source, std::string_view sink,
                  int max_len, std::string_view via);

// flow_through weight for every interior node of the flow, in one
// enumeration pass. Nodes on no path are absent.
std::map<std::string, Weight> through_weights(const TemporalNetwork& network,
                                              std::string_view source, std::string_view sink,
                                              int max_len);

struct SeriesPoint {
  IntervalId interval;
  Weight weight = 0;

  bool operator==(const SeriesPoint&) const = default;
};

// Per-interval flow weights. `expected` and `deviation` are parallel to
// `points` once filled by the anomaly module; entries without a defined
// expectation are nullopt.
struct FlowSeries {
  std::string source;
  std::string sink;
  int max_len = 0;
  std::vector<SeriesPoint> points;
  std::optional<std::vector<std::optional<double>>> expected;
  std::optional<std::vector<std::optional<double>>> deviation;

  std::vector<double> values() const;
};

// One point per network, in family order.
FlowSeries flow_series(std::span<const TemporalNetwork> networks, std::string_view source,
                       std::string_view sink, int max_len);

// Series of flow_through weights for one intermediary.
FlowSeries through_series(std::span<const TemporalNetwork> networks, std::string_view source,
                          std::string_view sink, int max_len, std::string_view via);

// Direct edge weight src -> dst per interval (0 where the edge is absent).
// max_len is reported as 1.
FlowSeries edge_series(std::span<const TemporalNetwork> networks, std::string_view src,
                       std::string_view dst);

// Header `interval,weight,expected,deviation`; unset cells are empty.
void write_flow_series(std::ostream& out, const FlowSeries& series);

// Free-form labels per node id (e.g. country of an institution).
using NodeAnnotations = std::map<std::string, std::string>;

struct PathTableRow {
  std::string interval;
  std::vector<std::string> nodes;
  std::vector<Weight> edge_weights;
  std::string terminal;
  Weight min_weight = 0;
  // Parallel to nodes when annotations were supplied, else empty.
  std::vector<std::string> annotations;

  bool operator==(const PathTableRow&) const = default;
};

PathTableRow to_row(const Path& path, const NodeAnnotations* annotations = nullptr);

// Rows in input order. The file has header
// `interval,path_nodes,edge_weights,terminal,min_weight` (plus an
// `annotations` column when annotations are given); list cells are JSON
// arrays.
std::vector<PathTableRow> export_path_table(std::span<const Path> paths,
                                            const NodeAnnotations* annotations,
                                            std::ostream* out);
std::vector<PathTableRow> export_path_table(std::span<const Flow> flows,
                                            const NodeAnnotations* annotations,
                                            std::ostream* out);

void write_path_table(std::ostream& out, std::span<const PathTableRow> rows);

}  // namespace flowscope
