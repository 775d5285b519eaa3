#include "flowscope/flows.hpp"

#include <json.hpp>

#include <algorithm>
#include <numeric>

#include "flowscope/csv.hpp"
#include "flowscope/error.hpp"

namespace flowscope {
namespace {

void check_endpoints(std::string_view source, std::string_view sink) {
  if (source == sink) {
    throw Error(ErrorKind::kInvalidArgument, "source_equals_sink",
                "flow from '" + std::string(source) + "' to itself is undefined");
  }
}

Weight min_of(std::span<const Weight> weights) {
  return *std::min_element(weights.begin(), weights.end());
}

// Sum of path minima over the paths source -> sink, streamed.
Weight streamed_flow_weight(const TemporalNetwork& network, std::string_view source,
                            std::string_view sink, int max_len) {
  PathEnumerator it(network, source, max_len);
  const auto target = network.index_of(sink);
  Weight total = 0;
  if (!target) {
    return total;
  }
  while (it.next()) {
    if (it.terminal() == *target) {
      total += min_of(it.weights());
    }
  }
  return total;
}

}  // namespace

Weight path_weight(const Path& path) {
  return std::accumulate(path.edge_weights.begin(), path.edge_weights.end(), Weight{0});
}

Weight path_min(const Path& path) {
  if (path.edge_weights.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "empty_path", "path has no edges");
  }
  return min_of(path.edge_weights);
}

Flow build_flow(const TemporalNetwork& network, std::string_view source, std::string_view sink,
                int max_len) {
  check_endpoints(source, sink);
  Flow flow{std::string(source), std::string(sink), max_len, network.interval(), {}};
  PathEnumerator it(network, source, max_len);
  const auto target = network.index_of(sink);
  if (!target) {
    return flow;
  }
  while (it.next()) {
    if (it.terminal() == *target) {
      flow.paths.push_back(it.materialize());
    }
  }
  return flow;
}

Weight flow_weight(const Flow& flow) {
  Weight total = 0;
  for (const auto& p : flow.paths) {
    total += path_min(p);
  }
  return total;
}

Flow flow_through(const TemporalNetwork& network, std::string_view source, std::string_view sink,
                  int max_len, std::string_view via) {
  if (via == source || via == sink) {
    throw Error(ErrorKind::kInvalidArgument, "via_is_endpoint",
                "intermediary '" + std::string(via) + "' must differ from source and sink");
  }
  Flow flow = build_flow(network, source, sink, max_len);
  std::erase_if(flow.paths, [&](const Path& p) {
    return std::find(p.nodes.begin() + 1, p.nodes.end() - 1, via) == p.nodes.end() - 1;
  });
  return flow;
}

std::map<std::string, Weight> through_weights(const TemporalNetwork& network,
                                              std::string_view source, std::string_view sink,
                                              int max_len) {
  check_endpoints(source, sink);
  std::map<std::string, Weight> out;
  PathEnumerator it(network, source, max_len);
  const auto target = network.index_of(sink);
  if (!target) {
    return out;
  }
  while (it.next()) {
    if (it.terminal() != *target) {
      continue;
    }
    const Weight m = min_of(it.weights());
    const auto nodes = it.nodes();
    for (std::size_t i = 1; i + 1 < nodes.size(); ++i) {
      out[network.name(nodes[i])] += m;
    }
  }
  return out;
}

std::vector<double> FlowSeries::values() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    out.push_back(static_cast<double>(p.weight));
  }
  return out;
}

FlowSeries flow_series(std::span<const TemporalNetwork> networks, std::string_view source,
                       std::string_view sink, int max_len) {
  check_endpoints(source, sink);
  if (networks.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "empty_family", "network family is empty");
  }
  FlowSeries series{std::string(source), std::string(sink), max_len, {}, {}, {}};
  series.points.reserve(networks.size());
  for (const auto& net : networks) {
    series.points.push_back({net.interval(), streamed_flow_weight(net, source, sink, max_len)});
  }
  return series;
}

FlowSeries through_series(std::span<const TemporalNetwork> networks, std::string_view source,
                          std::string_view sink, int max_len, std::string_view via) {
  if (networks.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "empty_family", "network family is empty");
  }
  FlowSeries series{std::string(source), std::string(sink), max_len, {}, {}, {}};
  for (const auto& net : networks) {
    series.points.push_back(
        {net.interval(), flow_weight(flow_through(net, source, sink, max_len, via))});
  }
  return series;
}

FlowSeries edge_series(std::span<const TemporalNetwork> networks, std::string_view src,
                       std::string_view dst) {
  FlowSeries series{std::string(src), std::string(dst), 1, {}, {}, {}};
  for (const auto& net : networks) {
    series.points.push_back({net.interval(), net.weight(src, dst).value_or(0)});
  }
  return series;
}

void write_flow_series(std::ostream& out, const FlowSeries& series) {
  csv::write_row(out, {"interval", "weight", "expected", "deviation"});
  auto cell = [](const std::optional<std::vector<std::optional<double>>>& column, std::size_t i) {
    if (!column || !(*column)[i]) {
      return std::string();
    }
    return csv::format_double(*(*column)[i]);
  };
  for (std::size_t i = 0; i < series.points.size(); ++i) {
    csv::write_row(out, {series.points[i].interval.label, std::to_string(series.points[i].weight),
                         cell(series.expected, i), cell(series.deviation, i)});
  }
}

PathTableRow to_row(const Path& path, const NodeAnnotations* annotations) {
  PathTableRow row{path.interval.label, path.nodes, path.edge_weights, path.terminal(),
                   path_min(path), {}};
  if (annotations != nullptr) {
    for (const auto& n : path.nodes) {
      const auto it = annotations->find(n);
      row.annotations.push_back(it == annotations->end() ? std::string() : it->second);
    }
  }
  return row;
}

void write_path_table(std::ostream& out, std::span<const PathTableRow> rows) {
  const bool annotated =
      std::any_of(rows.begin(), rows.end(), [](const auto& r) { return !r.annotations.empty(); });
  std::vector<std::string> header{"interval", "path_nodes", "edge_weights", "terminal",
                                  "min_weight"};
  if (annotated) {
    header.push_back("annotations");
  }
  csv::write_row(out, header);
  for (const auto& r : rows) {
    std::vector<std::string> cells{r.interval, nlohmann::json(r.nodes).dump(),
                                   nlohmann::json(r.edge_weights).dump(), r.terminal,
                                   std::to_string(r.min_weight)};
    if (annotated) {
      cells.push_back(nlohmann::json(r.annotations).dump());
    }
    csv::write_row(out, cells);
  }
}

std::vector<PathTableRow> export_path_table(std::span<const Path> paths,
                                            const NodeAnnotations* annotations,
                                            std::ostream* out) {
  std::vector<PathTableRow> rows;
  rows.reserve(paths.size());
  for (const auto& p : paths) {
    rows.push_back(to_row(p, annotations));
  }
  if (out != nullptr) {
    write_path_table(*out, rows);
  }
  return rows;
}

std::vector<PathTableRow> export_path_table(std::span<const Flow> flows,
                                            const NodeAnnotations* annotations,
                                            std::ostream* out) {
  std::vector<Path> paths;
  for (const auto& f : flows) {
    paths.insert(paths.end(), f.paths.begin(), f.paths.end());
  }
  return export_path_table(std::span<const Path>(paths), annotations, out);
}

}  // namespace flowscope
