#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "flowscope/ingest.hpp"

namespace flowscope {

using Weight = Amount;
using NodeIndex = std::uint32_t;

enum class Granularity { kAccount, kInstitution, kCountry };
enum class BucketKind { kDay, kIsoWeek, kCalendarMonth };

std::string_view to_string(Granularity g);
std::string_view to_string(BucketKind b);
// Case-insensitive: "account", "INSTITUTION", "iso_week", "month", ...
std::optional<Granularity> parse_granularity(std::string_view text);
std::optional<BucketKind> parse_bucket_kind(std::string_view text);

struct AggregationSpec {
  Granularity granularity = Granularity::kAccount;
  BucketKind bucket = BucketKind::kIsoWeek;

  auto operator<=>(const AggregationSpec&) const = default;
};

// Node id of one side of a record under the chosen granularity.
const std::string& node_of(const TransactionRecord& r, Granularity g, bool sender);

struct IntervalId {
  std::string label;       // "2022-02-24" | "2022-W08" | "2022-02"
  std::int64_t ordinal = 0;

  bool operator==(const IntervalId&) const = default;
};

// Absolute bucket number: days since 1970-01-01, ISO weeks since the week of
// 1969-12-29, or months since 1970-01. Consecutive buckets differ by one.
std::int64_t bucket_serial(Timestamp ts, BucketKind kind);
std::string bucket_label(std::int64_t serial, BucketKind kind);
std::optional<std::int64_t> parse_bucket_label(std::string_view label, BucketKind kind);
// First instant of the bucket (UTC).
Timestamp bucket_start(std::int64_t serial, BucketKind kind);

// Ordinal is the absolute serial; build_networks rebases ordinals so the
// first interval of a dataset is 0.
IntervalId bucket_of(Timestamp ts, BucketKind kind);

// Weighted directed simple graph of one interval. Nodes are kept sorted by
// id, so node indices and out-neighbor lists are in ascending id order.
class TemporalNetwork {
 public:
  struct Edge {
    std::string src;
    std::string dst;
    Weight weight = 0;

    bool operator==(const Edge&) const = default;
  };

  TemporalNetwork() = default;

  // Duplicate (src, dst) pairs are summed. Self-loops and non-positive
  // weights are rejected.
  static TemporalNetwork from_edges(IntervalId interval, std::span<const Edge> edges);

  const IntervalId& interval() const { return interval_; }

  std::size_t node_count() const { return names_.size(); }
  std::size_t edge_count() const { return targets_.size(); }
  std::size_t max_out_degree() const { return max_out_degree_; }
  bool empty() const { return names_.empty(); }

  const std::vector<std::string>& nodes() const { return names_; }
  const std::string& name(NodeIndex v) const { return names_[v]; }
  std::optional<NodeIndex> index_of(std::string_view id) const;
  bool contains(std::string_view id) const { return index_of(id).has_value(); }

  std::span<const NodeIndex> out_neighbors(NodeIndex v) const {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }
  std::span<const Weight> out_weights(NodeIndex v) const {
    return {weights_.data() + offsets_[v], weights_.data() + offsets_[v + 1]};
  }
  std::optional<Weight> weight(NodeIndex src, NodeIndex dst) const;
  std::optional<Weight> weight(std::string_view src, std::string_view dst) const;

  // Edges sorted by (src, dst).
  std::vector<Edge> edges() const;
  Weight total_weight() const;

  // Header `src,dst,weight`, rows sorted by (src, dst).
  void write_csv(std::ostream& out) const;

 private:
  IntervalId interval_;
  std::vector<std::string> names_;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeIndex> targets_;
  std::vector<Weight> weights_;
  std::size_t max_out_degree_ = 0;
};

// One network per interval from the first to the last bucket touched by the
// records, gaps included as empty networks. Throws on an empty record list.
std::vector<TemporalNetwork> build_networks(std::span<const TransactionRecord> records,
                                            const AggregationSpec& spec);

// Index of the network whose interval label matches, if any.
std::optional<std::size_t> find_interval(std::span<const TemporalNetwork> networks,
                                         std::string_view label);

}  // namespace flowscope
