#include "flowscope/pathfinder.hpp"

#include <algorithm>
#include <optional>

#include "flowscope/error.hpp"

namespace flowscope {
namespace {

void check_max_len(int max_len) {
  if (max_len < 1) {
    throw Error(ErrorKind::kInvalidArgument, "invalid_max_len",
                "max_len must be at least 1, got " + std::to_string(max_len));
  }
}

}  // namespace

PathEnumerator::PathEnumerator(const TemporalNetwork& network, std::string_view seed, int max_len)
    : network_(&network), max_len_(0) {
  check_max_len(max_len);
  max_len_ = static_cast<std::size_t>(max_len);
  const auto root = network.index_of(seed);
  if (!root) {
    return;
  }
  on_path_.assign(network.node_count(), false);
  path_.reserve(max_len_ + 1);
  weights_.reserve(max_len_);
  cursor_.reserve(max_len_ + 1);
  path_.push_back(*root);
  cursor_.push_back(0);
  on_path_[*root] = true;
  calls_ = 1;
}

bool PathEnumerator::next() {
  while (!path_.empty()) {
    const NodeIndex top = path_.back();
    std::size_t& cursor = cursor_.back();
    const auto targets = network_->out_neighbors(top);
    if (weights_.size() < max_len_) {
      while (cursor < targets.size() && on_path_[targets[cursor]]) {
        ++cursor;
      }
      if (cursor < targets.size()) {
        const std::size_t i = cursor++;
        const NodeIndex child = targets[i];
        path_.push_back(child);
        weights_.push_back(network_->out_weights(top)[i]);
        cursor_.push_back(0);
        on_path_[child] = true;
        ++calls_;
        return true;
      }
    }
    // Frame exhausted.
    on_path_[top] = false;
    path_.pop_back();
    cursor_.pop_back();
    if (!weights_.empty()) {
      weights_.pop_back();
    }
  }
  return false;
}

Path PathEnumerator::materialize() const {
  Path p;
  p.nodes.reserve(path_.size());
  for (NodeIndex v : path_) {
    p.nodes.push_back(network_->name(v));
  }
  p.edge_weights.assign(weights_.begin(), weights_.end());
  p.interval = network_->interval();
  return p;
}

std::vector<Path> find_paths(const TemporalNetwork& network, std::string_view seed, int max_len) {
  PathEnumerator it(network, seed, max_len);
  std::vector<Path> out;
  while (it.next()) {
    out.push_back(it.materialize());
  }
  return out;
}

std::uint64_t count_calls(const TemporalNetwork& network, std::string_view seed, int max_len) {
  PathEnumerator it(network, seed, max_len);
  while (it.next()) {
  }
  return it.calls();
}

std::vector<Path> brute_force_paths(const TemporalNetwork& network, std::string_view seed,
                                    int max_len) {
  check_max_len(max_len);
  const std::size_t n = network.node_count();
  if (n > kBruteForceNodeLimit) {
    throw Error(ErrorKind::kInvalidArgument, "network_too_large",
                "brute force enumeration is limited to " + std::to_string(kBruteForceNodeLimit) +
                    " nodes, network has " + std::to_string(n));
  }
  std::vector<Path> out;
  if (n == 0) {
    return out;
  }
  const auto& names = network.nodes();
  for (int length = 2; length <= max_len + 1; ++length) {
    std::vector<std::size_t> seq(static_cast<std::size_t>(length), 0);
    bool done = false;
    while (!done) {
      bool keep = names[seq[0]] == seed;
      for (std::size_t i = 0; keep && i < seq.size(); ++i) {
        for (std::size_t j = i + 1; keep && j < seq.size(); ++j) {
          keep = seq[i] != seq[j];
        }
      }
      Path p;
      for (std::size_t i = 0; keep && i + 1 < seq.size(); ++i) {
        const auto w = network.weight(names[seq[i]], names[seq[i + 1]]);
        if (w) {
          p.edge_weights.push_back(*w);
        } else {
          keep = false;
        }
      }
      if (keep) {
        for (std::size_t v : seq) {
          p.nodes.push_back(names[v]);
        }
        p.interval = network.interval();
        out.push_back(std::move(p));
      }
      // Odometer increment over V^length.
      std::size_t pos = seq.size();
      for (;;) {
        if (pos == 0) {
          done = true;
          break;
        }
        --pos;
        if (++seq[pos] < n) {
          break;
        }
        seq[pos] = 0;
      }
    }
  }
  return out;
}

bool temporal_feasibility(std::span<const TransactionRecord> records, const Path& path,
                          const AggregationSpec& spec) {
  if (path.nodes.size() < 2) {
    return false;
  }
  // Timestamps available on each path edge inside the interval.
  std::vector<std::vector<Timestamp>> stamps(path.nodes.size() - 1);
  for (const auto& r : records) {
    if (bucket_label(bucket_serial(r.timestamp, spec.bucket), spec.bucket) != path.interval.label) {
      continue;
    }
    const auto& src = node_of(r, spec.granularity, true);
    const auto& dst = node_of(r, spec.granularity, false);
    for (std::size_t i = 0; i + 1 < path.nodes.size(); ++i) {
      if (path.nodes[i] == src && path.nodes[i + 1] == dst) {
        stamps[i].push_back(r.timestamp);
      }
    }
  }
  // Greedy: taking the earliest admissible record on each edge leaves the
  // most room for the following edges.
  std::optional<Timestamp> previous;
  for (auto& edge : stamps) {
    std::sort(edge.begin(), edge.end());
    const auto it = previous ? std::upper_bound(edge.begin(), edge.end(), *previous) : edge.begin();
    if (it == edge.end()) {
      return false;
    }
    previous = *it;
  }
  return true;
}

}  // namespace flowscope
