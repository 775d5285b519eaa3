#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flowscope/flows.hpp"

namespace flowscope {

// ARIMA-style forecasters would slot in as further methods; only the two
// moving averages are implemented.
enum class ExpectationMethod { kWma, kEwma };
enum class PostCutoffAggregate { kMean, kMax };

std::string_view to_string(ExpectationMethod m);
std::optional<ExpectationMethod> parse_expectation_method(std::string_view text);
std::optional<PostCutoffAggregate> parse_post_cutoff_aggregate(std::string_view text);

struct ExpectationConfig {
  ExpectationMethod method = ExpectationMethod::kWma;
  int window = 8;        // WMA
  double alpha = 0.3;    // EWMA
  double threshold = 0.5;
  PostCutoffAggregate aggregate = PostCutoffAggregate::kMean;

  // Throws on a parameter of the chosen method out of range, or a
  // non-positive threshold.
  void validate() const;
};

// One-step-ahead expectations; entry t never depends on x[t] or later.
// Undefined entries (the warm-up) are nullopt.
using Expectation = std::vector<std::optional<double>>;

// expected[t] = sum_{i=1..w} i * x[t-w-1+i] / sum_{i=1..w} i  for t >= w.
// Requires w >= 2 and at least w + 1 points.
Expectation wma(std::span<const double> series, int window);

// expected[1] = x[0]; expected[t] = alpha * x[t-1] + (1 - alpha) * expected[t-1].
// Requires 0 < alpha <= 1 and at least 2 points.
Expectation ewma(std::span<const double> series, double alpha);

Expectation expectation(std::span<const double> series, const ExpectationConfig& config);

// (actual - expected) / expected. Zero over zero is 0; a positive actual
// over a zero expectation is +infinity. Negative expectations throw.
double pct_deviation(double actual, double expected);

enum class Direction { kPositive, kNegative };
std::string_view to_string(Direction d);

struct AnomalyFlag {
  IntervalId interval;
  Weight actual = 0;
  double expected = 0;
  double deviation = 0;
  Direction direction = Direction::kPositive;
};

// Fills series.expected / series.deviation and returns one flag per interval
// whose |deviation| exceeds the threshold.
std::vector<AnomalyFlag> flag_anomalies(FlowSeries& series, const ExpectationConfig& config);

void write_flags(std::ostream& out, std::span<const AnomalyFlag> flags);

struct IntermediaryRankingRow {
  std::string node;
  double difference = 0;  // aggregate post-cutoff deviation; +inf when newly active
  std::size_t n_intervals_post_cutoff = 0;
  std::size_t n_infinite = 0;  // post-cutoff intervals left out of the aggregate
  bool newly_active = false;

  bool operator==(const IntermediaryRankingRow&) const = default;
};

struct IntermediaryRanking {
  // Sorted by difference descending, then node ascending.
  std::vector<IntermediaryRankingRow> rows;
  // Intermediaries without usable history (no pre-cutoff through-flow, or
  // no finite post-cutoff deviation), sorted by node.
  std::vector<IntermediaryRankingRow> newly_active;
};

// Ranks every interior node of Flow^max_len(source, sink) seen in any
// interval by its mean through-flow deviation over the intervals at or after
// `cutoff`. The baseline is the moving-average forecast for the cutoff
// interval, computed from the pre-cutoff history alone. Needs at least
// config.window intervals before the cutoff.
IntermediaryRanking rank_intermediaries(std::span<const TemporalNetwork> networks,
                                        std::string_view source, std::string_view sink,
                                        int max_len, std::string_view cutoff,
                                        const ExpectationConfig& config);

// Header `node,difference,n_intervals_post_cutoff,newly_active_flag`;
// ranked rows first, then newly active ones.
void write_ranking(std::ostream& out, const IntermediaryRanking& ranking);

// Divides by the series maximum. Throws when no value is positive.
std::vector<double> normalize_series(std::span<const double> series);

}  // namespace flowscope
