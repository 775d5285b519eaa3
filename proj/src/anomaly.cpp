#include "flowscope/anomaly.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>

#include "flowscope/csv.hpp"
#include "flowscope/error.hpp"

namespace flowscope {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

void check_window(int window) {
  if (window < 2) {
    throw Error(ErrorKind::kInvalidArgument, "invalid_window",
                "WMA window must be at least 2, got " + std::to_string(window));
  }
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "invalid_alpha",
                "EWMA alpha must lie in (0, 1], got " + csv::format_double(alpha));
  }
}

}  // namespace

std::string_view to_string(ExpectationMethod m) {
  return m == ExpectationMethod::kWma ? "WMA" : "EWMA";
}

std::optional<ExpectationMethod> parse_expectation_method(std::string_view text) {
  const std::string l = lower(text);
  if (l == "wma") return ExpectationMethod::kWma;
  if (l == "ewma") return ExpectationMethod::kEwma;
  return std::nullopt;
}

std::optional<PostCutoffAggregate> parse_post_cutoff_aggregate(std::string_view text) {
  const std::string l = lower(text);
  if (l == "mean") return PostCutoffAggregate::kMean;
  if (l == "max") return PostCutoffAggregate::kMax;
  return std::nullopt;
}

void ExpectationConfig::validate() const {
  if (method == ExpectationMethod::kWma) {
    check_window(window);
  } else {
    check_alpha(alpha);
  }
  if (!(threshold > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "invalid_threshold",
                "threshold must be positive, got " + csv::format_double(threshold));
  }
}

Expectation wma(std::span<const double> series, int window) {
  check_window(window);
  const auto w = static_cast<std::size_t>(window);
  if (series.size() < w + 1) {
    throw Error(ErrorKind::kPrecondition, "series_too_short",
                "WMA with window " + std::to_string(w) + " needs at least " +
                    std::to_string(w + 1) + " points, got " + std::to_string(series.size()));
  }
  const double denominator = static_cast<double>(w * (w + 1) / 2);
  Expectation out(series.size());
  for (std::size_t t = w; t < series.size(); ++t) {
    double numerator = 0;
    for (std::size_t i = 1; i <= w; ++i) {
      numerator += static_cast<double>(i) * series[t - w - 1 + i];
    }
    out[t] = numerator / denominator;
  }
  return out;
}

Expectation ewma(std::span<const double> series, double alpha) {
  check_alpha(alpha);
  if (series.size() < 2) {
    throw Error(ErrorKind::kPrecondition, "series_too_short",
                "EWMA needs at least 2 points, got " + std::to_string(series.size()));
  }
  Expectation out(series.size());
  double e = series[0];
  out[1] = e;
  for (std::size_t t = 2; t < series.size(); ++t) {
    // Incremental form keeps a constant series an exact fixed point.
    e += alpha * (series[t - 1] - e);
    out[t] = e;
  }
  return out;
}

Expectation expectation(std::span<const double> series, const ExpectationConfig& config) {
  return config.method == ExpectationMethod::kWma ? wma(series, config.window)
                                                  : ewma(series, config.alpha);
}

double pct_deviation(double actual, double expected) {
  if (expected < 0.0 || std::isnan(expected)) {
    throw Error(ErrorKind::kInvalidArgument, "negative_expectation",
                "expected value must be non-negative, got " + csv::format_double(expected));
  }
  if (expected == 0.0) {
    if (actual == 0.0) {
      return 0.0;
    }
    return actual > 0.0 ? kInf : -kInf;
  }
  return (actual - expected) / expected;
}

std::string_view to_string(Direction d) {
  return d == Direction::kPositive ? "positive" : "negative";
}

std::vector<AnomalyFlag> flag_anomalies(FlowSeries& series, const ExpectationConfig& config) {
  config.validate();
  const auto values = series.values();
  Expectation expected = expectation(values, config);
  std::vector<std::optional<double>> deviation(values.size());
  std::vector<AnomalyFlag> flags;
  for (std::size_t t = 0; t < values.size(); ++t) {
    if (!expected[t]) {
      continue;
    }
    const double d = pct_deviation(values[t], *expected[t]);
    deviation[t] = d;
    if (std::abs(d) > config.threshold) {
      flags.push_back({series.points[t].interval, series.points[t].weight, *expected[t], d,
                       d > 0 ? Direction::kPositive : Direction::kNegative});
    }
  }
  series.expected = std::move(expected);
  series.deviation = std::move(deviation);
  return flags;
}

void write_flags(std::ostream& out, std::span<const AnomalyFlag> flags) {
  csv::write_row(out, {"interval", "actual", "expected", "deviation", "direction"});
  for (const auto& f : flags) {
    csv::write_row(out, {f.interval.label, std::to_string(f.actual), csv::format_double(f.expected),
                         csv::format_double(f.deviation), std::string(to_string(f.direction))});
  }
}

IntermediaryRanking rank_intermediaries(std::span<const TemporalNetwork> networks,
                                        std::string_view source, std::string_view sink,
                                        int max_len, std::string_view cutoff,
                                        const ExpectationConfig& config) {
  config.validate();
  const auto cut = find_interval(networks, cutoff);
  if (!cut) {
    throw Error(ErrorKind::kPrecondition, "cutoff_out_of_range",
                "cutoff interval '" + std::string(cutoff) + "' is not in the dataset range");
  }
  const std::size_t c = *cut;
  if (c == 0) {
    throw Error(ErrorKind::kPrecondition, "insufficient_history",
                "cutoff '" + std::string(cutoff) + "' leaves no history before it");
  }
  if (c < static_cast<std::size_t>(config.window)) {
    throw Error(ErrorKind::kPrecondition, "insufficient_history",
                "cutoff '" + std::string(cutoff) + "' leaves " + std::to_string(c) +
                    " intervals of history, at least " + std::to_string(config.window) +
                    " required");
  }

  const std::size_t len = networks.size();
  std::map<std::string, std::vector<double>> through;
  for (std::size_t t = 0; t < len; ++t) {
    for (const auto& [node, w] : through_weights(networks[t], source, sink, max_len)) {
      auto& series = through[node];
      series.resize(len, 0.0);
      series[t] = static_cast<double>(w);
    }
  }

  IntermediaryRanking ranking;
  for (const auto& [node, series] : through) {
    // The expectation is fitted on history only: the forecast made at the
    // cutoff serves as the baseline for every post-cutoff interval.
    const std::span<const double> history(series.data(), c + 1);
    const double baseline = *expectation(history, config)[c];
    IntermediaryRankingRow row{node, 0.0, len - c, 0, false};
    const bool silent_history =
        std::all_of(series.begin(), series.begin() + static_cast<std::ptrdiff_t>(c),
                    [](double v) { return v == 0.0; });
    std::size_t finite = 0;
    double sum = 0;
    double max = -kInf;
    for (std::size_t t = c; t < len; ++t) {
      const double d = pct_deviation(series[t], baseline);
      if (std::isinf(d)) {
        ++row.n_infinite;
        continue;
      }
      ++finite;
      sum += d;
      max = std::max(max, d);
    }
    if (silent_history || finite == 0) {
      row.newly_active = true;
      row.difference = kInf;
      ranking.newly_active.push_back(std::move(row));
      continue;
    }
    row.difference =
        config.aggregate == PostCutoffAggregate::kMean ? sum / static_cast<double>(finite) : max;
    ranking.rows.push_back(std::move(row));
  }
  std::sort(ranking.rows.begin(), ranking.rows.end(), [](const auto& a, const auto& b) {
    if (a.difference != b.difference) {
      return a.difference > b.difference;
    }
    return a.node < b.node;
  });
  return ranking;
}

void write_ranking(std::ostream& out, const IntermediaryRanking& ranking) {
  csv::write_row(out, {"node", "difference", "n_intervals_post_cutoff", "newly_active_flag"});
  auto emit = [&](const IntermediaryRankingRow& r) {
    csv::write_row(out, {r.node, csv::format_double(r.difference),
                         std::to_string(r.n_intervals_post_cutoff), r.newly_active ? "1" : "0"});
  };
  for (const auto& r : ranking.rows) emit(r);
  for (const auto& r : ranking.newly_active) emit(r);
}

std::vector<double> normalize_series(std::span<const double> series) {
  const auto peak = std::max_element(series.begin(), series.end());
  if (peak == series.end() || !(*peak > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "no_positive_value",
                "cannot normalize a series without a positive value");
  }
  std::vector<double> out;
  out.reserve(series.size());
  for (double v : series) {
    out.push_back(v / *peak);
  }
  return out;
}

}  // namespace flowscope
