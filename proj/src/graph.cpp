#include "flowscope/graph.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

#include "flowscope/csv.hpp"
#include "flowscope/error.hpp"

namespace flowscope {
namespace {

using namespace std::chrono;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) {
    --q;
  }
  return q;
}

std::string upper(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

bool parse_digits(std::string_view text, int& out) {
  if (text.empty()) {
    return false;
  }
  int value = 0;
  for (char c : text) {
    if (c < '0' || c > '9') {
      return false;
    }
    value = value * 10 + (c - '0');
  }
  out = value;
  return true;
}

}  // namespace

std::string_view to_string(Granularity g) {
  switch (g) {
    case Granularity::kAccount:
      return "ACCOUNT";
    case Granularity::kInstitution:
      return "INSTITUTION";
    case Granularity::kCountry:
      return "COUNTRY";
  }
  return "?";
}

std::string_view to_string(BucketKind b) {
  switch (b) {
    case BucketKind::kDay:
      return "DAY";
    case BucketKind::kIsoWeek:
      return "ISO_WEEK";
    case BucketKind::kCalendarMonth:
      return "CALENDAR_MONTH";
  }
  return "?";
}

std::optional<Granularity> parse_granularity(std::string_view text) {
  const std::string u = upper(text);
  if (u == "ACCOUNT" || u == "IBAN") return Granularity::kAccount;
  if (u == "INSTITUTION" || u == "BIC") return Granularity::kInstitution;
  if (u == "COUNTRY" || u == "ISO") return Granularity::kCountry;
  return std::nullopt;
}

std::optional<BucketKind> parse_bucket_kind(std::string_view text) {
  const std::string u = upper(text);
  if (u == "DAY") return BucketKind::kDay;
  if (u == "ISO_WEEK" || u == "WEEK") return BucketKind::kIsoWeek;
  if (u == "CALENDAR_MONTH" || u == "MONTH") return BucketKind::kCalendarMonth;
  return std::nullopt;
}

const std::string& node_of(const TransactionRecord& r, Granularity g, bool sender) {
  switch (g) {
    case Granularity::kAccount:
      return sender ? r.sender_account : r.receiver_account;
    case Granularity::kInstitution:
      return sender ? r.sender_institution : r.receiver_institution;
    case Granularity::kCountry:
      break;
  }
  return sender ? r.sender_country : r.receiver_country;
}

std::int64_t bucket_serial(Timestamp ts, BucketKind kind) {
  const std::int64_t day_number = floor<days>(ts).time_since_epoch().count();
  switch (kind) {
    case BucketKind::kDay:
      return day_number;
    case BucketKind::kIsoWeek:
      // 1970-01-01 is a Thursday; its ISO week starts on 1969-12-29 (day -3).
      return floor_div(day_number + 3, 7);
    case BucketKind::kCalendarMonth: {
      const year_month_day date{sys_days{days{day_number}}};
      return (static_cast<int>(date.year()) - 1970) * 12 +
             static_cast<int>(static_cast<unsigned>(date.month())) - 1;
    }
  }
  return 0;
}

Timestamp bucket_start(std::int64_t serial, BucketKind kind) {
  switch (kind) {
    case BucketKind::kDay:
      return sys_days{days{serial}};
    case BucketKind::kIsoWeek:
      return sys_days{days{serial * 7 - 3}};
    case BucketKind::kCalendarMonth: {
      const std::int64_t y = 1970 + floor_div(serial, 12);
      const unsigned m = static_cast<unsigned>(serial - floor_div(serial, 12) * 12) + 1;
      return sys_days{year{static_cast<int>(y)} / month{m} / day{1}};
    }
  }
  return {};
}

std::string bucket_label(std::int64_t serial, BucketKind kind) {
  char buf[32];
  switch (kind) {
    case BucketKind::kDay: {
      const year_month_day date{sys_days{days{serial}}};
      std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                    static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
      break;
    }
    case BucketKind::kIsoWeek: {
      // The ISO week-year is the calendar year of the week's Thursday.
      const sys_days thursday{days{serial * 7}};
      const year_month_day date{thursday};
      const sys_days jan1{date.year() / January / 1};
      const auto week = (thursday - jan1).count() / 7 + 1;
      std::snprintf(buf, sizeof buf, "%04d-W%02d", static_cast<int>(date.year()),
                    static_cast<int>(week));
      break;
    }
    case BucketKind::kCalendarMonth: {
      const year_month_day date{floor<days>(bucket_start(serial, kind))};
      std::snprintf(buf, sizeof buf, "%04d-%02u", static_cast<int>(date.year()),
                    static_cast<unsigned>(date.month()));
      break;
    }
  }
  return buf;
}

std::optional<std::int64_t> parse_bucket_label(std::string_view label, BucketKind kind) {
  int y = 0, a = 0, b = 0;
  std::optional<std::int64_t> serial;
  switch (kind) {
    case BucketKind::kDay:
      if (label.size() == 10 && label[4] == '-' && label[7] == '-' &&
          parse_digits(label.substr(0, 4), y) && parse_digits(label.substr(5, 2), a) &&
          parse_digits(label.substr(8, 2), b)) {
        const year_month_day date{year{y}, month{static_cast<unsigned>(a)},
                                  day{static_cast<unsigned>(b)}};
        if (date.ok()) {
          serial = sys_days{date}.time_since_epoch().count();
        }
      }
      break;
    case BucketKind::kIsoWeek:
      if (label.size() == 8 && label[4] == '-' && label[5] == 'W' &&
          parse_digits(label.substr(0, 4), y) && parse_digits(label.substr(6, 2), a) && a >= 1 &&
          a <= 53) {
        const sys_days jan4{year{y} / January / 4};
        const auto offset = (weekday{jan4} - Monday).count();
        const sys_days monday = jan4 - days{offset};
        serial = floor_div(monday.time_since_epoch().count() + 3, 7) + a - 1;
      }
      break;
    case BucketKind::kCalendarMonth:
      if (label.size() == 7 && label[4] == '-' && parse_digits(label.substr(0, 4), y) &&
          parse_digits(label.substr(5, 2), a) && a >= 1 && a <= 12) {
        serial = static_cast<std::int64_t>(y - 1970) * 12 + a - 1;
      }
      break;
  }
  // Rejects e.g. week 53 of a 52-week year.
  if (serial && bucket_label(*serial, kind) != label) {
    return std::nullopt;
  }
  return serial;
}

IntervalId bucket_of(Timestamp ts, BucketKind kind) {
  const std::int64_t serial = bucket_serial(ts, kind);
  return {bucket_label(serial, kind), serial};
}

TemporalNetwork TemporalNetwork::from_edges(IntervalId interval, std::span<const Edge> edges) {
  std::map<std::pair<std::string, std::string>, Weight> summed;
  for (const auto& e : edges) {
    if (e.src == e.dst) {
      throw Error(ErrorKind::kInvalidArgument, "self_loop", "self-loop on node '" + e.src + "'");
    }
    if (e.weight <= 0) {
      throw Error(ErrorKind::kInvalidArgument, "non_positive_weight",
                  "edge " + e.src + "->" + e.dst + " has non-positive weight");
    }
    summed[{e.src, e.dst}] += e.weight;
  }

  TemporalNetwork net;
  net.interval_ = std::move(interval);
  for (const auto& [key, w] : summed) {
    net.names_.push_back(key.first);
    net.names_.push_back(key.second);
  }
  std::sort(net.names_.begin(), net.names_.end());
  net.names_.erase(std::unique(net.names_.begin(), net.names_.end()), net.names_.end());

  net.offsets_.assign(net.names_.size() + 1, 0);
  net.targets_.reserve(summed.size());
  net.weights_.reserve(summed.size());
  // `summed` iterates in (src, dst) order, which is index order too.
  for (const auto& [key, w] : summed) {
    const NodeIndex src = *net.index_of(key.first);
    net.offsets_[src + 1]++;
    net.targets_.push_back(*net.index_of(key.second));
    net.weights_.push_back(w);
  }
  for (std::size_t v = 0; v < net.names_.size(); ++v) {
    net.max_out_degree_ = std::max(net.max_out_degree_, net.offsets_[v + 1]);
    net.offsets_[v + 1] += net.offsets_[v];
  }
  return net;
}

std::optional<NodeIndex> TemporalNetwork::index_of(std::string_view id) const {
  const auto it = std::lower_bound(names_.begin(), names_.end(), id);
  if (it == names_.end() || *it != id) {
    return std::nullopt;
  }
  return static_cast<NodeIndex>(it - names_.begin());
}

std::optional<Weight> TemporalNetwork::weight(NodeIndex src, NodeIndex dst) const {
  const auto targets = out_neighbors(src);
  const auto it = std::lower_bound(targets.begin(), targets.end(), dst);
  if (it == targets.end() || *it != dst) {
    return std::nullopt;
  }
  return out_weights(src)[static_cast<std::size_t>(it - targets.begin())];
}

std::optional<Weight> TemporalNetwork::weight(std::string_view src, std::string_view dst) const {
  const auto s = index_of(src);
  const auto d = index_of(dst);
  if (!s || !d) {
    return std::nullopt;
  }
  return weight(*s, *d);
}

std::vector<TemporalNetwork::Edge> TemporalNetwork::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (NodeIndex v = 0; v < names_.size(); ++v) {
    const auto targets = out_neighbors(v);
    const auto weights = out_weights(v);
    for (std::size_t i = 0; i < targets.size(); ++i) {
      out.push_back({names_[v], names_[targets[i]], weights[i]});
    }
  }
  return out;
}

Weight TemporalNetwork::total_weight() const {
  Weight total = 0;
  for (Weight w : weights_) {
    total += w;
  }
  return total;
}

void TemporalNetwork::write_csv(std::ostream& out) const {
  csv::write_row(out, {"src", "dst", "weight"});
  for (const auto& e : edges()) {
    csv::write_row(out, {e.src, e.dst, std::to_string(e.weight)});
  }
}

std::vector<TemporalNetwork> build_networks(std::span<const TransactionRecord> records,
                                            const AggregationSpec& spec) {
  if (records.empty()) {
    throw Error(ErrorKind::kData, "no_records", "cannot build networks from an empty record list");
  }
  std::vector<std::int64_t> serials;
  serials.reserve(records.size());
  std::int64_t first = 0;
  std::int64_t last = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::int64_t s = bucket_serial(records[i].timestamp, spec.bucket);
    serials.push_back(s);
    first = i == 0 ? s : std::min(first, s);
    last = i == 0 ? s : std::max(last, s);
  }

  const auto count = static_cast<std::size_t>(last - first + 1);
  std::vector<std::map<std::pair<std::string, std::string>, Weight>> buckets(count);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& src = node_of(records[i], spec.granularity, true);
    const auto& dst = node_of(records[i], spec.granularity, false);
    if (src == dst || records[i].amount == 0) {
      continue;
    }
    buckets[static_cast<std::size_t>(serials[i] - first)][{src, dst}] += records[i].amount;
  }

  std::vector<TemporalNetwork> networks;
  networks.reserve(count);
  std::vector<TemporalNetwork::Edge> edges;
  for (std::size_t k = 0; k < count; ++k) {
    edges.clear();
    for (auto& [key, w] : buckets[k]) {
      edges.push_back({key.first, key.second, w});
    }
    const auto serial = first + static_cast<std::int64_t>(k);
    networks.push_back(TemporalNetwork::from_edges(
        {bucket_label(serial, spec.bucket), static_cast<std::int64_t>(k)}, edges));
  }
  return networks;
}

std::optional<std::size_t> find_interval(std::span<const TemporalNetwork> networks,
                                         std::string_view label) {
  for (std::size_t i = 0; i < networks.size(); ++i) {
    if (networks[i].interval().label == label) {
      return i;
    }
  }
  return std::nullopt;
}

}  // namespace flowscope
