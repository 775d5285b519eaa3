#include "flowscope/service.hpp"

#include <httplib.h>

#include <charconv>
#include <cmath>
#include <cstdlib>

#include "flowscope/anomaly.hpp"
#include "flowscope/error.hpp"
#include "flowscope/flows.hpp"

namespace flowscope {
namespace {

using nlohmann::json;

std::optional<std::string> get(const QueryParams& params, const std::string& key) {
  const auto it = params.find(key);
  if (it == params.end()) {
    return std::nullopt;
  }
  return it->second;
}

[[noreturn]] void bad_request(const std::string& reason, const std::string& message) {
  throw Error(ErrorKind::kInvalidArgument, reason, message);
}

std::string required(const QueryParams& params, const std::string& key) {
  auto value = get(params, key);
  if (!value || value->empty()) {
    bad_request("missing_parameter", "query parameter '" + key + "' is required");
  }
  return *value;
}

long long parse_integer(const std::string& key, const std::string& text) {
  long long value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    bad_request("invalid_parameter", "query parameter '" + key + "' must be an integer");
  }
  return value;
}

double parse_real(const std::string& key, const std::string& text) {
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || std::isnan(value)) {
    bad_request("invalid_parameter", "query parameter '" + key + "' must be a number");
  }
  return value;
}

int max_len_of(const QueryParams& params) {
  const long long n = parse_integer("n", required(params, "n"));
  if (n < 1 || n > 16) {
    bad_request("invalid_parameter", "query parameter 'n' must lie in 1..16");
  }
  return static_cast<int>(n);
}

ExpectationConfig config_of(const QueryParams& params) {
  ExpectationConfig config;
  if (auto m = get(params, "method")) {
    const auto method = parse_expectation_method(*m);
    if (!method) bad_request("invalid_parameter", "method must be WMA or EWMA");
    config.method = *method;
  }
  if (auto w = get(params, "window")) {
    const long long window = parse_integer("window", *w);
    if (window < 2 || window > 100000) bad_request("invalid_parameter", "window must lie in 2..100000");
    config.window = static_cast<int>(window);
  }
  if (auto a = get(params, "alpha")) config.alpha = parse_real("alpha", *a);
  if (auto t = get(params, "threshold")) config.threshold = parse_real("threshold", *t);
  if (auto g = get(params, "aggregate")) {
    const auto aggregate = parse_post_cutoff_aggregate(*g);
    if (!aggregate) bad_request("invalid_parameter", "aggregate must be mean or max");
    config.aggregate = *aggregate;
  }
  config.validate();
  return config;
}

json number(double v) {
  if (std::isfinite(v)) {
    return v;
  }
  return v > 0 ? "inf" : "-inf";
}

json optional_column(const std::optional<std::vector<std::optional<double>>>& column) {
  if (!column) {
    return nullptr;
  }
  json out = json::array();
  for (const auto& v : *column) {
    out.push_back(v ? number(*v) : json(nullptr));
  }
  return out;
}

json series_json(const FlowSeries& s) {
  json points = json::array();
  for (const auto& p : s.points) {
    points.push_back({{"interval", p.interval.label}, {"weight", p.weight}});
  }
  return {{"source", s.source},
          {"sink", s.sink},
          {"max_len", s.max_len},
          {"points", points},
          {"expected", optional_column(s.expected)},
          {"deviation", optional_column(s.deviation)}};
}

json row_json(const PathTableRow& r) {
  return {{"interval", r.interval},
          {"nodes", r.nodes},
          {"edge_weights", r.edge_weights},
          {"terminal", r.terminal},
          {"min_weight", r.min_weight}};
}

json ranking_row_json(const IntermediaryRankingRow& r) {
  return {{"node", r.node},
          {"difference", number(r.difference)},
          {"n_intervals_post_cutoff", r.n_intervals_post_cutoff},
          {"n_infinite", r.n_infinite},
          {"newly_active", r.newly_active}};
}

json config_json(const ExpectationConfig& c) {
  return {{"method", to_string(c.method)},
          {"window", c.window},
          {"alpha", c.alpha},
          {"threshold", number(c.threshold)}};
}

Response error_response(const Error& e) {
  int status = 500;
  switch (e.kind()) {
    case ErrorKind::kInvalidArgument:
      status = 400;
      break;
    case ErrorKind::kNotFound:
      status = 404;
      break;
    case ErrorKind::kPrecondition:
      status = 422;
      break;
    case ErrorKind::kData:
      status = 500;
      break;
  }
  return {status, {{"error", {{"status", status}, {"reason", e.reason()}, {"message", e.what()}}}}};
}

}  // namespace

QueryService::QueryService(std::shared_ptr<const DatasetSnapshot> snapshot, ServiceOptions options)
    : snapshot_(std::move(snapshot)), options_(options) {}

Response QueryService::handle(std::string_view path, const QueryParams& params) const {
  try {
    if (path == "/meta") return meta();
    if (path == "/paths") return paths(params);
    if (path == "/flow/series") return flow_series(params);
    if (path == "/flow/intermediaries") return intermediaries(params);
    if (path == "/flow/through") return through(params);
    if (path == "/edge/series") return edge(params);
    return error_response(
        Error(ErrorKind::kNotFound, "unknown_endpoint", "no endpoint " + std::string(path)));
  } catch (const Error& e) {
    return error_response(e);
  }
}

AggregationSpec QueryService::spec_of(const QueryParams& params) const {
  AggregationSpec spec = options_.default_spec;
  if (auto g = get(params, "granularity")) {
    const auto parsed = parse_granularity(*g);
    if (!parsed) bad_request("invalid_parameter", "unknown granularity '" + *g + "'");
    spec.granularity = *parsed;
  }
  if (auto b = get(params, "bucket")) {
    const auto parsed = parse_bucket_kind(*b);
    if (!parsed) bad_request("invalid_parameter", "unknown bucket '" + *b + "'");
    spec.bucket = *parsed;
  }
  return spec;
}

void QueryService::require_entity(const AggregationSpec& spec, const std::string& id) const {
  if (!snapshot_->has_entity(spec, id)) {
    throw Error(ErrorKind::kNotFound, "unknown_entity",
                "entity '" + id + "' does not occur at " + std::string(to_string(spec.granularity)) +
                    " granularity");
  }
}

QueryService::PathList QueryService::cached_paths(const AggregationSpec& spec, std::size_t interval,
                                                  const std::string& seed, int max_len) const {
  CacheKey key{static_cast<int>(spec.granularity), static_cast<int>(spec.bucket), seed, max_len,
               interval};
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = cache_index_.find(key); it != cache_index_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second);
      return it->second->second;
    }
  }
  // Enumerate outside the lock so slow queries do not block others.
  auto list = std::make_shared<const std::vector<Path>>(
      find_paths(snapshot_->networks(spec)[interval], seed, max_len));
  if (options_.cache_capacity == 0) {
    return list;
  }
  std::lock_guard lock(cache_mutex_);
  if (auto it = cache_index_.find(key); it != cache_index_.end()) {
    return it->second->second;
  }
  lru_.emplace_front(key, list);
  cache_index_[key] = lru_.begin();
  while (lru_.size() > options_.cache_capacity) {
    cache_index_.erase(lru_.back().first);
    lru_.pop_back();
  }
  return list;
}

std::size_t QueryService::cache_size() const {
  std::lock_guard lock(cache_mutex_);
  return lru_.size();
}

Response QueryService::meta() const {
  const auto& m = snapshot_->metadata();
  json intervals = json::object();
  for (BucketKind b : {BucketKind::kDay, BucketKind::kIsoWeek, BucketKind::kCalendarMonth}) {
    const auto first = bucket_serial(m.first_timestamp, b);
    const auto last = bucket_serial(m.last_timestamp, b);
    intervals[std::string(to_string(b))] = {{"first", bucket_label(first, b)},
                                            {"last", bucket_label(last, b)},
                                            {"count", last - first + 1}};
  }
  return {200,
          {{"record_count", m.record_count},
           {"rejected_rows", m.rejected_rows},
           {"currency", m.currency},
           {"checksum", m.checksum},
           {"pseudonym_map", m.pseudonym_map ? json(m.pseudonym_map->filename().string()) : json(nullptr)},
           {"first_timestamp", format_timestamp(m.first_timestamp)},
           {"last_timestamp", format_timestamp(m.last_timestamp)},
           {"granularities", {"ACCOUNT", "INSTITUTION", "COUNTRY"}},
           {"buckets", {"DAY", "ISO_WEEK", "CALENDAR_MONTH"}},
           {"default_aggregation",
            {{"granularity", to_string(options_.default_spec.granularity)},
             {"bucket", to_string(options_.default_spec.bucket)}}},
           {"intervals", intervals}}};
}

Response QueryService::paths(const QueryParams& params) const {
  const AggregationSpec spec = spec_of(params);
  const std::string seed = required(params, "seed");
  const int max_len = max_len_of(params);
  const auto dst = get(params, "dst");
  std::size_t page = 0;
  std::size_t page_size = options_.default_page_size;
  if (auto p = get(params, "page")) {
    const long long v = parse_integer("page", *p);
    if (v < 0) bad_request("invalid_parameter", "page must be non-negative");
    page = static_cast<std::size_t>(v);
  }
  if (auto p = get(params, "page_size")) {
    const long long v = parse_integer("page_size", *p);
    if (v < 1 || static_cast<std::size_t>(v) > options_.max_page_size) {
      bad_request("invalid_parameter",
                  "page_size must lie in 1.." + std::to_string(options_.max_page_size));
    }
    page_size = static_cast<std::size_t>(v);
  }

  require_entity(spec, seed);
  if (dst) require_entity(spec, *dst);
  const auto& networks = snapshot_->networks(spec);
  std::vector<std::size_t> selected;
  if (auto label = get(params, "interval")) {
    const auto idx = find_interval(networks, *label);
    if (!idx) {
      throw Error(ErrorKind::kNotFound, "unknown_interval",
                  "interval '" + *label + "' is not in the dataset");
    }
    selected.push_back(*idx);
  } else {
    for (std::size_t i = 0; i < networks.size(); ++i) selected.push_back(i);
  }

  const std::size_t begin = page * page_size;
  const std::size_t end = begin + page_size;
  std::size_t total = 0;
  json rows = json::array();
  for (std::size_t idx : selected) {
    const auto list = cached_paths(spec, idx, seed, max_len);
    for (const auto& p : *list) {
      if (dst && p.terminal() != *dst) continue;
      if (total >= begin && total < end) rows.push_back(row_json(to_row(p)));
      ++total;
    }
  }
  return {200,
          {{"seed", seed},
           {"max_len", max_len},
           {"dst", dst ? json(*dst) : json(nullptr)},
           {"total_rows", total},
           {"page", page},
           {"page_size", page_size},
           {"rows", rows}}};
}

Response QueryService::flow_series(const QueryParams& params) const {
  const AggregationSpec spec = spec_of(params);
  const std::string src = required(params, "src");
  const std::string dst = required(params, "dst");
  const int max_len = max_len_of(params);
  const ExpectationConfig config = config_of(params);
  require_entity(spec, src);
  require_entity(spec, dst);
  FlowSeries series = flowscope::flow_series(snapshot_->networks(spec), src, dst, max_len);
  config.validate();
  // Too few intervals for the method: the series is still returned, just
  // without expectations or flags.
  std::vector<AnomalyFlag> flags;
  bool flagged = true;
  try {
    flags = flag_anomalies(series, config);
  } catch (const Error& e) {
    if (e.reason() != "series_too_short") throw;
    flagged = false;
  }
  json flag_rows = json::array();
  for (const auto& f : flags) {
    flag_rows.push_back({{"interval", f.interval.label},
                         {"actual", f.actual},
                         {"expected", number(f.expected)},
                         {"deviation", number(f.deviation)},
                         {"direction", to_string(f.direction)}});
  }
  return {200,
          {{"series", series_json(series)},
           {"flags", flag_rows},
           {"flags_available", flagged},
           {"config", config_json(config)}}};
}

Response QueryService::intermediaries(const QueryParams& params) const {
  const AggregationSpec spec = spec_of(params);
  const std::string src = required(params, "src");
  const std::string dst = required(params, "dst");
  const int max_len = max_len_of(params);
  const std::string cutoff = required(params, "cutoff");
  const ExpectationConfig config = config_of(params);
  require_entity(spec, src);
  require_entity(spec, dst);
  const auto ranking =
      rank_intermediaries(snapshot_->networks(spec), src, dst, max_len, cutoff, config);
  json rows = json::array();
  for (const auto& r : ranking.rows) rows.push_back(ranking_row_json(r));
  json fresh = json::array();
  for (const auto& r : ranking.newly_active) fresh.push_back(ranking_row_json(r));
  return {200,
          {{"source", src},
           {"sink", dst},
           {"max_len", max_len},
           {"cutoff", cutoff},
           {"rows", rows},
           {"newly_active", fresh},
           {"config", config_json(config)}}};
}

Response QueryService::through(const QueryParams& params) const {
  const AggregationSpec spec = spec_of(params);
  const std::string src = required(params, "src");
  const std::string dst = required(params, "dst");
  const int max_len = max_len_of(params);
  const std::string via = required(params, "via");
  require_entity(spec, src);
  require_entity(spec, dst);
  require_entity(spec, via);
  const auto series = through_series(snapshot_->networks(spec), src, dst, max_len, via);
  return {200, {{"via", via}, {"series", series_json(series)}}};
}

Response QueryService::edge(const QueryParams& params) const {
  const AggregationSpec spec = spec_of(params);
  const std::string src = required(params, "src");
  const std::string dst = required(params, "dst");
  require_entity(spec, src);
  require_entity(spec, dst);
  return {200, {{"series", series_json(edge_series(snapshot_->networks(spec), src, dst))}}};
}

HttpServer::HttpServer(const QueryService& service)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  server_->Get(R"(/.*)", [this](const httplib::Request& req, httplib::Response& res) {
    QueryParams params(req.params.begin(), req.params.end());
    const Response r = service_.handle(req.path, params);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = server_->bind_to_any_port(host);
  } else if (!server_->bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) {
    throw Error(ErrorKind::kData, "bind_failed",
                "cannot bind " + host + ":" + std::to_string(port));
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

void HttpServer::listen(const std::string& host, int port) {
  if (!server_->listen(host, port)) {
    throw Error(ErrorKind::kData, "bind_failed",
                "cannot listen on " + host + ":" + std::to_string(port));
  }
}

void HttpServer::stop() {
  if (server_) {
    server_->stop();
  }
  if (thread_.joinable()) {
    thread_.join();
  }
}

}  // namespace flowscope
