#pragma once

#include <cstdint>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "flowscope/pathfinder.hpp"
#include "flowscope/snapshot.hpp"

namespace httplib {
class Server;
}

namespace flowscope {

using QueryParams = std::multimap<std::string, std::string>;

struct Response {
  int status = 200;
  nlohmann::json body;
};

struct ServiceOptions {
  AggregationSpec default_spec;
  std::size_t cache_capacity = 256;
  std::size_t default_page_size = 100;
  std::size_t max_page_size = 10000;
};

// Read-only query endpoints over one snapshot. handle() is safe to call from
// many threads; every response is a pure function of (snapshot, query).
//
//   GET /meta
//   GET /paths?seed&n[&interval][&dst][&page][&page_size]
//   GET /flow/series?src&dst&n[&method][&window][&alpha][&threshold]
//   GET /flow/intermediaries?src&dst&n&cutoff[&method][&window][&alpha][&aggregate]
//   GET /flow/through?src&dst&n&via
//   GET /edge/series?src&dst
//
// Every endpoint also takes optional `granularity` and `bucket`. Errors come
// back as {"error": {"status", "reason", "message"}} with 400 (malformed
// query), 404 (unknown entity or interval) or 422 (precondition violation).
class QueryService {
 public:
  explicit QueryService(std::shared_ptr<const DatasetSnapshot> snapshot, ServiceOptions options = {});

  Response handle(std::string_view path, const QueryParams& params) const;

  std::size_t cache_size() const;

 private:
  using PathList = std::shared_ptr<const std::vector<Path>>;
  using CacheKey = std::tuple<int, int, std::string, int, std::size_t>;

  Response meta() const;
  Response paths(const QueryParams& params) const;
  Response flow_series(const QueryParams& params) const;
  Response intermediaries(const QueryParams& params) const;
  Response through(const QueryParams& params) const;
  Response edge(const QueryParams& params) const;

  AggregationSpec spec_of(const QueryParams& params) const;
  void require_entity(const AggregationSpec& spec, const std::string& id) const;
  PathList cached_paths(const AggregationSpec& spec, std::size_t interval, const std::string& seed,
                        int max_len) const;

  std::shared_ptr<const DatasetSnapshot> snapshot_;
  ServiceOptions options_;

  mutable std::mutex cache_mutex_;
  mutable std::list<std::pair<CacheKey, PathList>> lru_;
  mutable std::map<CacheKey, std::list<std::pair<CacheKey, PathList>>::iterator> cache_index_;
};

// HTTP front end for QueryService. start() binds and serves on a background
// thread; port 0 picks a free port.
class HttpServer {
 public:
  explicit HttpServer(const QueryService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  int start(const std::string& host, int port);
  // Serves on the calling thread until stop() is called elsewhere.
  void listen(const std::string& host, int port);
  void stop();

 private:
  const QueryService& service_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace flowscope
