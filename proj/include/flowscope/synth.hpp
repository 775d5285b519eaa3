#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "flowscope/graph.hpp"
#include "flowscope/ingest.hpp"

namespace flowscope::synth {

// Periodic payment between two accounts: emitted in every interval t with
// (t - phase) % period == 0, amount jittered uniformly by +-jitter.
struct BaselinePattern {
  std::string src;
  std::string dst;
  int period = 1;
  int phase = 0;
  Amount amount = 0;
  double jitter = 0;
};

// Extra traffic source -> via and via -> sink starting at interval `start`
// (0-based within the span). Each leg carries amount + slope * (t - start)
// in interval t, split across `splits` transfers.
struct Injection {
  std::string source;
  std::string sink;
  std::string via;
  int start = 0;
  Amount slope = 0;
  Amount amount = 0;
  int splits = 1;
};

struct ScenarioConfig {
  std::uint64_t rng_seed = 0;
  BucketKind bucket = BucketKind::kIsoWeek;
  std::string start_date = "2021-01-04";  // any day inside the first interval
  int intervals = 0;
  std::string currency = "EUR";
  int countries = 1;
  int institutions_per_country = 1;
  int accounts_per_institution = 1;
  std::vector<BaselinePattern> baseline;
  std::vector<Injection> injections;

  // Throws flowscope::Error describing the first inconsistency.
  void validate() const;
};

// Generated hierarchy: country codes "AA", "AB", ...; institutions
// "<CC>BK01", ...; accounts "<CC>BK01-0001", ...
std::string country_code(int index);
std::string institution_id(int country, int institution);
std::string account_id(int country, int institution, int account);

struct InjectedFlow {
  std::string source;
  std::string sink;
  std::string via;
  IntervalId start;
  // Injected total per leg for every interval from `start` on.
  std::vector<std::pair<IntervalId, Amount>> amounts;
};

struct GroundTruth {
  std::vector<InjectedFlow> injections;
};

struct Scenario {
  std::vector<TransactionRecord> records;
  GroundTruth truth;
};

// Deterministic for a given config; records are sorted by timestamp.
Scenario generate(const ScenarioConfig& config);

// JSON schema documented in README.md.
ScenarioConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ScenarioConfig& config);
nlohmann::json to_json(const GroundTruth& truth);

// Counter-based stream: a pure function of (seed, stream, interval, counter).
double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t interval,
                 std::uint64_t counter);

}  // namespace flowscope::synth
