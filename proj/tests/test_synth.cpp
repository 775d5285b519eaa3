#include <doctest.h>

#include <map>
#include <sstream>

#include "fixtures.hpp"
#include "flowscope/error.hpp"
#include "flowscope/synth.hpp"

using namespace flowscope;
using namespace flowscope::testing;

namespace {

std::string csv_of(const synth::Scenario& s) {
  std::ostringstream out;
  write_transactions(out, s.records);
  return out.str();
}

using PairTotals = std::map<std::pair<std::string, std::string>, Amount>;

PairTotals totals(const std::vector<TransactionRecord>& records) {
  PairTotals out;
  for (const auto& r : records) out[{r.sender_account, r.receiver_account}] += r.amount;
  return out;
}

}  // namespace

TEST_SUITE("synth") {
  TEST_CASE("identifier scheme") {
    CHECK(synth::country_code(0) == "AA");
    CHECK(synth::country_code(27) == "BB");
    CHECK(synth::institution_id(1, 0) == "ABBK01");
    CHECK(synth::account_id(0, 2, 11) == "AABK03-0012");
  }

  TEST_CASE("same seed gives byte-identical output") {
    const auto config = fan_scenario(42, 5, {1});
    CHECK(csv_of(synth::generate(config)) == csv_of(synth::generate(config)));
    CHECK(synth::to_json(synth::generate(config).truth) == synth::to_json(synth::generate(config).truth));
    CHECK(csv_of(synth::generate(config)) != csv_of(synth::generate(fan_scenario(43, 5, {1}))));
  }

  TEST_CASE("random stream is a pure function in [0, 1)") {
    for (std::uint64_t c = 0; c < 1000; ++c) {
      const double u = synth::uniform01(1, 2, 3, c);
      CHECK(u >= 0.0);
      CHECK(u < 1.0);
      CHECK(u == synth::uniform01(1, 2, 3, c));
    }
  }

  TEST_CASE("no injections, no ground truth") {
    const auto s = synth::generate(fan_scenario(1, 4, {}));
    CHECK(s.truth.injections.empty());
    CHECK(s.records.size() == 4u * 2u * 60u);
  }

  TEST_CASE("injected ramp totals follow the configuration") {
    auto config = fan_scenario(9, 3, {});
    config.injections.push_back({synth::account_id(0, 0, 0), synth::account_id(0, 0, 1),
                                 synth::account_id(0, 0, 3), 30, 500, 10000, 3});
    const auto plain = synth::generate(fan_scenario(9, 3, {}));
    const auto s = synth::generate(config);
    REQUIRE(s.truth.injections.size() == 1);
    const auto& truth = s.truth.injections[0];
    CHECK(truth.start.ordinal == 30);
    REQUIRE(truth.amounts.size() == 30);
    Amount expected = 0;
    for (int t = 30; t < 60; ++t) {
      const Amount leg = 10000 + 500 * (t - 30);
      CHECK(truth.amounts[static_cast<std::size_t>(t - 30)].second == leg);
      expected += leg;
    }
    const auto before = totals(plain.records);
    const auto after = totals(s.records);
    const std::pair<std::string, std::string> first_leg{synth::account_id(0, 0, 0), synth::account_id(0, 0, 3)};
    const std::pair<std::string, std::string> second_leg{synth::account_id(0, 0, 3), synth::account_id(0, 0, 1)};
    CHECK(after.at(first_leg) - before.at(first_leg) == expected);
    CHECK(after.at(second_leg) - before.at(second_leg) == expected);
    // Every other pair is untouched.
    for (const auto& [pair, total] : after) {
      if (pair != first_leg && pair != second_leg) CHECK(before.at(pair) == total);
    }
  }

  TEST_CASE("injected legs are temporally ordered inside each interval") {
    const auto config = fan_scenario(5, 3, {0});
    const auto s = synth::generate(config);
    const auto nets = build_networks(s.records, {Granularity::kAccount, BucketKind::kIsoWeek});
    const auto via = synth::account_id(0, 0, 2);
    for (std::size_t t = 40; t < nets.size(); ++t) {
      const Path p{{synth::account_id(0, 0, 0), via, synth::account_id(0, 0, 1)}, {1, 1}, nets[t].interval()};
      CHECK(temporal_feasibility(s.records, p, {}));
    }
  }

  TEST_CASE("generated records pass ingestion") {
    const auto s = synth::generate(fan_scenario(2, 6, {1, 4}));
    std::istringstream in(csv_of(s));
    const auto parsed = parse_transactions(in);
    CHECK(parsed.errors.empty());
    CHECK(parsed.records == s.records);
    for (std::size_t i = 1; i < s.records.size(); ++i) {
      CHECK(s.records[i - 1].timestamp <= s.records[i].timestamp);
    }
  }

  TEST_CASE("monthly and daily buckets") {
    auto config = fan_scenario(2, 2, {});
    config.bucket = BucketKind::kCalendarMonth;
    config.intervals = 6;
    const auto monthly = synth::generate(config);
    const auto nets = build_networks(monthly.records, {Granularity::kAccount, BucketKind::kCalendarMonth});
    CHECK(nets.size() == 6);
    CHECK(nets[0].interval().label == "2021-01");
    config.bucket = BucketKind::kDay;
    const auto daily = synth::generate(config);
    CHECK(build_networks(daily.records, {Granularity::kAccount, BucketKind::kDay}).size() == 6);
  }

  TEST_CASE("validation") {
    auto expect_invalid = [](synth::ScenarioConfig c) { CHECK_THROWS_AS(synth::generate(c), Error); };
    auto c = fan_scenario(1, 3, {0});
    c.injections[0].start = 10;  // inside the first quarter of 60
    expect_invalid(c);
    c = fan_scenario(1, 3, {0});
    c.injections[0].via = c.injections[0].source;
    expect_invalid(c);
    c = fan_scenario(1, 3, {});
    c.baseline[0].dst = "ZZBK01-0001";
    expect_invalid(c);
    c = fan_scenario(1, 3, {});
    c.baseline[0].jitter = 1.0;
    expect_invalid(c);
    c = fan_scenario(1, 3, {});
    c.intervals = 0;
    expect_invalid(c);
    c = fan_scenario(1, 3, {0});
    c.injections[0].slope = -100000;
    expect_invalid(c);
  }

  TEST_CASE("json configuration round trip") {
    const auto config = fan_scenario(77, 3, {1});
    const auto back = synth::config_from_json(synth::to_json(config));
    CHECK(synth::to_json(back) == synth::to_json(config));
    CHECK(csv_of(synth::generate(back)) == csv_of(synth::generate(config)));

    const auto minimal = synth::config_from_json(nlohmann::json::parse(R"({"intervals": 3})"));
    CHECK(minimal.intervals == 3);
    CHECK(minimal.bucket == BucketKind::kIsoWeek);
    CHECK_THROWS_AS(synth::config_from_json(nlohmann::json::parse(R"({"bucket": "week"})")), Error);
    CHECK_THROWS_AS(synth::config_from_json(nlohmann::json::parse(R"({"intervals": 3, "bucket": "year"})")), Error);
  }
}
