#include <doctest.h>

#include <map>
#include <random>
#include <sstream>

#include "flowscope/error.hpp"
#include "flowscope/graph.hpp"

using namespace flowscope;

namespace {

Timestamp ts(const char* text) { return *parse_timestamp(text); }

TransactionRecord rec(const char* when, std::string from, std::string to, Amount amount,
                      std::string from_country = "DE", std::string to_country = "IT") {
  return {ts(when), from, "I" + from, from_country, to, "I" + to, to_country, amount, "EUR"};
}

}  // namespace

TEST_SUITE("graph") {
  TEST_CASE("bucket labels") {
    CHECK(bucket_of(ts("2022-02-24T10:00:00Z"), BucketKind::kIsoWeek).label == "2022-W08");
    CHECK(bucket_of(ts("2022-02-24T10:00:00Z"), BucketKind::kCalendarMonth).label == "2022-02");
    CHECK(bucket_of(ts("2022-01-01T00:00:00Z"), BucketKind::kDay).label == "2022-01-01");
  }

  TEST_CASE("ISO week table, including week-year boundaries") {
    // Reference labels from an ISO-8601 calendar implementation.
    const std::vector<std::pair<const char*, const char*>> table = {
        {"2022-02-24", "2022-W08"}, {"2020-12-31", "2020-W53"}, {"2021-01-03", "2020-W53"},
        {"2021-01-04", "2021-W01"}, {"2019-12-30", "2020-W01"}, {"2024-12-30", "2025-W01"},
        {"2015-12-31", "2015-W53"}, {"2026-10-17", "2026-W42"}, {"1969-12-29", "1970-W01"},
        {"1970-01-01", "1970-W01"},
    };
    for (const auto& [date, week] : table) {
      CAPTURE(date);
      const auto t = ts((std::string(date) + "T23:59:59Z").c_str());
      CHECK(bucket_of(t, BucketKind::kIsoWeek).label == week);
      CHECK(parse_bucket_label(week, BucketKind::kIsoWeek) == bucket_serial(t, BucketKind::kIsoWeek));
    }
  }

  TEST_CASE("labels parse back to the same serial and serials are consecutive") {
    for (BucketKind kind : {BucketKind::kDay, BucketKind::kIsoWeek, BucketKind::kCalendarMonth}) {
      const auto start = bucket_serial(ts("2019-11-15T00:00:00Z"), kind);
      std::string previous;
      for (std::int64_t s = start; s < start + 120; ++s) {
        const auto label = bucket_label(s, kind);
        CHECK(parse_bucket_label(label, kind) == s);
        CHECK(bucket_serial(bucket_start(s, kind), kind) == s);
        CHECK(label > previous);
        previous = label;
      }
    }
    CHECK_FALSE(parse_bucket_label("2021-W53", BucketKind::kIsoWeek));
    CHECK_FALSE(parse_bucket_label("2022-13", BucketKind::kCalendarMonth));
    CHECK_FALSE(parse_bucket_label("2022-02-30", BucketKind::kDay));
    CHECK_FALSE(parse_bucket_label("garbage", BucketKind::kDay));
  }

  TEST_CASE("edges are aggregated additively") {
    const std::vector<TransactionRecord> records = {
        rec("2022-02-21T09:00:00Z", "A", "B", 100),
        rec("2022-02-24T09:00:00Z", "A", "B", 250),
    };
    const auto nets = build_networks(records, {Granularity::kAccount, BucketKind::kIsoWeek});
    REQUIRE(nets.size() == 1);
    CHECK(nets[0].interval().label == "2022-W08");
    CHECK(nets[0].interval().ordinal == 0);
    CHECK(nets[0].weight("A", "B") == 350);
    CHECK(nets[0].edge_count() == 1);
  }

  TEST_CASE("self-loops collapse away under coarser granularity") {
    const std::vector<TransactionRecord> records = {
        rec("2022-02-21T09:00:00Z", "A", "B", 100, "IT", "IT"),
    };
    const auto by_country = build_networks(records, {Granularity::kCountry, BucketKind::kIsoWeek});
    REQUIRE(by_country.size() == 1);
    CHECK(by_country[0].edge_count() == 0);
    const auto by_account = build_networks(records, {Granularity::kAccount, BucketKind::kIsoWeek});
    CHECK(by_account[0].edge_count() == 1);
  }

  TEST_CASE("gap intervals are materialized as empty networks") {
    const std::vector<TransactionRecord> records = {
        rec("2022-03-07T09:00:00Z", "A", "B", 5),  // W10
        rec("2022-02-24T09:00:00Z", "A", "B", 7),  // W08
    };
    const auto nets = build_networks(records, {Granularity::kAccount, BucketKind::kIsoWeek});
    REQUIRE(nets.size() == 3);
    CHECK(nets[0].interval() == IntervalId{"2022-W08", 0});
    CHECK(nets[1].interval() == IntervalId{"2022-W09", 1});
    CHECK(nets[1].empty());
    CHECK(nets[2].interval() == IntervalId{"2022-W10", 2});
    CHECK(find_interval(nets, "2022-W09") == 1u);
    CHECK_FALSE(find_interval(nets, "2022-W11"));
  }

  TEST_CASE("empty record list is an error") {
    std::vector<TransactionRecord> none;
    CHECK_THROWS_AS(build_networks(none, {}), Error);
  }

  TEST_CASE("network invariants") {
    CHECK_THROWS_AS(TemporalNetwork::from_edges({"x", 0}, std::vector<TemporalNetwork::Edge>{{"a", "a", 1}}), Error);
    CHECK_THROWS_AS(TemporalNetwork::from_edges({"x", 0}, std::vector<TemporalNetwork::Edge>{{"a", "b", 0}}), Error);

    const std::vector<TemporalNetwork::Edge> edges = {
        {"c", "a", 1}, {"a", "c", 2}, {"a", "b", 3}, {"b", "c", 4}, {"a", "b", 10}};
    const auto net = TemporalNetwork::from_edges({"x", 0}, edges);
    CHECK(net.nodes() == std::vector<std::string>{"a", "b", "c"});
    CHECK(net.max_out_degree() == 2);
    CHECK(net.weight("a", "b") == 13);
    CHECK_FALSE(net.weight("b", "a"));
    const auto a = *net.index_of("a");
    const auto out = net.out_neighbors(a);
    REQUIRE(out.size() == 2);
    CHECK(net.name(out[0]) == "b");
    CHECK(net.name(out[1]) == "c");

    std::ostringstream csv;
    net.write_csv(csv);
    CHECK(csv.str() == "src,dst,weight\na,b,13\na,c,2\nb,c,4\nc,a,1\n");
  }

  TEST_CASE("conservation and coarsening properties") {
    std::mt19937_64 rng(11);
    const std::vector<std::string> countries = {"DE", "IT", "FR"};
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<TransactionRecord> records;
      for (int i = 0; i < 80; ++i) {
        const int a = static_cast<int>(rng() % 12);
        const int b = static_cast<int>(rng() % 12);
        TransactionRecord r;
        r.timestamp = ts("2022-01-03T00:00:00Z") + std::chrono::hours{static_cast<int>(rng() % 2000)};
        r.sender_account = "acc" + std::to_string(a);
        r.receiver_account = "acc" + std::to_string(b);
        r.sender_institution = "bank" + std::to_string(a % 5);
        r.receiver_institution = "bank" + std::to_string(b % 5);
        r.sender_country = countries[static_cast<std::size_t>(a % 5 % 3)];
        r.receiver_country = countries[static_cast<std::size_t>(b % 5 % 3)];
        r.amount = static_cast<Amount>(rng() % 1000);
        r.currency = "EUR";
        records.push_back(r);
      }
      std::map<Granularity, std::vector<TemporalNetwork>> families;
      for (Granularity g : {Granularity::kAccount, Granularity::kInstitution, Granularity::kCountry}) {
        const auto nets = build_networks(records, {g, BucketKind::kIsoWeek});
        Amount expected = 0;
        for (const auto& r : records) {
          if (node_of(r, g, true) != node_of(r, g, false)) expected += r.amount;
        }
        Amount total = 0;
        for (const auto& n : nets) total += n.total_weight();
        CHECK(total == expected);
        families[g] = nets;
      }
      const auto& fine = families[Granularity::kAccount];
      const auto& mid = families[Granularity::kInstitution];
      const auto& coarse = families[Granularity::kCountry];
      REQUIRE(fine.size() == mid.size());
      for (std::size_t t = 0; t < fine.size(); ++t) {
        CHECK(mid[t].node_count() <= fine[t].node_count());
        CHECK(coarse[t].node_count() <= mid[t].node_count());
        // Every fine edge's weight is bounded by its coarse image.
        for (const auto& e : fine[t].edges()) {
          const std::string bs = "bank" + std::to_string(std::stoi(e.src.substr(3)) % 5);
          const std::string bd = "bank" + std::to_string(std::stoi(e.dst.substr(3)) % 5);
          if (bs != bd) CHECK(mid[t].weight(bs, bd).value_or(0) >= e.weight);
        }
      }
    }
  }
}
