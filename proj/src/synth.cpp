#include "flowscope/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <tuple>

#include "flowscope/error.hpp"

namespace flowscope::synth {
namespace {

std::uint64_t mix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h = (h ^ c) * 0x100000001b3ULL;
  }
  return h;
}

[[noreturn]] void invalid(const std::string& message) {
  throw Error(ErrorKind::kInvalidArgument, "invalid_scenario", message);
}

std::int64_t interval_seconds(std::int64_t serial, BucketKind kind) {
  return (bucket_start(serial + 1, kind) - bucket_start(serial, kind)).count();
}

Timestamp at_offset(std::int64_t serial, BucketKind kind, double fraction_lo, double fraction_hi,
                    double u) {
  const auto length = interval_seconds(serial, kind);
  const double f = fraction_lo + (fraction_hi - fraction_lo) * u;
  auto offset = static_cast<std::int64_t>(std::floor(f * static_cast<double>(length)));
  offset = std::clamp<std::int64_t>(offset, 0, length - 1);
  return bucket_start(serial, kind) + std::chrono::seconds{offset};
}

struct Party {
  std::string account;
  std::string institution;
  std::string country;
};

Party party_of(const std::string& account) {
  // "<CC>BK<ii>-<aaaa>"
  return {account, account.substr(0, account.find('-')), account.substr(0, 2)};
}

TransactionRecord make_record(Timestamp ts, const Party& from, const Party& to, Amount amount,
                              const std::string& currency) {
  return {ts,         from.account, from.institution, from.country, to.account,
          to.institution, to.country, amount,        currency};
}

}  // namespace

double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t interval,
                 std::uint64_t counter) {
  const std::uint64_t h = mix(mix(mix(mix(seed) ^ stream) ^ interval) ^ counter);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

std::string country_code(int index) {
  return {static_cast<char>('A' + index / 26), static_cast<char>('A' + index % 26)};
}

std::string institution_id(int country, int institution) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "BK%02d", institution + 1);
  return country_code(country) + buf;
}

std::string account_id(int country, int institution, int account) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "-%04d", account + 1);
  return institution_id(country, institution) + buf;
}

void ScenarioConfig::validate() const {
  if (intervals < 1) invalid("intervals must be positive");
  if (countries < 1 || countries > 26 * 26) invalid("countries must lie in 1..676");
  if (institutions_per_country < 1 || institutions_per_country > 99) {
    invalid("institutions_per_country must lie in 1..99");
  }
  if (accounts_per_institution < 1 || accounts_per_institution > 9999) {
    invalid("accounts_per_institution must lie in 1..9999");
  }
  if (!is_currency_code(currency)) invalid("currency must be a 3-letter code");
  if (!parse_timestamp(start_date + "T00:00:00Z")) invalid("start_date must be YYYY-MM-DD");

  auto exists = [&](const std::string& id) {
    for (int c = 0; c < countries; ++c) {
      for (int i = 0; i < institutions_per_country; ++i) {
        const std::string prefix = institution_id(c, i) + "-";
        if (id.rfind(prefix, 0) == 0 && id.size() == prefix.size() + 4) {
          int a = 0;
          for (char ch : id.substr(prefix.size())) {
            if (ch < '0' || ch > '9') return false;
            a = a * 10 + (ch - '0');
          }
          return a >= 1 && a <= accounts_per_institution;
        }
      }
    }
    return false;
  };
  for (const auto& p : baseline) {
    if (!exists(p.src) || !exists(p.dst)) invalid("baseline references unknown account " + p.src + "/" + p.dst);
    if (p.src == p.dst) invalid("baseline pattern from " + p.src + " to itself");
    if (p.period < 1) invalid("baseline period must be positive");
    if (p.phase < 0) invalid("baseline phase must be non-negative");
    if (p.amount <= 0) invalid("baseline amount must be positive");
    if (!(p.jitter >= 0 && p.jitter < 1)) invalid("baseline jitter must lie in [0, 1)");
  }
  for (const auto& inj : injections) {
    if (!exists(inj.source) || !exists(inj.sink) || !exists(inj.via)) {
      invalid("injection references an unknown account");
    }
    if (inj.source == inj.via || inj.via == inj.sink || inj.source == inj.sink) {
      invalid("injection source, via and sink must be distinct");
    }
    if (inj.start * 4 < intervals || inj.start >= intervals) {
      invalid("injection start must fall after the first quarter of the span and inside it");
    }
    if (inj.amount < 0 || inj.amount + inj.slope * (intervals - 1 - inj.start) < 0) {
      invalid("injection ramp would become negative");
    }
    if (inj.splits < 1) invalid("injection splits must be positive");
  }
}

Scenario generate(const ScenarioConfig& config) {
  config.validate();
  const Timestamp origin = *parse_timestamp(config.start_date + "T00:00:00Z");
  const std::int64_t first = bucket_serial(origin, config.bucket);
  const std::uint64_t seed = config.rng_seed;

  Scenario out;
  for (std::size_t k = 0; k < config.baseline.size(); ++k) {
    const auto& p = config.baseline[k];
    const std::uint64_t stream = fnv1a(p.src + ">" + p.dst) ^ mix(k);
    const Party from = party_of(p.src);
    const Party to = party_of(p.dst);
    for (int t = 0; t < config.intervals; ++t) {
      if (t < p.phase || (t - p.phase) % p.period != 0) {
        continue;
      }
      const double u = uniform01(seed, stream, static_cast<std::uint64_t>(t), 0);
      const double factor = 1.0 + p.jitter * (2.0 * u - 1.0);
      const Amount amount =
          std::max<Amount>(1, std::llround(static_cast<double>(p.amount) * factor));
      const double v = uniform01(seed, stream, static_cast<std::uint64_t>(t), 1);
      out.records.push_back(make_record(at_offset(first + t, config.bucket, 0.0, 1.0, v), from, to,
                                        amount, config.currency));
    }
  }

  for (std::size_t k = 0; k < config.injections.size(); ++k) {
    const auto& inj = config.injections[k];
    const std::uint64_t stream = fnv1a(inj.source + ">" + inj.via + ">" + inj.sink) ^ mix(~k);
    const Party source = party_of(inj.source);
    const Party via = party_of(inj.via);
    const Party sink = party_of(inj.sink);
    InjectedFlow truth{inj.source, inj.sink, inj.via,
                       {bucket_label(first + inj.start, config.bucket), inj.start}, {}};
    for (int t = inj.start; t < config.intervals; ++t) {
      const Amount total = inj.amount + inj.slope * (t - inj.start);
      truth.amounts.push_back({{bucket_label(first + t, config.bucket), t}, total});
      const Amount base = total / inj.splits;
      const Amount remainder = total % inj.splits;
      for (int s = 0; s < inj.splits; ++s) {
        const Amount part = base + (s < remainder ? 1 : 0);
        if (part == 0) {
          continue;
        }
        const auto counter = static_cast<std::uint64_t>(s) * 2;
        // First leg in the first half of the interval, second leg after it,
        // so every injected path is temporally feasible.
        const double u1 = uniform01(seed, stream, static_cast<std::uint64_t>(t), counter);
        const double u2 = uniform01(seed, stream, static_cast<std::uint64_t>(t), counter + 1);
        out.records.push_back(make_record(at_offset(first + t, config.bucket, 0.0, 0.5, u1),
                                          source, via, part, config.currency));
        out.records.push_back(make_record(at_offset(first + t, config.bucket, 0.5, 1.0, u2), via,
                                          sink, part, config.currency));
      }
    }
    out.truth.injections.push_back(std::move(truth));
  }

  std::stable_sort(out.records.begin(), out.records.end(), [](const auto& a, const auto& b) {
    return std::tie(a.timestamp, a.sender_account, a.receiver_account, a.amount) <
           std::tie(b.timestamp, b.sender_account, b.receiver_account, b.amount);
  });
  return out;
}

ScenarioConfig config_from_json(const nlohmann::json& j) {
  ScenarioConfig c;
  try {
    c.rng_seed = j.value("rng_seed", std::uint64_t{0});
    if (j.contains("bucket")) {
      const auto b = parse_bucket_kind(j.at("bucket").get<std::string>());
      if (!b) invalid("unknown bucket kind");
      c.bucket = *b;
    }
    c.start_date = j.value("start_date", c.start_date);
    c.intervals = j.at("intervals").get<int>();
    c.currency = j.value("currency", c.currency);
    c.countries = j.value("countries", c.countries);
    c.institutions_per_country = j.value("institutions_per_country", c.institutions_per_country);
    c.accounts_per_institution = j.value("accounts_per_institution", c.accounts_per_institution);
    for (const auto& p : j.value("baseline", nlohmann::json::array())) {
      c.baseline.push_back({p.at("src").get<std::string>(), p.at("dst").get<std::string>(),
                            p.value("period", 1), p.value("phase", 0), p.at("amount").get<Amount>(),
                            p.value("jitter", 0.0)});
    }
    for (const auto& i : j.value("injections", nlohmann::json::array())) {
      c.injections.push_back({i.at("source").get<std::string>(), i.at("sink").get<std::string>(),
                              i.at("via").get<std::string>(), i.at("start").get<int>(),
                              i.value("slope", Amount{0}), i.at("amount").get<Amount>(),
                              i.value("splits", 1)});
    }
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string("malformed scenario config: ") + e.what());
  }
  return c;
}

nlohmann::json to_json(const ScenarioConfig& c) {
  nlohmann::json j{{"rng_seed", c.rng_seed},
                   {"bucket", to_string(c.bucket)},
                   {"start_date", c.start_date},
                   {"intervals", c.intervals},
                   {"currency", c.currency},
                   {"countries", c.countries},
                   {"institutions_per_country", c.institutions_per_country},
                   {"accounts_per_institution", c.accounts_per_institution},
                   {"baseline", nlohmann::json::array()},
                   {"injections", nlohmann::json::array()}};
  for (const auto& p : c.baseline) {
    j["baseline"].push_back({{"src", p.src}, {"dst", p.dst}, {"period", p.period},
                             {"phase", p.phase}, {"amount", p.amount}, {"jitter", p.jitter}});
  }
  for (const auto& i : c.injections) {
    j["injections"].push_back({{"source", i.source}, {"sink", i.sink}, {"via", i.via},
                               {"start", i.start}, {"slope", i.slope}, {"amount", i.amount},
                               {"splits", i.splits}});
  }
  return j;
}

nlohmann::json to_json(const GroundTruth& truth) {
  nlohmann::json j{{"injections", nlohmann::json::array()}};
  for (const auto& f : truth.injections) {
    nlohmann::json amounts = nlohmann::json::array();
    for (const auto& [interval, amount] : f.amounts) {
      amounts.push_back({{"interval", interval.label}, {"amount", amount}});
    }
    j["injections"].push_back({{"source", f.source},
                               {"sink", f.sink},
                               {"via", f.via},
                               {"start", f.start.label},
                               {"per_interval", amounts}});
  }
  return j;
}

}  // namespace flowscope::synth
