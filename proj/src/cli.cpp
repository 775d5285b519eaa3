#include "flowscope/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "flowscope/anomaly.hpp"
#include "flowscope/csv.hpp"
#include "flowscope/error.hpp"
#include "flowscope/flows.hpp"
#include "flowscope/graph.hpp"
#include "flowscope/ingest.hpp"
#include "flowscope/pathfinder.hpp"
#include "flowscope/service.hpp"
#include "flowscope/snapshot.hpp"
#include "flowscope/synth.hpp"

namespace flowscope {
namespace {

namespace fs = std::filesystem;

struct Common {
  std::string input;
  std::string output = "-";
  std::string granularity = "ACCOUNT";
  std::string bucket = "ISO_WEEK";
  char delimiter = ',';
};

struct Expect {
  std::string method = "WMA";
  int window = 8;
  double alpha = 0.3;
  double threshold = 0.5;
  std::string aggregate = "mean";
};

void write_to(const std::string& path, std::ostream& fallback,
              const std::function<void(std::ostream&)>& body) {
  if (path.empty() || path == "-") {
    body(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw Error(ErrorKind::kData, "unwritable_output", "cannot write " + path);
  }
  body(file);
  if (!file) {
    throw Error(ErrorKind::kData, "unwritable_output", "failed writing " + path);
  }
}

ParseResult read_records(const std::string& path, char delimiter, std::ostream& err) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kData, "missing_file", "cannot open " + path);
  }
  ParseOptions options;
  options.delimiter = delimiter;
  ParseResult parsed = parse_transactions(in, options);
  if (!parsed.errors.empty()) {
    err << path << ": skipped " << parsed.errors.size() << " malformed row(s); first at row "
        << parsed.errors.front().row << ": " << parsed.errors.front().reason << "\n";
  }
  return parsed;
}

AggregationSpec spec_of(const Common& c) {
  const auto g = parse_granularity(c.granularity);
  const auto b = parse_bucket_kind(c.bucket);
  if (!g) throw Error(ErrorKind::kInvalidArgument, "invalid_granularity", "unknown granularity " + c.granularity);
  if (!b) throw Error(ErrorKind::kInvalidArgument, "invalid_bucket", "unknown bucket " + c.bucket);
  return {*g, *b};
}

ExpectationConfig config_of(const Expect& e) {
  ExpectationConfig config;
  const auto method = parse_expectation_method(e.method);
  if (!method) throw Error(ErrorKind::kInvalidArgument, "invalid_method", "unknown method " + e.method);
  const auto aggregate = parse_post_cutoff_aggregate(e.aggregate);
  if (!aggregate) throw Error(ErrorKind::kInvalidArgument, "invalid_aggregate", "unknown aggregate " + e.aggregate);
  config.method = *method;
  config.window = e.window;
  config.alpha = e.alpha;
  config.threshold = e.threshold;
  config.aggregate = *aggregate;
  config.validate();
  return config;
}

std::vector<TemporalNetwork> load_networks(const Common& c, std::ostream& err) {
  const ParseResult parsed = read_records(c.input, c.delimiter, err);
  return build_networks(parsed.records, spec_of(c));
}

void add_common(CLI::App* cmd, Common& c, bool aggregation = true) {
  cmd->add_option("--input,-i", c.input, "Transaction CSV")->required();
  cmd->add_option("--output,-o", c.output, "Output file ('-' for stdout)");
  cmd->add_option("--delimiter", c.delimiter, "Field delimiter of the input");
  if (aggregation) {
    cmd->add_option("--granularity", c.granularity, "ACCOUNT | INSTITUTION | COUNTRY");
    cmd->add_option("--bucket", c.bucket, "DAY | ISO_WEEK | CALENDAR_MONTH");
  }
}

void add_expectation(CLI::App* cmd, Expect& e) {
  cmd->add_option("--method", e.method, "WMA | EWMA");
  cmd->add_option("--window", e.window, "WMA window (intervals)");
  cmd->add_option("--alpha", e.alpha, "EWMA smoothing factor");
  cmd->add_option("--threshold", e.threshold, "Flag when |deviation| exceeds this");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bounded-path money-flow analysis over temporal transaction networks", "flowscope"};
  app.require_subcommand(1);

  Common common;
  Expect expect;

  // ingest
  std::string map_path, errors_path, salt, currency;
  auto* ingest = app.add_subcommand("ingest", "Validate and pseudonymize a transaction file");
  add_common(ingest, common, false);
  ingest->add_option("--salt", salt, "Pseudonymization key")->required();
  ingest->add_option("--map", map_path, "Write the pseudonym map here");
  ingest->add_option("--errors", errors_path, "Write rejected rows (row,reason) here");
  ingest->add_option("--currency", currency, "Dataset currency (default: first row)");

  // build
  std::string out_dir;
  auto* build = app.add_subcommand("build", "Write one edge file per interval");
  add_common(build, common);
  build->add_option("--out-dir", out_dir, "Directory for <interval>.csv files")->required();

  // paths
  std::string seed, interval, dst_filter;
  int max_len = 3;
  auto* paths = app.add_subcommand("paths", "Path table of all bounded paths from a seed");
  add_common(paths, common);
  paths->add_option("--seed", seed, "Start node")->required();
  paths->add_option("--max-len", max_len, "Maximum edge count")->required();
  paths->add_option("--interval", interval, "Only this interval label");
  paths->add_option("--dst", dst_filter, "Only paths ending here");

  // flow / series / rank
  std::string src, dst, cutoff, flags_path;
  auto* flow = app.add_subcommand("flow", "Flow weight per interval");
  add_common(flow, common);
  flow->add_option("--src", src)->required();
  flow->add_option("--dst", dst)->required();
  flow->add_option("--max-len", max_len)->required();

  auto* series = app.add_subcommand("series", "Flow series with expectations and anomaly flags");
  add_common(series, common);
  series->add_option("--src", src)->required();
  series->add_option("--dst", dst)->required();
  series->add_option("--max-len", max_len)->required();
  series->add_option("--flags", flags_path, "Write flags here");
  add_expectation(series, expect);

  auto* rank = app.add_subcommand("rank", "Rank intermediaries by post-cutoff deviation");
  add_common(rank, common);
  rank->add_option("--src", src)->required();
  rank->add_option("--dst", dst)->required();
  rank->add_option("--max-len", max_len)->required();
  rank->add_option("--cutoff", cutoff, "Interval label splitting history from the window")->required();
  rank->add_option("--aggregate", expect.aggregate, "mean | max");
  add_expectation(rank, expect);

  // synth
  std::string config_path, truth_path, synth_output = "-";
  std::optional<std::uint64_t> rng_seed;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic scenario");
  synth_cmd->add_option("--config", config_path, "Scenario JSON")->required();
  synth_cmd->add_option("--rng-seed", rng_seed, "Overrides rng_seed of the config");
  synth_cmd->add_option("--output,-o", synth_output, "Transaction CSV ('-' for stdout)");
  synth_cmd->add_option("--truth", truth_path, "Ground truth JSON");

  // serve
  std::string data_dir, host = "127.0.0.1";
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Serve read-only HTTP queries over a dataset");
  serve->add_option("--data-dir", data_dir, "Directory holding transactions.csv")->required();
  serve->add_option("--port", port);
  serve->add_option("--host", host);
  serve->add_option("--granularity", common.granularity, "Default granularity");
  serve->add_option("--bucket", common.bucket, "Default bucket");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (ingest->parsed()) {
      std::ifstream in(common.input, std::ios::binary);
      if (!in) throw Error(ErrorKind::kData, "missing_file", "cannot open " + common.input);
      ParseOptions options;
      options.delimiter = common.delimiter;
      if (!currency.empty()) options.currency = currency;
      const ParseResult parsed = parse_transactions(in, options);
      const auto result = pseudonymize(parsed.records, salt);
      write_to(common.output, out, [&](std::ostream& o) {
        write_transactions(o, result.records, common.delimiter);
      });
      if (!map_path.empty()) {
        write_to(map_path, out, [&](std::ostream& o) { result.map.write(o, common.delimiter); });
      }
      if (!errors_path.empty()) {
        write_to(errors_path, out, [&](std::ostream& o) {
          csv::write_row(o, {"row", "reason"});
          for (const auto& e : parsed.errors) csv::write_row(o, {std::to_string(e.row), e.reason});
        });
      }
      err << "ingested " << parsed.records.size() << " record(s), rejected "
          << parsed.errors.size() << " row(s)\n";
    } else if (build->parsed()) {
      const auto networks = load_networks(common, err);
      fs::create_directories(out_dir);
      for (const auto& net : networks) {
        write_to((fs::path(out_dir) / (net.interval().label + ".csv")).string(), out,
                 [&](std::ostream& o) { net.write_csv(o); });
      }
      err << "wrote " << networks.size() << " interval file(s) to " << out_dir << "\n";
    } else if (paths->parsed()) {
      const auto networks = load_networks(common, err);
      std::vector<Path> found;
      for (const auto& net : networks) {
        if (!interval.empty() && net.interval().label != interval) continue;
        PathEnumerator it(net, seed, max_len);
        while (it.next()) {
          if (dst_filter.empty() || net.name(it.terminal()) == dst_filter) {
            found.push_back(it.materialize());
          }
        }
      }
      if (!interval.empty() && !find_interval(networks, interval)) {
        throw Error(ErrorKind::kNotFound, "unknown_interval",
                    "interval '" + interval + "' is not in the dataset");
      }
      write_to(common.output, out, [&](std::ostream& o) {
        export_path_table(std::span<const Path>(found), nullptr, &o);
      });
    } else if (flow->parsed()) {
      const auto networks = load_networks(common, err);
      const auto s = flow_series(networks, src, dst, max_len);
      write_to(common.output, out, [&](std::ostream& o) { write_flow_series(o, s); });
    } else if (series->parsed()) {
      const auto config = config_of(expect);
      const auto networks = load_networks(common, err);
      auto s = flow_series(networks, src, dst, max_len);
      const auto flags = flag_anomalies(s, config);
      write_to(common.output, out, [&](std::ostream& o) { write_flow_series(o, s); });
      if (!flags_path.empty()) {
        write_to(flags_path, out, [&](std::ostream& o) { write_flags(o, flags); });
      }
      err << flags.size() << " interval(s) flagged\n";
    } else if (rank->parsed()) {
      const auto config = config_of(expect);
      const auto networks = load_networks(common, err);
      const auto ranking = rank_intermediaries(networks, src, dst, max_len, cutoff, config);
      write_to(common.output, out, [&](std::ostream& o) { write_ranking(o, ranking); });
    } else if (synth_cmd->parsed()) {
      std::ifstream in(config_path);
      if (!in) throw Error(ErrorKind::kData, "missing_file", "cannot open " + config_path);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::kData, "malformed_config", std::string("scenario config: ") + e.what());
      }
      auto config = synth::config_from_json(j);
      if (rng_seed) config.rng_seed = *rng_seed;
      const auto scenario = synth::generate(config);
      write_to(synth_output, out, [&](std::ostream& o) { write_transactions(o, scenario.records); });
      if (!truth_path.empty()) {
        write_to(truth_path, out,
                 [&](std::ostream& o) { o << synth::to_json(scenario.truth).dump(2) << "\n"; });
      }
    } else if (serve->parsed()) {
      ServiceOptions options;
      options.default_spec = spec_of(common);
      const auto snapshot = DatasetSnapshot::load(data_dir);
      QueryService service(snapshot, options);
      HttpServer server(service);
      err << "serving " << snapshot->metadata().record_count << " record(s) on http://" << host
          << ":" << port << "\n";
      server.listen(host, port);
    }
  } catch (const Error& e) {
    err << "error [" << e.reason() << "]: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace flowscope
