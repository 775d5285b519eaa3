#include "flowscope/snapshot.hpp"

#include <openssl/sha.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "flowscope/error.hpp"

namespace flowscope {

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), digest);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned char b : digest) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xF]);
  }
  return out;
}

std::shared_ptr<const DatasetSnapshot> DatasetSnapshot::load(const std::filesystem::path& data_dir) {
  const auto file = data_dir / "transactions.csv";
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kData, "missing_file", "cannot open " + file.string());
  }
  std::ostringstream bytes;
  bytes << in.rdbuf();
  const std::string content = bytes.str();
  std::istringstream stream(content);
  ParseResult parsed = parse_transactions(stream);

  BuildMetadata meta;
  meta.rejected_rows = parsed.errors.size();
  meta.currency = parsed.currency;
  meta.checksum = sha256_hex(content);
  if (const auto map = data_dir / "pseudonyms.csv"; std::filesystem::exists(map)) {
    meta.pseudonym_map = map;
  }
  return from_records(std::move(parsed.records), std::move(meta));
}

std::shared_ptr<const DatasetSnapshot> DatasetSnapshot::from_records(
    std::vector<TransactionRecord> records, BuildMetadata metadata) {
  if (records.empty()) {
    throw Error(ErrorKind::kData, "no_records", "dataset contains no valid transactions");
  }
  std::shared_ptr<DatasetSnapshot> snap(new DatasetSnapshot());
  metadata.record_count = records.size();
  const auto [lo, hi] = std::minmax_element(
      records.begin(), records.end(),
      [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
  metadata.first_timestamp = lo->timestamp;
  metadata.last_timestamp = hi->timestamp;
  if (metadata.currency.empty()) {
    metadata.currency = records.front().currency;
  }
  snap->records_ = std::move(records);
  snap->metadata_ = std::move(metadata);
  return snap;
}

const DatasetSnapshot::Family& DatasetSnapshot::family(const AggregationSpec& spec) const {
  Family& f = families_[static_cast<std::size_t>(spec.granularity) * 3 +
                        static_cast<std::size_t>(spec.bucket)];
  std::call_once(f.once, [&] {
    f.networks = build_networks(records_, spec);
    for (const auto& net : f.networks) {
      f.entities.insert(net.nodes().begin(), net.nodes().end());
    }
  });
  return f;
}

const std::vector<TemporalNetwork>& DatasetSnapshot::networks(const AggregationSpec& spec) const {
  return family(spec).networks;
}

bool DatasetSnapshot::has_entity(const AggregationSpec& spec, std::string_view id) const {
  const auto& entities = family(spec).entities;
  return entities.find(id) != entities.end();
}

}  // namespace flowscope
