#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "flowscope/graph.hpp"
#include "flowscope/ingest.hpp"

namespace flowscope {

struct BuildMetadata {
  std::size_t record_count = 0;
  std::size_t rejected_rows = 0;
  std::string currency;
  std::string checksum;  // SHA-256 of the transaction file, hex
  Timestamp first_timestamp{};
  Timestamp last_timestamp{};
  std::optional<std::filesystem::path> pseudonym_map;
};

// Immutable view of one dataset. Network families are built on first use
// per AggregationSpec; concurrent callers share a single build.
class DatasetSnapshot {
 public:
  // Reads `<dir>/transactions.csv`; `<dir>/pseudonyms.csv` is recorded as
  // the pseudonym map reference when present.
  static std::shared_ptr<const DatasetSnapshot> load(const std::filesystem::path& data_dir);
  static std::shared_ptr<const DatasetSnapshot> from_records(std::vector<TransactionRecord> records,
                                                             BuildMetadata metadata = {});

  const std::vector<TransactionRecord>& records() const { return records_; }
  const BuildMetadata& metadata() const { return metadata_; }

  const std::vector<TemporalNetwork>& networks(const AggregationSpec& spec) const;
  // Whether `id` is a node of any network of the family.
  bool has_entity(const AggregationSpec& spec, std::string_view id) const;

 private:
  struct Family {
    std::once_flag once;
    std::vector<TemporalNetwork> networks;
    std::set<std::string, std::less<>> entities;
  };

  DatasetSnapshot() = default;
  const Family& family(const AggregationSpec& spec) const;

  std::vector<TransactionRecord> records_;
  BuildMetadata metadata_;
  mutable std::array<Family, 9> families_;
};

std::string sha256_hex(std::string_view bytes);

}  // namespace flowscope
