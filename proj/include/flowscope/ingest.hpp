#pragma once

#include <chrono>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace flowscope {

using Timestamp = std::chrono::sys_seconds;
// Minor currency units (cents).
using Amount = std::int64_t;

struct TransactionRecord {
  Timestamp timestamp;
  std::string sender_account;
  std::string sender_institution;
  std::string sender_country;
  std::string receiver_account;
  std::string receiver_institution;
  std::string receiver_country;
  Amount amount = 0;
  std::string currency;

  bool operator==(const TransactionRecord&) const = default;
};

// Canonical column order of the transaction file.
inline constexpr std::string_view kTransactionHeader =
    "timestamp,sender_account,sender_institution,sender_country,"
    "receiver_account,receiver_institution,receiver_country,amount,currency";

// "YYYY-MM-DDTHH:MM:SSZ"; a "+00:00" offset is accepted in place of "Z".
std::optional<Timestamp> parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp ts);

// Two characters: an uppercase letter, then an uppercase letter or digit
// (ISO 3166 alpha-2, or anonymized labels such as "C2").
bool is_country_code(std::string_view code);
bool is_currency_code(std::string_view code);

struct ParseOptions {
  char delimiter = ',';
  // Dataset currency. When unset the first well-formed row fixes it.
  std::optional<std::string> currency;
  // Multipliers converting a foreign currency into the dataset currency.
  // Rows in a currency without an entry are rejected as mixed currency.
  std::map<std::string, double> conversion;
};

struct RowError {
  std::size_t row = 0;  // 1-based data row, header excluded
  std::string reason;
};

struct ParseResult {
  std::vector<TransactionRecord> records;
  std::vector<RowError> errors;
  std::string currency;
};

// Fatal problems (unreadable stream, missing header column) throw
// flowscope::Error; everything row-local lands in ParseResult::errors.
ParseResult parse_transactions(std::istream& in, const ParseOptions& options = {});

void write_transactions(std::ostream& out, std::span<const TransactionRecord> records,
                        char delimiter = ',');

// Pseudonyms are a role letter (A account, B institution, C country) followed
// by the first 12 hex digits of HMAC-SHA256(salt, role ":" id).
class PseudonymMap {
 public:
  enum class Role { kAccount, kInstitution, kCountry };

  PseudonymMap() = default;
  explicit PseudonymMap(std::string salt) : salt_(std::move(salt)) {}

  const std::string& salt() const { return salt_; }

  // Assigns (or returns the existing) pseudonym for `id` under `role`.
  // Throws if two different ids collide on the truncated digest.
  const std::string& assign(Role role, const std::string& id);

  std::optional<std::string> find(Role role, const std::string& id) const;
  std::size_t size() const { return forward_.size(); }

  // Two columns `original,pseudonym`, sorted by pseudonym.
  void write(std::ostream& out, char delimiter = ',') const;

 private:
  std::string salt_;
  std::map<std::pair<Role, std::string>, std::string> forward_;
  std::map<std::string, std::pair<Role, std::string>> reverse_;
};

std::string pseudonym_for(PseudonymMap::Role role, std::string_view id, std::string_view salt);

// Country fields also accept a pseudonymized country ("C" + 12 hex digits)
// so pseudonymized files re-ingest cleanly.
bool is_country_pseudonym(std::string_view code);

struct PseudonymizeResult {
  std::vector<TransactionRecord> records;
  PseudonymMap map;
};

PseudonymizeResult pseudonymize(std::span<const TransactionRecord> records, std::string_view salt);

}  // namespace flowscope
