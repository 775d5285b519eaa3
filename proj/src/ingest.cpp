#include "flowscope/ingest.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <array>
#include <charconv>
#include <cmath>
#include <limits>

#include "flowscope/csv.hpp"
#include "flowscope/error.hpp"

namespace flowscope {
namespace {

bool parse_fixed(std::string_view text, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > text.size()) {
    return false;
  }
  int value = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (text[i] < '0' || text[i] > '9') {
      return false;
    }
    value = value * 10 + (text[i] - '0');
  }
  out = value;
  return true;
}

bool all_upper(std::string_view s) {
  for (char c : s) {
    if (c < 'A' || c > 'Z') {
      return false;
    }
  }
  return true;
}

constexpr std::array<std::string_view, 9> kColumns = {
    "timestamp",        "sender_account",       "sender_institution",
    "sender_country",   "receiver_account",     "receiver_institution",
    "receiver_country", "amount",               "currency"};

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  // YYYY-MM-DDTHH:MM:SS then Z or +00:00
  if (text.size() != 20 && text.size() != 25) {
    return std::nullopt;
  }
  int y, mo, d, h, mi, s;
  if (!parse_fixed(text, 0, 4, y) || text[4] != '-' || !parse_fixed(text, 5, 2, mo) ||
      text[7] != '-' || !parse_fixed(text, 8, 2, d) || text[10] != 'T' ||
      !parse_fixed(text, 11, 2, h) || text[13] != ':' || !parse_fixed(text, 14, 2, mi) ||
      text[16] != ':' || !parse_fixed(text, 17, 2, s)) {
    return std::nullopt;
  }
  const std::string_view zone = text.substr(19);
  if (zone != "Z" && zone != "+00:00") {
    return std::nullopt;
  }
  using namespace std::chrono;
  const year_month_day date{year{y}, month{static_cast<unsigned>(mo)},
                            day{static_cast<unsigned>(d)}};
  if (!date.ok() || h > 23 || mi > 59 || s > 59) {
    return std::nullopt;
  }
  return sys_days{date} + hours{h} + minutes{mi} + seconds{s};
}

std::string format_timestamp(Timestamp ts) {
  using namespace std::chrono;
  const auto day_point = floor<days>(ts);
  const year_month_day date{day_point};
  const hh_mm_ss tod{ts - day_point};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()),
                static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                static_cast<int>(tod.seconds().count()));
  return buf;
}

bool is_country_code(std::string_view code) {
  return code.size() == 2 && all_upper(code.substr(0, 1)) &&
         (all_upper(code.substr(1)) || (code[1] >= '0' && code[1] <= '9'));
}

bool is_currency_code(std::string_view code) { return code.size() == 3 && all_upper(code); }

bool is_country_pseudonym(std::string_view code) {
  if (code.size() != 13 || code[0] != 'C') {
    return false;
  }
  for (char c : code.substr(1)) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) {
      return false;
    }
  }
  return true;
}

ParseResult parse_transactions(std::istream& in, const ParseOptions& options) {
  if (!in) {
    throw Error(ErrorKind::kData, "unreadable_input", "transaction stream is not readable");
  }
  csv::Reader reader(in, options.delimiter);
  std::vector<std::string> fields;
  if (!reader.next(fields)) {
    if (in.bad()) {
      throw Error(ErrorKind::kData, "unreadable_input", "failed reading transaction stream");
    }
    throw Error(ErrorKind::kData, "missing_header", "transaction input has no header row");
  }
  if (!fields.empty() && fields[0].rfind("\xEF\xBB\xBF", 0) == 0) {
    fields[0].erase(0, 3);
  }

  std::array<std::size_t, kColumns.size()> index{};
  for (std::size_t c = 0; c < kColumns.size(); ++c) {
    bool found = false;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (fields[i] == kColumns[c]) {
        index[c] = i;
        found = true;
        break;
      }
    }
    if (!found) {
      throw Error(ErrorKind::kData, "missing_column",
                  "header is missing column '" + std::string(kColumns[c]) + "'");
    }
  }
  const std::size_t width = fields.size();

  ParseResult result;
  if (options.currency) {
    result.currency = *options.currency;
  }
  std::size_t row = 0;
  while (reader.next(fields)) {
    ++row;
    if (fields.empty()) {
      continue;  // blank line
    }
    auto reject = [&](std::string reason) { result.errors.push_back({row, std::move(reason)}); };
    if (fields.size() != width) {
      reject("expected " + std::to_string(width) + " fields, found " +
             std::to_string(fields.size()));
      continue;
    }
    TransactionRecord rec;
    const auto ts = parse_timestamp(fields[index[0]]);
    if (!ts) {
      reject("invalid timestamp");
      continue;
    }
    rec.timestamp = *ts;
    rec.sender_account = fields[index[1]];
    rec.sender_institution = fields[index[2]];
    rec.sender_country = fields[index[3]];
    rec.receiver_account = fields[index[4]];
    rec.receiver_institution = fields[index[5]];
    rec.receiver_country = fields[index[6]];
    if (rec.sender_account.empty() || rec.sender_institution.empty() ||
        rec.receiver_account.empty() || rec.receiver_institution.empty()) {
      reject("empty identifier");
      continue;
    }
    auto valid_country = [](const std::string& c) {
      return is_country_code(c) || is_country_pseudonym(c);
    };
    if (!valid_country(rec.sender_country) || !valid_country(rec.receiver_country)) {
      reject("invalid country code");
      continue;
    }

    const std::string& amount_text = fields[index[7]];
    if (!amount_text.empty() && amount_text[0] == '-') {
      reject("negative amount");
      continue;
    }
    Amount amount = 0;
    const auto [end, ec] =
        std::from_chars(amount_text.data(), amount_text.data() + amount_text.size(), amount);
    if (amount_text.empty() || ec != std::errc{} || end != amount_text.data() + amount_text.size()) {
      reject("invalid amount");
      continue;
    }

    std::string currency = fields[index[8]];
    if (!is_currency_code(currency)) {
      reject("invalid currency code");
      continue;
    }
    if (result.currency.empty()) {
      result.currency = currency;
    }
    if (currency != result.currency) {
      const auto rate = options.conversion.find(currency);
      if (rate == options.conversion.end()) {
        reject("mixed currency " + currency + " (dataset currency " + result.currency + ")");
        continue;
      }
      const double converted = std::round(static_cast<double>(amount) * rate->second);
      if (!(converted >= 0) || converted > static_cast<double>(std::numeric_limits<Amount>::max())) {
        reject("currency conversion out of range");
        continue;
      }
      amount = static_cast<Amount>(converted);
      currency = result.currency;
    }
    rec.amount = amount;
    rec.currency = std::move(currency);
    result.records.push_back(std::move(rec));
  }
  if (in.bad()) {
    throw Error(ErrorKind::kData, "unreadable_input", "failed reading transaction stream");
  }
  return result;
}

void write_transactions(std::ostream& out, std::span<const TransactionRecord> records,
                        char delimiter) {
  std::vector<std::string> header(kColumns.begin(), kColumns.end());
  csv::write_row(out, header, delimiter);
  for (const auto& r : records) {
    csv::write_row(out,
                   {format_timestamp(r.timestamp), r.sender_account, r.sender_institution,
                    r.sender_country, r.receiver_account, r.receiver_institution,
                    r.receiver_country, std::to_string(r.amount), r.currency},
                   delimiter);
  }
}

std::string pseudonym_for(PseudonymMap::Role role, std::string_view id, std::string_view salt) {
  static constexpr char kPrefix[] = {'A', 'B', 'C'};
  const char prefix = kPrefix[static_cast<int>(role)];
  std::string message;
  message.reserve(id.size() + 2);
  message.push_back(prefix);
  message.push_back(':');
  message.append(id);

  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int digest_len = 0;
  HMAC(EVP_sha256(), salt.data(), static_cast<int>(salt.size()),
       reinterpret_cast<const unsigned char*>(message.data()), message.size(), digest, &digest_len);

  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(1, prefix);
  for (int i = 0; i < 6; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

const std::string& PseudonymMap::assign(Role role, const std::string& id) {
  auto key = std::make_pair(role, id);
  if (auto it = forward_.find(key); it != forward_.end()) {
    return it->second;
  }
  std::string alias = pseudonym_for(role, id, salt_);
  if (auto clash = reverse_.find(alias); clash != reverse_.end()) {
    throw Error(ErrorKind::kData, "pseudonym_collision",
                "pseudonym collision between '" + clash->second.second + "' and '" + id + "'");
  }
  reverse_.emplace(alias, key);
  return forward_.emplace(std::move(key), std::move(alias)).first->second;
}

std::optional<std::string> PseudonymMap::find(Role role, const std::string& id) const {
  if (auto it = forward_.find({role, id}); it != forward_.end()) {
    return it->second;
  }
  return std::nullopt;
}

void PseudonymMap::write(std::ostream& out, char delimiter) const {
  csv::write_row(out, {"original", "pseudonym"}, delimiter);
  for (const auto& [alias, key] : reverse_) {
    csv::write_row(out, {key.second, alias}, delimiter);
  }
}

PseudonymizeResult pseudonymize(std::span<const TransactionRecord> records, std::string_view salt) {
  if (salt.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "empty_salt", "pseudonymization salt must be non-empty");
  }
  using Role = PseudonymMap::Role;
  PseudonymizeResult result{{}, PseudonymMap(std::string(salt))};
  result.records.reserve(records.size());
  auto& map = result.map;
  for (const auto& r : records) {
    TransactionRecord out = r;
    out.sender_account = map.assign(Role::kAccount, r.sender_account);
    out.sender_institution = map.assign(Role::kInstitution, r.sender_institution);
    out.sender_country = map.assign(Role::kCountry, r.sender_country);
    out.receiver_account = map.assign(Role::kAccount, r.receiver_account);
    out.receiver_institution = map.assign(Role::kInstitution, r.receiver_institution);
    out.receiver_country = map.assign(Role::kCountry, r.receiver_country);
    result.records.push_back(std::move(out));
  }
  return result;
}

}  // namespace flowscope
