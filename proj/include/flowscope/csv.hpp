#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace flowscope::csv {

// Minimal RFC 4180 style reader: quoted fields may contain the delimiter,
// doubled quotes and line breaks. Records are returned one at a time.
class Reader {
 public:
  Reader(std::istream& in, char delimiter = ',') : in_(in), delimiter_(delimiter) {}

  // Returns false at end of input. A trailing '\r' is stripped from each line.
  bool next(std::vector<std::string>& fields);

  // 1-based physical line number where the last returned record started.
  std::size_t line() const { return record_line_; }

 private:
  std::istream& in_;
  char delimiter_;
  std::size_t line_ = 0;
  std::size_t record_line_ = 0;
};

std::vector<std::string> split_line(std::string_view line, char delimiter = ',');

// Quotes the field only when it contains the delimiter, a quote or a newline.
std::string escape(std::string_view field, char delimiter = ',');

void write_row(std::ostream& out, const std::vector<std::string>& fields, char delimiter = ',');

// Shortest round-trip decimal form; "inf", "-inf" and "nan" for non-finite.
std::string format_double(double value);

}  // namespace flowscope::csv
