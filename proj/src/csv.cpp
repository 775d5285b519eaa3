#include "flowscope/csv.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace flowscope::csv {

bool Reader::next(std::vector<std::string>& fields) {
  fields.clear();
  std::string line;
  if (!std::getline(in_, line)) {
    return false;
  }
  ++line_;
  record_line_ = line_;

  std::string field;
  bool quoted = false;
  bool any = false;
  for (;;) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      any = true;
      if (quoted) {
        if (c == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            field.push_back('"');
            ++i;
          } else {
            quoted = false;
          }
        } else {
          field.push_back(c);
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == delimiter_) {
        fields.push_back(std::move(field));
        field.clear();
      } else {
        field.push_back(c);
      }
    }
    if (!quoted) {
      break;
    }
    // Quoted field spans a line break.
    if (!std::getline(in_, line)) {
      break;
    }
    ++line_;
    field.push_back('\n');
  }
  if (any || !fields.empty()) {
    fields.push_back(std::move(field));
  }
  return true;
}

std::vector<std::string> split_line(std::string_view line, char delimiter) {
  std::string copy(line);
  std::istringstream in(copy);
  Reader reader(in, delimiter);
  std::vector<std::string> fields;
  reader.next(fields);
  return fields;
}

std::string escape(std::string_view field, char delimiter) {
  if (field.find_first_of(std::string{delimiter, '"', '\n', '\r'}) == std::string_view::npos) {
    return std::string(field);
  }
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') {
      out.push_back('"');
    }
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields, char delimiter) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i != 0) {
      out.put(delimiter);
    }
    out << escape(fields[i], delimiter);
  }
  out.put('\n');
}

std::string format_double(double value) {
  if (std::isnan(value)) {
    return "nan";
  }
  if (std::isinf(value)) {
    return value > 0 ? "inf" : "-inf";
  }
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

}  // namespace flowscope::csv
