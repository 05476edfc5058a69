#pragma once

#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "commentqc/error.hpp"

namespace commentqc::csv {

/// RFC-4180 field quoting: quote only when the field needs it.
inline std::string quote(std::string_view field) {
  bool needs = field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline std::string join_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += quote(fields[i]);
  }
  out.push_back('\n');
  return out;
}

/// Streaming RFC-4180 parser. Quoted fields may contain commas, quotes
/// (doubled) and line breaks. Accepts both LF and CRLF records.
class Reader {
public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Reads one record. Returns std::nullopt at end of input.
  /// `record_line` receives the 1-based line the record started on.
  std::optional<std::vector<std::string>> next(std::size_t* record_line = nullptr) {
    int c = in_.get();
    if (c == EOF) return std::nullopt;
    if (record_line) *record_line = line_;

    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    bool quoted_field = false;

    while (true) {
      if (c == EOF) {
        if (in_quotes) raise(Errc::MalformedRow, "unterminated quoted field at end of input");
        fields.push_back(std::move(field));
        return fields;
      }
      char ch = static_cast<char>(c);
      if (in_quotes) {
        if (ch == '"') {
          if (in_.peek() == '"') {
            in_.get();
            field.push_back('"');
          } else {
            in_quotes = false;
          }
        } else {
          if (ch == '\n') ++line_;
          field.push_back(ch);
        }
      } else if (ch == '"') {
        if (!field.empty() || quoted_field)
          raise(Errc::MalformedRow, "stray quote in unquoted field (line " + std::to_string(line_) + ")");
        in_quotes = true;
        quoted_field = true;
      } else if (ch == ',') {
        fields.push_back(std::move(field));
        field.clear();
        quoted_field = false;
      } else if (ch == '\n') {
        ++line_;
        fields.push_back(std::move(field));
        return fields;
      } else if (ch == '\r') {
        if (in_.peek() == '\n') {
          in_.get();
          ++line_;
          fields.push_back(std::move(field));
          return fields;
        }
        field.push_back(ch);
      } else {
        field.push_back(ch);
      }
      c = in_.get();
    }
  }

private:
  std::istream& in_;
  std::size_t line_ = 1;
};

inline std::vector<std::vector<std::string>> parse_all(std::istream& in) {
  Reader r(in);
  std::vector<std::vector<std::string>> rows;
  while (auto row = r.next()) rows.push_back(std::move(*row));
  return rows;
}

} // namespace commentqc::csv
