#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "styx/error.hpp"

namespace styx::csv {

/// One parsed record and the physical line it started on (1-based).
struct Row {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

/// Streaming RFC 4180 reader. Quoted fields may span lines; `""` inside a
/// quoted field is a literal quote. Both LF and CRLF terminators are accepted.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Next record, or nullopt at end of input. Throws Error naming the
  /// line on malformed quoting.
  std::optional<Row> next() {
    int c = in_.get();
    if (c == EOF) return std::nullopt;
    Row row;
    row.line = line_;
    std::string field;
    bool quoted = false;     // inside quotes
    bool was_quoted = false; // current field began with a quote
    bool after_quote = false;
    while (true) {
      if (c == EOF) {
        if (quoted) throw Error("malformed CSV: unterminated quoted field starting on line " + std::to_string(row.line));
        row.fields.push_back(std::move(field));
        return row;
      }
      const char ch = static_cast<char>(c);
      if (quoted) {
        if (ch == '"') {
          if (in_.peek() == '"') {
            in_.get();
            field.push_back('"');
          } else {
            quoted = false;
            after_quote = true;
          }
        } else {
          if (ch == '\n') ++line_;
          field.push_back(ch);
        }
      } else if (ch == ',') {
        row.fields.push_back(std::move(field));
        field.clear();
        was_quoted = after_quote = false;
      } else if (ch == '\n' || ch == '\r') {
        if (ch == '\r' && in_.peek() == '\n') in_.get();
        ++line_;
        row.fields.push_back(std::move(field));
        return row;
      } else if (ch == '"') {
        if (!field.empty() || was_quoted)
          throw Error("malformed CSV: stray quote on line " + std::to_string(line_));
        quoted = was_quoted = true;
      } else {
        if (after_quote)
          throw Error("malformed CSV: text after closing quote on line " + std::to_string(line_));
        field.push_back(ch);
      }
      c = in_.get();
    }
  }

  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
};

inline bool needs_quoting(std::string_view field) {
  return field.find_first_of(",\"\r\n") != std::string_view::npos;
}

inline std::string escape(std::string_view field) {
  if (!needs_quoting(field)) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

/// Writes one record with LF terminator.
inline void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << escape(fields[i]);
  }
  out << '\n';
}

}  // namespace styx::csv
