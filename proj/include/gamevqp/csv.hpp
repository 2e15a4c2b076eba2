// Copyright 2026 The GameVQP Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Minimal CSV reading/writing for the toolkit's file contracts. Lines starting
// with '#' are comments (every output file carries a provenance comment on its
// first line). Fields may be double-quoted with "" as the escape.

#ifndef GAMEVQP_CSV_HPP_
#define GAMEVQP_CSV_HPP_

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gamevqp/error.hpp"

namespace gamevqp {

struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

struct CsvDocument {
  std::string source;
  std::size_t header_line = 0;
  std::vector<std::string> header;
  std::vector<CsvRow> rows;

  std::string where(std::size_t line, std::size_t column = 0) const {
    std::string s = source + ":" + std::to_string(line);
    if (column > 0) s += ":" + std::to_string(column);
    return s;
  }

  std::string where(const CsvRow& row, std::size_t column_index) const {
    return where(row.line, column_index + 1);
  }
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

namespace detail {

inline std::vector<std::string> split_csv_line(std::string_view line, const std::string& where) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
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
    } else if (c == '"' && field.empty() && !was_quoted) {
      quoted = was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw SchemaError(where + ": unterminated quoted field");
  fields.push_back(std::move(field));
  return fields;
}

}  // namespace detail

inline CsvDocument parse_csv(std::string_view text, std::string source) {
  CsvDocument doc;
  doc.source = std::move(source);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    auto fields = detail::split_csv_line(line, doc.where(line_no));
    if (doc.header.empty()) {
      doc.header = std::move(fields);
      doc.header_line = line_no;
      continue;
    }
    if (fields.size() != doc.header.size()) {
      throw SchemaError(doc.where(line_no) + ": expected " + std::to_string(doc.header.size()) +
                        " fields, got " + std::to_string(fields.size()));
    }
    doc.rows.push_back({line_no, std::move(fields)});
  }
  if (doc.header.empty()) throw SchemaError(doc.source + ": missing header row");
  return doc;
}

inline CsvDocument read_csv_file(const std::filesystem::path& path) {
  return parse_csv(read_file(path), path.string());
}

// Requires the header to begin with `expected` (extra trailing columns are
// allowed when `exact` is false).
inline void require_header(const CsvDocument& doc, std::span<const std::string_view> expected,
                           bool exact = true) {
  if (doc.header.size() < expected.size() || (exact && doc.header.size() != expected.size())) {
    std::string want;
    for (auto e : expected) want += (want.empty() ? "" : ",") + std::string(e);
    throw SchemaError(doc.where(doc.header_line) + ": header must be '" + want +
                      (exact ? "'" : ",...'"));
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (doc.header[i] != expected[i]) {
      throw SchemaError(doc.where(doc.header_line, i + 1) + ": expected column '" +
                        std::string(expected[i]) + "', got '" + doc.header[i] + "'");
    }
  }
}

inline double parse_real(const CsvDocument& doc, const CsvRow& row, std::size_t column) {
  const std::string& s = row.fields[column];
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw SchemaError(doc.where(row, column) + ": column '" + doc.header[column] +
                      "' expects a finite number, got '" + s + "'");
  }
  return v;
}

inline long long parse_integer(const CsvDocument& doc, const CsvRow& row, std::size_t column) {
  const std::string& s = row.fields[column];
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw SchemaError(doc.where(row, column) + ": column '" + doc.header[column] +
                      "' expects an integer, got '" + s + "'");
  }
  return v;
}

inline const std::string& parse_id(const CsvDocument& doc, const CsvRow& row, std::size_t column) {
  const std::string& s = row.fields[column];
  if (s.empty()) {
    throw SchemaError(doc.where(row, column) + ": column '" + doc.header[column] +
                      "' must not be empty");
  }
  return s;
}

// Full-precision decimal ("%.17g").
inline std::string format_real(double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace gamevqp

#endif  // GAMEVQP_CSV_HPP_
