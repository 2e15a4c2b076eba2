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

#ifndef GAMEVQP_FEATURE_TABLE_HPP_
#define GAMEVQP_FEATURE_TABLE_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gamevqp/csv.hpp"
#include "gamevqp/error.hpp"
#include "gamevqp/numeric.hpp"

namespace gamevqp {

// Per-video feature rows keyed by video_id; used for features.csv (NSS bag)
// and deep.csv (externally extracted deep features, d_0..d_{k-1}).
class FeatureTable {
 public:
  FeatureTable() = default;
  explicit FeatureTable(std::vector<std::string> names) : names_(std::move(names)) {
    values_ = Matrix(0, names_.size());
  }

  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const Matrix& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return ids_.size(); }
  std::size_t dimension() const noexcept { return names_.size(); }

  void add(std::string id, std::span<const double> row) {
    if (row.size() != names_.size()) {
      throw SchemaError("row for '" + id + "' has " + std::to_string(row.size()) +
                        " values, table has " + std::to_string(names_.size()) + " columns");
    }
    if (!index_.emplace(id, ids_.size()).second) throw SchemaError("duplicate video_id '" + id + "'");
    ids_.push_back(std::move(id));
    values_.append_row(row);
  }

  std::optional<std::size_t> find(const std::string& id) const {
    const auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::span<const double> row(std::size_t i) const { return values_.row(i); }

 private:
  std::vector<std::string> names_;
  std::vector<std::string> ids_;
  Matrix values_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline FeatureTable read_feature_table(const CsvDocument& doc) {
  if (doc.header.empty() || doc.header[0] != "video_id") {
    throw SchemaError(doc.where(doc.header_line, 1) + ": first column must be 'video_id'");
  }
  if (doc.header.size() < 2) {
    throw SchemaError(doc.where(doc.header_line) + ": no feature columns");
  }
  std::vector<std::string> names(doc.header.begin() + 1, doc.header.end());
  {
    std::unordered_map<std::string_view, std::size_t> seen;
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i].empty() || !seen.emplace(names[i], i).second) {
        throw SchemaError(doc.where(doc.header_line, i + 2) + ": empty or duplicate feature name '" +
                          names[i] + "'");
      }
    }
  }
  FeatureTable table(std::move(names));
  std::vector<double> row(table.dimension());
  for (const CsvRow& r : doc.rows) {
    const std::string& id = parse_id(doc, r, 0);
    for (std::size_t c = 1; c < r.fields.size(); ++c) row[c - 1] = parse_real(doc, r, c);
    if (table.find(id)) {
      throw SchemaError(doc.where(r, 0) + ": duplicate video_id '" + id + "'");
    }
    table.add(id, row);
  }
  return table;
}

inline FeatureTable read_deep_table(const CsvDocument& doc) {
  FeatureTable table = read_feature_table(doc);
  for (std::size_t i = 0; i < table.dimension(); ++i) {
    if (table.names()[i] != "d_" + std::to_string(i)) {
      throw SchemaError(doc.where(doc.header_line, i + 2) + ": expected column 'd_" +
                        std::to_string(i) + "', got '" + table.names()[i] + "'");
    }
  }
  return table;
}

inline std::string write_feature_table(const FeatureTable& table, std::string_view comment = {}) {
  std::string out(comment);
  out += "video_id";
  for (const auto& n : table.names()) out += "," + csv_field(n);
  out += "\n";
  for (std::size_t r = 0; r < table.size(); ++r) {
    out += csv_field(table.ids()[r]);
    for (double v : table.row(r)) out += "," + format_real(v);
    out += "\n";
  }
  return out;
}

}  // namespace gamevqp

#endif  // GAMEVQP_FEATURE_TABLE_HPP_
