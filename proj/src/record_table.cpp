// Copyright 2026 The riskcal Authors
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

#include "riskcal/record_table.hpp"

#include <set>

#include "riskcal/error.hpp"
#include "riskcal/util.hpp"

namespace riskcal {

RecordTable::RecordTable(std::vector<AttributeDescriptor> attributes, std::vector<Row> rows)
    : attributes_(std::move(attributes)), rows_(std::move(rows)) {
  std::set<std::string_view> seen;
  for (const auto& a : attributes_) {
    if (a.normalized_name.empty()) throw Error(ErrorCode::kInvalidArgument, "attribute with empty name");
    if (!seen.insert(a.normalized_name).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate attribute: " + a.normalized_name);
    }
  }
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (rows_[r].size() != attributes_.size()) {
      throw Error(ErrorCode::kRowSchemaMismatch,
                  "row " + std::to_string(r) + " has " + std::to_string(rows_[r].size()) +
                      " cells, expected " + std::to_string(attributes_.size()));
    }
  }
}

RecordTable RecordTable::from_columns(const std::vector<std::string>& raw_names, std::vector<Row> rows,
                                      const QuasiIdentifierDictionary& dict) {
  std::vector<AttributeDescriptor> attrs;
  attrs.reserve(raw_names.size());
  for (const auto& n : raw_names) attrs.push_back(describe_attribute(n, dict));
  return RecordTable(std::move(attrs), std::move(rows));
}

std::optional<std::size_t> RecordTable::find_column(std::string_view normalized) const {
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    if (attributes_[i].normalized_name == normalized) return i;
  }
  return std::nullopt;
}

std::size_t RecordTable::column(std::string_view normalized) const {
  if (auto c = find_column(normalized)) return *c;
  throw Error(ErrorCode::kUnknownAttribute, "unknown attribute: " + std::string(normalized));
}

std::vector<std::size_t> RecordTable::columns(std::span<const std::string> normalized) const {
  std::vector<std::size_t> out;
  out.reserve(normalized.size());
  for (const auto& n : normalized) out.push_back(column(n));
  return out;
}

KeyTuple RecordTable::key_of(std::size_t row, std::span<const std::size_t> cols) const {
  KeyTuple key;
  key.reserve(cols.size());
  for (auto c : cols) key.emplace_back(trim(rows_[row][c]));
  return key;
}

std::vector<std::string> RecordTable::attribute_names() const {
  std::vector<std::string> out;
  out.reserve(attributes_.size());
  for (const auto& a : attributes_) out.push_back(a.normalized_name);
  return out;
}

}  // namespace riskcal
