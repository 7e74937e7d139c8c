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

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "riskcal/qi_profile.hpp"

namespace riskcal {

using Row = std::vector<std::string>;
/// One value per key attribute, in key order, trimmed.
using KeyTuple = std::vector<std::string>;

/// Rectangular table of text cells. Every row has exactly one cell per
/// attribute and normalized attribute names are unique.
class RecordTable {
 public:
  RecordTable() = default;
  /// Throws Error(kRowSchemaMismatch) on a ragged row and
  /// Error(kInvalidArgument) on duplicate or empty normalized names.
  RecordTable(std::vector<AttributeDescriptor> attributes, std::vector<Row> rows);

  /// Convenience for tests and tools: describes raw column names through the
  /// dictionary.
  static RecordTable from_columns(const std::vector<std::string>& raw_names, std::vector<Row> rows,
                                  const QuasiIdentifierDictionary& dict);

  const std::vector<AttributeDescriptor>& attributes() const noexcept { return attributes_; }
  const std::vector<Row>& rows() const noexcept { return rows_; }
  std::size_t row_count() const noexcept { return rows_.size(); }
  std::size_t column_count() const noexcept { return attributes_.size(); }
  bool empty() const noexcept { return rows_.empty(); }

  std::optional<std::size_t> find_column(std::string_view normalized) const;
  /// Throws Error(kUnknownAttribute).
  std::size_t column(std::string_view normalized) const;
  std::vector<std::size_t> columns(std::span<const std::string> normalized) const;
  bool has_attribute(std::string_view normalized) const { return find_column(normalized).has_value(); }

  const std::string& cell(std::size_t row, std::size_t col) const { return rows_[row][col]; }
  KeyTuple key_of(std::size_t row, std::span<const std::size_t> cols) const;

  std::vector<std::string> attribute_names() const;

 private:
  std::vector<AttributeDescriptor> attributes_;
  std::vector<Row> rows_;
};

}  // namespace riskcal
