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

#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "riskcal/record_table.hpp"

namespace riskcal {

struct EquivalenceClassPartition {
  /// Normalized names, in key order.
  std::vector<std::string> key_attrs;
  std::map<KeyTuple, std::vector<std::size_t>> classes;
  std::size_t total_rows = 0;
};

/// Groups rows by their trimmed key cells; blank cells form their own value.
/// Key names are normalized before lookup. Throws Error(kUnknownAttribute),
/// Error(kInvalidArgument) for an empty key.
EquivalenceClassPartition partition(const RecordTable& table, std::span<const std::string> key_attrs);

/// Smallest class size. Throws Error(kEmptyTable).
std::size_t k_anonymity(const EquivalenceClassPartition& p);
/// Smallest number of distinct sensitive values in any class.
std::size_t l_diversity(const EquivalenceClassPartition& p, const RecordTable& table, std::string_view sensitive);
/// Largest total-variation distance between a class's sensitive-value
/// distribution and the whole table's.
double t_closeness(const EquivalenceClassPartition& p, const RecordTable& table, std::string_view sensitive);

/// Shannon entropy in bits of the column's value distribution.
double attribute_entropy(const RecordTable& table, std::string_view attr);
/// 1 - H / log2(distinct values); 0 for a single distinct value.
double skew_score(const RecordTable& table, std::string_view attr);

struct RiskSummary {
  std::vector<std::string> key_attrs;
  std::size_t k = 0;
  std::size_t class_count = 0;
  std::size_t singleton_classes = 0;
  std::map<std::string, std::size_t> l_per_sensitive;
  std::map<std::string, double> t_per_sensitive;
  /// Skew of each key attribute.
  std::map<std::string, double> skew;
  std::map<std::string, double> entropy;
};

RiskSummary summarize_risk(const RecordTable& table, std::span<const std::string> key_attrs,
                           std::span<const std::string> sensitive_attrs);

struct EntryPointFinding {
  std::vector<std::string> key_attrs;
  KeyTuple key;
  std::size_t class_size = 0;
  std::vector<std::size_t> rows;

  friend bool operator==(const EntryPointFinding&, const EntryPointFinding&) = default;
};

inline constexpr std::size_t kDefaultEntryPointThreshold = 5;

/// Classes of size <= threshold over qi_attrs, or over every nonempty subset
/// of qi_attrs when `subsets` is set. Ordered by class size, then subset
/// (fewer attributes first, then key position), then key tuple.
std::vector<EntryPointFinding> vulnerable_entry_points(const RecordTable& table, std::span<const std::string> qi_attrs,
                                                       std::size_t threshold, bool subsets = false);

nlohmann::json to_json(const RiskSummary& s);
nlohmann::json to_json(const EntryPointFinding& f);

}  // namespace riskcal
