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

#include "riskcal/risk_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "riskcal/error.hpp"
#include "riskcal/util.hpp"

namespace riskcal {

namespace {

void require_rows(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::kEmptyTable, "table has no rows");
}

std::size_t column_of(const RecordTable& table, std::string_view attr) {
  return table.column(normalize_attribute(attr));
}

std::unordered_map<std::string, std::size_t> value_counts(const RecordTable& table, std::size_t col,
                                                          const std::vector<std::size_t>* rows = nullptr) {
  std::unordered_map<std::string, std::size_t> counts;
  if (rows) {
    for (auto r : *rows) ++counts[std::string(trim(table.cell(r, col)))];
  } else {
    for (std::size_t r = 0; r < table.row_count(); ++r) ++counts[std::string(trim(table.cell(r, col)))];
  }
  return counts;
}

double entropy_of(const std::unordered_map<std::string, std::size_t>& counts, std::size_t n) {
  double h = 0.0;
  for (const auto& [v, c] : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(n);
    h -= p * std::log2(p);
  }
  return h <= 0.0 ? 0.0 : h;
}

}  // namespace

EquivalenceClassPartition partition(const RecordTable& table, std::span<const std::string> key_attrs) {
  if (key_attrs.empty()) throw Error(ErrorCode::kInvalidArgument, "partition key is empty");
  EquivalenceClassPartition p;
  std::vector<std::size_t> cols;
  for (const auto& a : key_attrs) {
    p.key_attrs.push_back(normalize_attribute(a));
    cols.push_back(table.column(p.key_attrs.back()));
  }
  p.total_rows = table.row_count();
  for (std::size_t r = 0; r < table.row_count(); ++r) p.classes[table.key_of(r, cols)].push_back(r);
  return p;
}

std::size_t k_anonymity(const EquivalenceClassPartition& p) {
  require_rows(p.total_rows);
  std::size_t k = p.total_rows;
  for (const auto& [key, rows] : p.classes) k = std::min(k, rows.size());
  return k;
}

std::size_t l_diversity(const EquivalenceClassPartition& p, const RecordTable& table, std::string_view sensitive) {
  const auto col = column_of(table, sensitive);
  require_rows(p.total_rows);
  std::size_t l = p.total_rows;
  for (const auto& [key, rows] : p.classes) l = std::min(l, value_counts(table, col, &rows).size());
  return l;
}

double t_closeness(const EquivalenceClassPartition& p, const RecordTable& table, std::string_view sensitive) {
  const auto col = column_of(table, sensitive);
  require_rows(p.total_rows);
  const auto global = value_counts(table, col);
  const double n = static_cast<double>(p.total_rows);
  double t = 0.0;
  for (const auto& [key, rows] : p.classes) {
    const auto local = value_counts(table, col, &rows);
    const double m = static_cast<double>(rows.size());
    double sum = 0.0;
    for (const auto& [v, c] : global) {
      auto it = local.find(v);
      const double q = it == local.end() ? 0.0 : static_cast<double>(it->second) / m;
      sum += std::abs(q - static_cast<double>(c) / n);
    }
    t = std::max(t, 0.5 * sum);
  }
  return std::clamp(t, 0.0, 1.0);
}

double attribute_entropy(const RecordTable& table, std::string_view attr) {
  const auto col = column_of(table, attr);
  require_rows(table.row_count());
  return entropy_of(value_counts(table, col), table.row_count());
}

double skew_score(const RecordTable& table, std::string_view attr) {
  const auto col = column_of(table, attr);
  require_rows(table.row_count());
  const auto counts = value_counts(table, col);
  if (counts.size() <= 1) return 0.0;
  const double s = 1.0 - entropy_of(counts, table.row_count()) / std::log2(static_cast<double>(counts.size()));
  return std::clamp(s, 0.0, 1.0);
}

RiskSummary summarize_risk(const RecordTable& table, std::span<const std::string> key_attrs,
                           std::span<const std::string> sensitive_attrs) {
  const auto p = partition(table, key_attrs);
  RiskSummary s;
  s.key_attrs = p.key_attrs;
  s.k = k_anonymity(p);
  s.class_count = p.classes.size();
  for (const auto& [key, rows] : p.classes) s.singleton_classes += rows.size() == 1;
  for (const auto& a : sensitive_attrs) {
    const auto name = normalize_attribute(a);
    s.l_per_sensitive[name] = l_diversity(p, table, name);
    s.t_per_sensitive[name] = t_closeness(p, table, name);
  }
  for (const auto& a : p.key_attrs) {
    s.skew[a] = skew_score(table, a);
    s.entropy[a] = attribute_entropy(table, a);
  }
  return s;
}

std::vector<EntryPointFinding> vulnerable_entry_points(const RecordTable& table, std::span<const std::string> qi_attrs,
                                                       std::size_t threshold, bool subsets) {
  if (qi_attrs.empty()) throw Error(ErrorCode::kInvalidArgument, "entry-point key is empty");
  std::vector<std::string> names;
  for (const auto& a : qi_attrs) {
    names.push_back(normalize_attribute(a));
    table.column(names.back());
  }
  if (subsets && names.size() > 16) throw Error(ErrorCode::kInvalidArgument, "too many attributes for --subsets");

  // Subsets as sorted index lists: fewer attributes first, then lexicographic.
  std::vector<std::vector<std::size_t>> keys;
  if (subsets) {
    for (std::uint32_t mask = 1; mask < (1u << names.size()); ++mask) {
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < names.size(); ++i) {
        if (mask & (1u << i)) idx.push_back(i);
      }
      keys.push_back(std::move(idx));
    }
    std::sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) {
      return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
  } else {
    keys.emplace_back(names.size());
    std::iota(keys.back().begin(), keys.back().end(), 0);
  }

  struct Ranked {
    std::size_t subset;
    EntryPointFinding finding;
  };
  std::vector<Ranked> found;
  if (threshold == 0) return {};
  for (std::size_t s = 0; s < keys.size(); ++s) {
    std::vector<std::string> attrs;
    for (auto i : keys[s]) attrs.push_back(names[i]);
    auto p = partition(table, attrs);
    for (auto& [key, rows] : p.classes) {
      if (rows.size() <= threshold) found.push_back({s, {attrs, key, rows.size(), rows}});
    }
  }
  std::stable_sort(found.begin(), found.end(), [](const Ranked& a, const Ranked& b) {
    if (a.finding.class_size != b.finding.class_size) return a.finding.class_size < b.finding.class_size;
    if (a.subset != b.subset) return a.subset < b.subset;
    return a.finding.key < b.finding.key;
  });
  std::vector<EntryPointFinding> out;
  out.reserve(found.size());
  for (auto& r : found) out.push_back(std::move(r.finding));
  return out;
}

nlohmann::json to_json(const RiskSummary& s) {
  return {{"key_attrs", s.key_attrs},
          {"k", s.k},
          {"class_count", s.class_count},
          {"singleton_classes", s.singleton_classes},
          {"l", s.l_per_sensitive},
          {"t", s.t_per_sensitive},
          {"skew", s.skew},
          {"entropy", s.entropy}};
}

nlohmann::json to_json(const EntryPointFinding& f) {
  return {{"key_attrs", f.key_attrs}, {"key", f.key}, {"class_size", f.class_size}, {"rows", f.rows}};
}

}  // namespace riskcal
