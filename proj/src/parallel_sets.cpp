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

#include "riskcal/parallel_sets.hpp"

#include <algorithm>
#include <map>

#include <nlohmann/json.hpp>

#include "riskcal/error.hpp"
#include "riskcal/util.hpp"

namespace riskcal {

namespace {

enum class Source { kKey, kLeft, kRight, kTransition };

struct AxisReader {
  std::string name;
  Source source = Source::kKey;
  std::size_t left_col = 0;
  std::size_t right_col = 0;
};

std::string label(std::string_view cell) {
  const auto t = trim(cell);
  return t.empty() ? std::string(kBlankCategory) : std::string(t);
}

AxisReader resolve_axis(const std::string& raw, const JoinResult& result, const RecordTable& left,
                        const RecordTable& right) {
  const auto& key = result.spec.key_attrs;
  for (const auto* side : {"left.", "right."}) {
    const std::string prefix = side;
    if (raw.rfind(prefix, 0) != 0) continue;
    const auto attr = normalize_attribute(raw.substr(prefix.size()));
    const bool is_left = prefix == "left.";
    const auto& table = is_left ? left : right;
    const auto col = table.find_column(attr);
    if (!col) throw Error(ErrorCode::kUnknownAttribute, "no attribute " + attr + " on the " + side + " side");
    AxisReader r{prefix + attr, is_left ? Source::kLeft : Source::kRight, 0, 0};
    (is_left ? r.left_col : r.right_col) = *col;
    return r;
  }
  const auto attr = normalize_attribute(raw);
  const auto l = left.find_column(attr);
  const auto r = right.find_column(attr);
  if (std::find(key.begin(), key.end(), attr) != key.end() && l) return {attr, Source::kKey, *l, 0};
  if (l && r) return {attr, Source::kTransition, *l, *r};
  if (l) return {attr, Source::kLeft, *l, 0};
  if (r) return {attr, Source::kRight, 0, *r};
  throw Error(ErrorCode::kUnknownAttribute, "no attribute " + attr + " in the joined records");
}

std::string read(const AxisReader& a, const RecordTable& left, const RecordTable& right,
                 std::pair<std::size_t, std::size_t> row) {
  switch (a.source) {
    case Source::kKey:
    case Source::kLeft: return label(left.cell(row.first, a.left_col));
    case Source::kRight: return label(right.cell(row.second, a.right_col));
    case Source::kTransition: {
      auto l = label(left.cell(row.first, a.left_col));
      auto r = label(right.cell(row.second, a.right_col));
      return l == r ? l : l + std::string(kTransitionArrow) + r;
    }
  }
  return {};
}

std::vector<Category> ordered(const std::map<std::string, std::size_t>& counts) {
  std::vector<Category> out;
  for (const auto& [name, count] : counts) {
    if (name != kOtherCategory) out.push_back({name, count});
  }
  std::sort(out.begin(), out.end(), [](const Category& a, const Category& b) {
    return a.count != b.count ? a.count > b.count : a.name < b.name;
  });
  if (auto it = counts.find(std::string(kOtherCategory)); it != counts.end()) out.push_back({it->first, it->second});
  return out;
}

std::vector<Ribbon> ribbons_of(const std::map<std::pair<std::string, std::string>, std::size_t>& counts) {
  std::vector<Ribbon> out;
  for (const auto& [k, c] : counts) out.push_back({k.first, k.second, c});
  std::sort(out.begin(), out.end(), [](const Ribbon& a, const Ribbon& b) {
    if (a.count != b.count) return a.count > b.count;
    return std::tie(a.from, a.to) < std::tie(b.from, b.to);
  });
  return out;
}

}  // namespace

std::vector<std::string> joined_schema(const JoinResult& result, const RecordTable& left, const RecordTable& right) {
  std::vector<std::string> out = result.spec.key_attrs;
  const auto& key = result.spec.key_attrs;
  for (const auto* side : {&left, &right}) {
    for (const auto& a : side->attributes()) {
      if (std::find(key.begin(), key.end(), a.normalized_name) != key.end()) continue;
      out.push_back((side == &left ? "left." : "right.") + a.normalized_name);
    }
  }
  return out;
}

ParallelSetsModel parallel_sets_model(const JoinResult& result, const RecordTable& left, const RecordTable& right,
                                      std::span<const std::string> axes, std::size_t max_categories) {
  if (axes.empty()) throw Error(ErrorCode::kEmptySelection, "parallel sets need at least one axis");
  if (max_categories == 0) throw Error(ErrorCode::kInvalidArgument, "max_categories must be positive");
  std::vector<AxisReader> readers;
  for (const auto& a : axes) readers.push_back(resolve_axis(a, result, left, right));
  if (result.joined_rows.empty()) throw Error(ErrorCode::kEmptyResult, "the join produced no records");

  const auto& rows = result.joined_rows;
  std::vector<std::vector<std::string>> values(readers.size(), std::vector<std::string>(rows.size()));
  ParallelSetsModel model;
  model.total = rows.size();
  model.truncated = result.truncated;
  for (std::size_t a = 0; a < readers.size(); ++a) {
    std::map<std::string, std::size_t> counts;
    for (std::size_t r = 0; r < rows.size(); ++r) ++counts[values[a][r] = read(readers[a], left, right, rows[r])];
    auto cats = ordered(counts);
    if (cats.size() > max_categories) {
      std::map<std::string, std::size_t> kept;
      for (std::size_t i = 0; i < max_categories; ++i) kept[cats[i].name] = cats[i].count;
      for (auto& v : values[a]) {
        if (!kept.count(v)) v = std::string(kOtherCategory);
      }
      counts.clear();
      for (const auto& v : values[a]) ++counts[v];
      cats = ordered(counts);
    }
    model.axes.push_back({readers[a].name, std::move(cats)});
  }
  for (std::size_t a = 0; a + 1 < readers.size(); ++a) {
    std::map<std::pair<std::string, std::string>, std::size_t> counts;
    for (std::size_t r = 0; r < rows.size(); ++r) ++counts[{values[a][r], values[a + 1][r]}];
    model.ribbons.push_back(ribbons_of(counts));
  }
  return model;
}

ParallelSetsModel mask_categories(const ParallelSetsModel& model, std::string (*mask)(std::string_view)) {
  auto masked = [&](const std::string& name) {
    return name == kOtherCategory || name == kBlankCategory ? name : mask(name);
  };
  ParallelSetsModel out;
  out.total = model.total;
  out.truncated = model.truncated;
  for (const auto& axis : model.axes) {
    std::map<std::string, std::size_t> counts;
    for (const auto& c : axis.categories) counts[masked(c.name)] += c.count;
    out.axes.push_back({axis.attr, ordered(counts)});
  }
  for (const auto& band : model.ribbons) {
    std::map<std::pair<std::string, std::string>, std::size_t> counts;
    for (const auto& r : band) counts[{masked(r.from), masked(r.to)}] += r.count;
    out.ribbons.push_back(ribbons_of(counts));
  }
  return out;
}

nlohmann::json to_json(const ParallelSetsModel& m) {
  nlohmann::json axes = nlohmann::json::array();
  for (const auto& a : m.axes) {
    nlohmann::json cats = nlohmann::json::array();
    for (const auto& c : a.categories) cats.push_back({{"name", c.name}, {"count", c.count}});
    axes.push_back({{"attr", a.attr}, {"categories", cats}});
  }
  nlohmann::json ribbons = nlohmann::json::array();
  for (const auto& band : m.ribbons) {
    nlohmann::json b = nlohmann::json::array();
    for (const auto& r : band) b.push_back({{"from", r.from}, {"to", r.to}, {"count", r.count}});
    ribbons.push_back(b);
  }
  return {{"axes", axes}, {"ribbons", ribbons}, {"total", m.total}, {"truncated", m.truncated}};
}

}  // namespace riskcal
