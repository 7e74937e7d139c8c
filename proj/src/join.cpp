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

#include "riskcal/join.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "riskcal/error.hpp"
#include "riskcal/risk_metrics.hpp"
#include "riskcal/util.hpp"

namespace riskcal {

namespace {

struct KeyHash {
  std::size_t operator()(const KeyTuple& k) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (const auto& s : k) h = (h ^ fnv1a64(s)) * 1099511628211ull;
    return static_cast<std::size_t>(h);
  }
};

using RowIndex = std::unordered_map<KeyTuple, std::vector<std::size_t>, KeyHash>;

bool has_blank(const KeyTuple& k) {
  return std::any_of(k.begin(), k.end(), [](const std::string& s) { return s.empty(); });
}

std::vector<std::string> normalized(std::span<const std::string> key) {
  if (key.empty()) throw Error(ErrorCode::kInvalidArgument, "join key is empty");
  std::vector<std::string> out;
  for (const auto& k : key) {
    auto n = normalize_attribute(k);
    if (std::find(out.begin(), out.end(), n) != out.end()) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate key attribute " + n);
    }
    out.push_back(std::move(n));
  }
  return out;
}

RowIndex index_rows(const RecordTable& t, const std::vector<std::string>& key) {
  const auto cols = t.columns(key);
  RowIndex idx;
  for (std::size_t r = 0; r < t.row_count(); ++r) {
    auto k = t.key_of(r, cols);
    if (!has_blank(k)) idx[std::move(k)].push_back(r);
  }
  return idx;
}

double safe_entropy(const RecordTable& t, const std::string& attr) {
  return t.empty() ? 0.0 : attribute_entropy(t, attr);
}

int class_rank(SemanticClass c) {
  switch (c) {
    case SemanticClass::kQuasiIdentifier: return 0;
    case SemanticClass::kLinking: return 1;
    default: return 2;
  }
}

}  // namespace

AttributeSet shared_attributes(std::span<const AttributeDescriptor> a, std::span<const AttributeDescriptor> b) {
  AttributeSet left, out;
  for (const auto& x : a) left.insert(x.normalized_name);
  for (const auto& x : b) {
    if (left.count(x.normalized_name)) out.insert(x.normalized_name);
  }
  return out;
}

AttributeSet shared_attributes(const DatasetMetadata& a, const DatasetMetadata& b) {
  return shared_attributes(a.attributes, b.attributes);
}

AttributeSet shared_attributes(const RecordTable& a, const RecordTable& b) {
  return shared_attributes(a.attributes(), b.attributes());
}

std::vector<SharedAttribute> rank_shared_attributes(const RecordTable& a, const RecordTable& b,
                                                    const QuasiIdentifierDictionary& dict) {
  std::vector<SharedAttribute> out;
  for (const auto& name : shared_attributes(a, b)) {
    out.push_back({name, dict.classify(name), safe_entropy(a, name), safe_entropy(b, name)});
  }
  std::sort(out.begin(), out.end(), [](const SharedAttribute& x, const SharedAttribute& y) {
    const int cx = class_rank(x.semantic_class), cy = class_rank(y.semantic_class);
    if (cx != cy) return cx < cy;
    if (x.min_entropy() != y.min_entropy()) return x.min_entropy() > y.min_entropy();
    return x.name < y.name;
  });
  return out;
}

std::vector<std::string> auto_join_key(const RecordTable& a, const RecordTable& b, const QuasiIdentifierDictionary& dict,
                                       std::size_t max_attrs) {
  const auto ranked = rank_shared_attributes(a, b, dict);
  if (ranked.empty()) throw Error(ErrorCode::kNoSharedAttributes, "the datasets share no attributes");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < ranked.size() && i < std::max<std::size_t>(max_attrs, 1); ++i) {
    out.push_back(ranked[i].name);
  }
  return out;
}

JoinabilityScore joinability_risk(const RecordTable& a, const RecordTable& b, std::span<const std::string> key) {
  const auto names = normalized(key);
  const auto left = index_rows(a, names);
  const auto right = index_rows(b, names);
  JoinabilityScore s;
  s.left_distinct_keys = left.size();
  s.right_distinct_keys = right.size();
  std::size_t unique = 0;
  for (const auto& [k, rows] : left) {
    auto it = right.find(k);
    if (it == right.end()) continue;
    ++s.matched_distinct_keys;
    unique += rows.size() == 1 && it->second.size() == 1;
  }
  const auto denom = std::min(left.size(), right.size());
  if (denom > 0) s.containment = static_cast<double>(s.matched_distinct_keys) / static_cast<double>(denom);
  if (s.matched_distinct_keys > 0) {
    s.unique_match_fraction = static_cast<double>(unique) / static_cast<double>(s.matched_distinct_keys);
  }
  s.risk = s.containment * s.unique_match_fraction;
  return s;
}

double containment(const RecordTable& a, const RecordTable& b, std::span<const std::string> key) {
  return joinability_risk(a, b, key).containment;
}

std::uint64_t pair_count(std::uint64_t members) noexcept { return members < 2 ? 0 : members * (members - 1) / 2; }

std::vector<PairScore> rank_pairs(const std::vector<std::string>& members, const TableLookup& tables,
                                  const QuasiIdentifierDictionary& dict) {
  if (members.size() < 2) throw Error(ErrorCode::kInsufficientMembers, "pair ranking needs at least two datasets");
  auto ids = members;
  std::sort(ids.begin(), ids.end());
  std::vector<PairScore> out;
  out.reserve(pair_count(ids.size()));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      const auto& a = tables(ids[i]);
      const auto& b = tables(ids[j]);
      PairScore p{{ids[i], ids[j], {}}, {}};
      if (!shared_attributes(a, b).empty()) {
        p.spec.key_attrs = auto_join_key(a, b, dict);
        p.score = joinability_risk(a, b, p.spec.key_attrs);
      }
      out.push_back(std::move(p));
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const PairScore& x, const PairScore& y) {
    if (x.score.risk != y.score.risk) return x.score.risk > y.score.risk;
    if (x.score.containment != y.score.containment) return x.score.containment > y.score.containment;
    return std::tie(x.spec.left_id, x.spec.right_id) < std::tie(y.spec.left_id, y.spec.right_id);
  });
  return out;
}

JoinResult execute_join(const RecordTable& a, const RecordTable& b, const JoinSpec& spec, std::size_t row_cap) {
  JoinResult result;
  result.spec = spec;
  result.spec.key_attrs = normalized(spec.key_attrs);
  const auto left = index_rows(a, result.spec.key_attrs);
  const auto right = index_rows(b, result.spec.key_attrs);
  for (const auto& [k, rows] : left) {
    auto it = right.find(k);
    if (it != right.end()) result.matches.emplace(k, Match{rows, it->second});
  }
  for (const auto& [k, m] : result.matches) {
    result.total_joined_rows += m.left_rows.size() * m.right_rows.size();
    for (auto l : m.left_rows) {
      for (auto r : m.right_rows) {
        if (result.joined_rows.size() >= row_cap) {
          result.truncated = true;
          continue;
        }
        result.joined_rows.emplace_back(l, r);
      }
    }
  }
  return result;
}

std::string_view to_string(DisclosureKind k) noexcept {
  return k == DisclosureKind::kIdentity ? "identity" : "attribute";
}

std::string_view to_string(LocatedSide s) noexcept {
  switch (s) {
    case LocatedSide::kBoth: return "both";
    case LocatedSide::kLeft: return "left";
    case LocatedSide::kRight: return "right";
  }
  return "both";
}

std::vector<DisclosureCandidate> detect_disclosures(const JoinResult& result,
                                                    std::span<const AttributeDescriptor> left_attrs,
                                                    std::span<const AttributeDescriptor> right_attrs,
                                                    const QuasiIdentifierDictionary& dict) {
  auto revealing = [&](std::span<const AttributeDescriptor> from, std::span<const AttributeDescriptor> into) {
    std::set<std::string> present;
    for (const auto& a : into) present.insert(a.normalized_name);
    std::vector<std::string> out;
    for (const auto& a : from) {
      const auto c = dict.classify(a.normalized_name);
      if ((c == SemanticClass::kSensitive || c == SemanticClass::kLinking) && !present.count(a.normalized_name)) {
        out.push_back(a.normalized_name);
      }
    }
    return out;
  };
  const auto right_reveals = revealing(right_attrs, left_attrs);
  const auto left_reveals = revealing(left_attrs, right_attrs);

  std::vector<DisclosureCandidate> identity, attribute;
  for (const auto& [key, m] : result.matches) {
    if (m.left_rows.size() == 1 && m.right_rows.size() == 1) {
      identity.push_back({DisclosureKind::kIdentity, key, m.left_rows[0], m.right_rows[0], LocatedSide::kBoth, {}});
    }
    if (m.left_rows.size() == 1 && !right_reveals.empty()) {
      for (auto r : m.right_rows) {
        attribute.push_back({DisclosureKind::kAttribute, key, m.left_rows[0], r, LocatedSide::kLeft, right_reveals});
      }
    }
    if (m.right_rows.size() == 1 && !left_reveals.empty()) {
      for (auto l : m.left_rows) {
        attribute.push_back({DisclosureKind::kAttribute, key, l, m.right_rows[0], LocatedSide::kRight, left_reveals});
      }
    }
  }
  auto order = [](const DisclosureCandidate& x, const DisclosureCandidate& y) {
    return std::tie(x.key, x.left_row, x.right_row, x.located) < std::tie(y.key, y.left_row, y.right_row, y.located);
  };
  std::sort(identity.begin(), identity.end(), order);
  std::sort(attribute.begin(), attribute.end(), order);
  identity.insert(identity.end(), attribute.begin(), attribute.end());
  return identity;
}

std::vector<TransitiveCandidate> transitive_candidates(const std::vector<DatasetMetadata>& collection,
                                                       const TableLookup& tables,
                                                       const QuasiIdentifierDictionary& dict, double min_risk) {
  std::vector<const DatasetMetadata*> ds;
  for (const auto& m : collection) ds.push_back(&m);
  std::sort(ds.begin(), ds.end(), [](auto* x, auto* y) { return x->ref() < y->ref(); });
  const std::size_t n = ds.size();
  if (n < 3) return {};

  std::vector<std::vector<bool>> shares_qi(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      bool any = false;
      for (const auto& a : shared_attributes(*ds[i], *ds[j])) {
        any = any || dict.classify(a) == SemanticClass::kQuasiIdentifier;
      }
      shares_qi[i][j] = shares_qi[j][i] = any;
    }
  }

  // Hop scores are reused across endpoint pairs.
  std::map<std::pair<std::size_t, std::size_t>, std::pair<std::vector<std::string>, JoinabilityScore>> hops;
  auto hop = [&](std::size_t x, std::size_t y) -> const auto& {
    auto k = std::minmax(x, y);
    auto it = hops.find(k);
    if (it == hops.end()) {
      const auto& tx = tables(ds[k.first]->ref());
      const auto& ty = tables(ds[k.second]->ref());
      auto key = auto_join_key(tx, ty, dict);
      auto score = joinability_risk(tx, ty, key);
      it = hops.emplace(k, std::make_pair(std::move(key), score)).first;
    }
    return it->second;
  };

  std::vector<TransitiveCandidate> out;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t c = a + 1; c < n; ++c) {
      if (shares_qi[a][c]) continue;
      for (std::size_t b = 0; b < n; ++b) {
        if (b == a || b == c || !shares_qi[a][b] || !shares_qi[b][c]) continue;
        const auto& ab = hop(a, b);
        if (ab.second.risk < min_risk) continue;
        const auto& bc = hop(b, c);
        if (bc.second.risk < min_risk) continue;
        out.push_back({ds[a]->ref(), ds[c]->ref(), ds[b]->ref(), ab.first, bc.first, ab.second, bc.second});
      }
    }
  }
  return out;
}

double mean_match_multiplicity(const JoinResult& result) {
  if (result.matches.empty()) return 0.0;
  return static_cast<double>(result.total_joined_rows) / static_cast<double>(result.matches.size());
}

std::vector<FeatureSuggestion> suggest_features(const JoinResult& result, std::span<const std::string> unused_shared,
                                                const RecordTable& a, const RecordTable& b) {
  std::vector<FeatureSuggestion> out;
  if (result.matches.empty()) return out;
  const double before = mean_match_multiplicity(result);
  for (const auto& raw : unused_shared) {
    const auto attr = normalize_attribute(raw);
    if (std::find(result.spec.key_attrs.begin(), result.spec.key_attrs.end(), attr) != result.spec.key_attrs.end()) {
      continue;
    }
    auto spec = result.spec;
    spec.key_attrs.push_back(attr);
    const auto after = execute_join(a, b, spec, 0);
    FeatureSuggestion f;
    f.attr = attr;
    f.mean_multiplicity_before = before;
    f.matched_keys_after = after.matches.size();
    if (after.matches.empty()) {
      f.overconstraining = true;
    } else {
      f.mean_multiplicity_after = mean_match_multiplicity(after);
      f.separation_gain = std::clamp((before - f.mean_multiplicity_after) / before, 0.0, 1.0);
    }
    out.push_back(std::move(f));
  }
  std::sort(out.begin(), out.end(), [](const FeatureSuggestion& x, const FeatureSuggestion& y) {
    if (x.overconstraining != y.overconstraining) return !x.overconstraining;
    if (x.separation_gain != y.separation_gain) return x.separation_gain > y.separation_gain;
    return x.attr < y.attr;
  });
  return out;
}

nlohmann::json to_json(const JoinSpec& s) {
  return {{"left", s.left_id}, {"right", s.right_id}, {"key", s.key_attrs}};
}

nlohmann::json to_json(const JoinabilityScore& s) {
  return {{"containment", s.containment},
          {"matched_distinct_keys", s.matched_distinct_keys},
          {"unique_match_fraction", s.unique_match_fraction},
          {"risk", s.risk},
          {"left_distinct_keys", s.left_distinct_keys},
          {"right_distinct_keys", s.right_distinct_keys}};
}

nlohmann::json to_json(const PairScore& p) {
  return {{"left", p.spec.left_id}, {"right", p.spec.right_id}, {"key", p.spec.key_attrs}, {"score", to_json(p.score)}};
}

nlohmann::json to_json(const DisclosureCandidate& c) {
  return {{"kind", to_string(c.kind)},
          {"key", c.key},
          {"left_row", c.left_row},
          {"right_row", c.right_row},
          {"located", to_string(c.located)},
          {"revealed_attrs", c.revealed_attrs}};
}

nlohmann::json to_json(const TransitiveCandidate& c) {
  return {{"endpoint_a", c.endpoint_a},
          {"endpoint_c", c.endpoint_c},
          {"bridge_b", c.bridge_b},
          {"key_ab", c.key_ab},
          {"key_bc", c.key_bc},
          {"score_ab", to_json(c.score_ab)},
          {"score_bc", to_json(c.score_bc)}};
}

nlohmann::json to_json(const FeatureSuggestion& f) {
  nlohmann::json j{{"attr", f.attr},
                   {"separation_gain", f.separation_gain},
                   {"mean_multiplicity_before", f.mean_multiplicity_before},
                   {"mean_multiplicity_after", f.mean_multiplicity_after},
                   {"matched_keys_after", f.matched_keys_after}};
  if (f.overconstraining) j["tag"] = "overconstraining";
  return j;
}

}  // namespace riskcal
