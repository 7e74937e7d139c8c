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

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "riskcal/catalog.hpp"
#include "riskcal/cluster.hpp"

namespace riskcal {

struct JoinSpec {
  std::string left_id;
  std::string right_id;
  std::vector<std::string> key_attrs;

  friend bool operator==(const JoinSpec&, const JoinSpec&) = default;
};

struct JoinabilityScore {
  double containment = 0.0;
  std::size_t matched_distinct_keys = 0;
  double unique_match_fraction = 0.0;
  double risk = 0.0;
  std::size_t left_distinct_keys = 0;
  std::size_t right_distinct_keys = 0;

  friend bool operator==(const JoinabilityScore&, const JoinabilityScore&) = default;
};

struct Match {
  std::vector<std::size_t> left_rows;
  std::vector<std::size_t> right_rows;

  friend bool operator==(const Match&, const Match&) = default;
};

inline constexpr std::size_t kDefaultJoinRowCap = 100000;

struct JoinResult {
  JoinSpec spec;
  std::map<KeyTuple, Match> matches;
  /// Ordered by key tuple, then left row, then right row; at most the cap.
  std::vector<std::pair<std::size_t, std::size_t>> joined_rows;
  /// Uncapped Σ |left| · |right| over matches.
  std::size_t total_joined_rows = 0;
  bool truncated = false;
};

/// Shared normalized attribute names.
AttributeSet shared_attributes(std::span<const AttributeDescriptor> a, std::span<const AttributeDescriptor> b);
AttributeSet shared_attributes(const DatasetMetadata& a, const DatasetMetadata& b);
AttributeSet shared_attributes(const RecordTable& a, const RecordTable& b);

struct SharedAttribute {
  std::string name;
  SemanticClass semantic_class = SemanticClass::kOther;
  double left_entropy = 0.0;
  double right_entropy = 0.0;

  double min_entropy() const { return std::min(left_entropy, right_entropy); }
};

/// Shared attributes in key-preference order: quasi-identifiers, then linking
/// attributes, then the rest; within a group by descending minimum
/// per-dataset entropy, then by name.
std::vector<SharedAttribute> rank_shared_attributes(const RecordTable& a, const RecordTable& b,
                                                    const QuasiIdentifierDictionary& dict);

inline constexpr std::size_t kDefaultMaxKeyAttrs = 4;

/// The first max_attrs of rank_shared_attributes. Throws
/// Error(kNoSharedAttributes).
std::vector<std::string> auto_join_key(const RecordTable& a, const RecordTable& b,
                                       const QuasiIdentifierDictionary& dict,
                                       std::size_t max_attrs = kDefaultMaxKeyAttrs);

/// Key tuples containing a blank cell are ignored throughout: they never
/// match and are not counted as distinct keys.
double containment(const RecordTable& a, const RecordTable& b, std::span<const std::string> key);
JoinabilityScore joinability_risk(const RecordTable& a, const RecordTable& b, std::span<const std::string> key);

struct PairScore {
  JoinSpec spec;
  JoinabilityScore score;
};

/// m(m-1)/2.
std::uint64_t pair_count(std::uint64_t members) noexcept;

using TableLookup = std::function<const RecordTable&(const std::string& id)>;

/// Every unordered member pair (left id < right id) keyed by auto_join_key
/// and scored; pairs without shared attributes get an empty key and zero
/// scores. Ordered by descending risk, descending containment, then ids.
/// Throws Error(kInsufficientMembers) for fewer than two members.
std::vector<PairScore> rank_pairs(const std::vector<std::string>& members, const TableLookup& tables,
                                  const QuasiIdentifierDictionary& dict);

/// Throws Error(kUnknownAttribute), Error(kInvalidArgument) for an empty key.
JoinResult execute_join(const RecordTable& a, const RecordTable& b, const JoinSpec& spec,
                        std::size_t row_cap = kDefaultJoinRowCap);

enum class DisclosureKind { kIdentity, kAttribute };
std::string_view to_string(DisclosureKind k) noexcept;

/// Which side holds the uniquely matched record.
enum class LocatedSide { kBoth, kLeft, kRight };
std::string_view to_string(LocatedSide s) noexcept;

struct DisclosureCandidate {
  DisclosureKind kind = DisclosureKind::kIdentity;
  KeyTuple key;
  std::size_t left_row = 0;
  std::size_t right_row = 0;
  LocatedSide located = LocatedSide::kBoth;
  /// Sensitive or linking attributes of the other side that the located
  /// side's dataset lacks.
  std::vector<std::string> revealed_attrs;

  friend bool operator==(const DisclosureCandidate&, const DisclosureCandidate&) = default;
};

/// Identity candidates for 1×1 matches; attribute candidates wherever one
/// side's record is unique and the other side reveals something. Ordered
/// identity first, then by key tuple, rows and side.
std::vector<DisclosureCandidate> detect_disclosures(const JoinResult& result,
                                                    std::span<const AttributeDescriptor> left_attrs,
                                                    std::span<const AttributeDescriptor> right_attrs,
                                                    const QuasiIdentifierDictionary& dict);

struct TransitiveCandidate {
  std::string endpoint_a;
  std::string endpoint_c;
  std::string bridge_b;
  std::vector<std::string> key_ab;
  std::vector<std::string> key_bc;
  JoinabilityScore score_ab;
  JoinabilityScore score_bc;
};

/// Pairs (a, c), a < c, sharing no quasi-identifier, bridged by some b that
/// shares quasi-identifiers with both and reaches min_risk on both hops.
/// Ordered by (a, c, b).
std::vector<TransitiveCandidate> transitive_candidates(const std::vector<DatasetMetadata>& collection,
                                                       const TableLookup& tables,
                                                       const QuasiIdentifierDictionary& dict, double min_risk);

struct FeatureSuggestion {
  std::string attr;
  double separation_gain = 0.0;
  bool overconstraining = false;
  double mean_multiplicity_before = 0.0;
  double mean_multiplicity_after = 0.0;
  std::size_t matched_keys_after = 0;
};

/// Mean joined rows per matched key.
double mean_match_multiplicity(const JoinResult& result);

/// Re-joins with each candidate attribute appended to the key. Ordered by
/// descending gain then name; attributes that empty the join come last.
std::vector<FeatureSuggestion> suggest_features(const JoinResult& result, std::span<const std::string> unused_shared,
                                                const RecordTable& a, const RecordTable& b);

nlohmann::json to_json(const JoinSpec& s);
nlohmann::json to_json(const JoinabilityScore& s);
nlohmann::json to_json(const PairScore& p);
nlohmann::json to_json(const DisclosureCandidate& c);
nlohmann::json to_json(const TransitiveCandidate& c);
nlohmann::json to_json(const FeatureSuggestion& f);

}  // namespace riskcal
