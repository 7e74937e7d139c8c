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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace riskcal {

enum class SemanticClass { kQuasiIdentifier, kDirectIdentifier, kSensitive, kLinking, kOther };
enum class ValueKind { kCategorical, kNumeric, kDate, kFreeText };

std::string_view to_string(SemanticClass c) noexcept;
std::string_view to_string(ValueKind k) noexcept;
/// Throws Error(kInvalidArgument) on unknown names.
SemanticClass parse_semantic_class(std::string_view s);
ValueKind parse_value_kind(std::string_view s);

struct AttributeDescriptor {
  std::string raw_name;
  std::string normalized_name;
  SemanticClass semantic_class = SemanticClass::kOther;
  ValueKind value_kind = ValueKind::kCategorical;

  friend bool operator==(const AttributeDescriptor&, const AttributeDescriptor&) = default;
};

/// Lowercases, maps every non-alphanumeric ASCII character to a space,
/// collapses whitespace runs and trims. Bytes >= 0x80 pass through so UTF-8
/// names survive. Total and idempotent.
std::string normalize_attribute(std::string_view raw);

struct TermAddition {
  std::string name;
  SemanticClass semantic_class = SemanticClass::kQuasiIdentifier;
  bool override_existing = false;
};

/// Name-based vocabulary of attribute classes, synonym aliases and named
/// background-knowledge profiles. Immutable once built; expansion returns a
/// new value.
class QuasiIdentifierDictionary {
 public:
  using TermMap = std::map<std::string, SemanticClass, std::less<>>;
  using SynonymMap = std::map<std::string, std::string, std::less<>>;
  using ProfileMap = std::map<std::string, std::vector<std::string>, std::less<>>;

  /// The four seed quasi-identifiers only.
  static QuasiIdentifierDictionary seed();
  /// Curated default shipped with the tool (seed terms, police profile, common
  /// synonyms, linking/sensitive/direct-identifier vocabulary).
  static QuasiIdentifierDictionary defaults();

  /// Builds and validates. Throws Error(kInvalidDictionary) when a synonym
  /// target or profile member is missing from terms, or a seed term is not a
  /// quasi-identifier.
  QuasiIdentifierDictionary(TermMap terms, SynonymMap synonyms, ProfileMap profiles);

  static QuasiIdentifierDictionary from_json(const nlohmann::json& doc);
  static QuasiIdentifierDictionary load(const std::string& path);
  /// Resolves `--qi-dict` / RISKCAL_QI_DICT; falls back to defaults().
  static QuasiIdentifierDictionary load_configured(const std::optional<std::string>& flag_path);
  nlohmann::json to_json() const;

  const TermMap& terms() const noexcept { return terms_; }
  const SynonymMap& synonyms() const noexcept { return synonyms_; }
  const ProfileMap& profiles() const noexcept { return profiles_; }

  /// Canonical term for a normalized name (itself when not an alias).
  std::string resolve(std::string_view normalized) const;
  SemanticClass classify(std::string_view normalized) const;
  /// Throws Error(kUnknownProfile).
  const std::vector<std::string>& profile(std::string_view name) const;

  std::size_t count(SemanticClass c) const;

  friend bool operator==(const QuasiIdentifierDictionary&, const QuasiIdentifierDictionary&) = default;

 private:
  TermMap terms_;
  SynonymMap synonyms_;
  ProfileMap profiles_;
};

SemanticClass classify_attribute(std::string_view normalized, const QuasiIdentifierDictionary& dict);

/// Throws Error(kConflictingClassification) when an addition disagrees with an
/// existing term and does not set override_existing; Error(kInvalidArgument)
/// when a name normalizes to empty text.
QuasiIdentifierDictionary expand_dictionary(const QuasiIdentifierDictionary& dict,
                                            std::span<const TermAddition> additions);

/// Fraction of profile terms present among the attributes' normalized names.
/// Throws Error(kEmptyProfile).
double profile_coverage(std::span<const AttributeDescriptor> attrs,
                        std::span<const std::string> profile);

AttributeDescriptor describe_attribute(std::string_view raw, const QuasiIdentifierDictionary& dict,
                                       ValueKind kind = ValueKind::kCategorical);

}  // namespace riskcal
