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

#include "riskcal/qi_profile.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <set>

#include <nlohmann/json.hpp>

#include "riskcal/error.hpp"
#include "riskcal/util.hpp"

namespace riskcal {

namespace {

constexpr std::string_view kSeedTerms[] = {"age", "sex", "race", "age group"};

}  // namespace

std::string_view to_string(SemanticClass c) noexcept {
  switch (c) {
    case SemanticClass::kQuasiIdentifier: return "quasi-identifier";
    case SemanticClass::kDirectIdentifier: return "direct-identifier";
    case SemanticClass::kSensitive: return "sensitive";
    case SemanticClass::kLinking: return "linking";
    case SemanticClass::kOther: return "other";
  }
  return "other";
}

std::string_view to_string(ValueKind k) noexcept {
  switch (k) {
    case ValueKind::kCategorical: return "categorical";
    case ValueKind::kNumeric: return "numeric";
    case ValueKind::kDate: return "date";
    case ValueKind::kFreeText: return "free-text";
  }
  return "categorical";
}

SemanticClass parse_semantic_class(std::string_view s) {
  for (auto c : {SemanticClass::kQuasiIdentifier, SemanticClass::kDirectIdentifier,
                 SemanticClass::kSensitive, SemanticClass::kLinking, SemanticClass::kOther}) {
    if (to_string(c) == s) return c;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown semantic class: " + std::string(s));
}

ValueKind parse_value_kind(std::string_view s) {
  for (auto k : {ValueKind::kCategorical, ValueKind::kNumeric, ValueKind::kDate, ValueKind::kFreeText}) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown value kind: " + std::string(s));
}

std::string normalize_attribute(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char ch : raw) {
    const auto c = static_cast<unsigned char>(ch);
    const bool keep = c >= 0x80 || std::isalnum(c);
    if (!keep) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += static_cast<char>(std::tolower(c));
  }
  return out;
}

QuasiIdentifierDictionary::QuasiIdentifierDictionary(TermMap terms, SynonymMap synonyms,
                                                     ProfileMap profiles)
    : terms_(std::move(terms)), synonyms_(std::move(synonyms)), profiles_(std::move(profiles)) {
  for (auto seed : kSeedTerms) {
    auto it = terms_.find(seed);
    if (it == terms_.end() || it->second != SemanticClass::kQuasiIdentifier) {
      throw Error(ErrorCode::kInvalidDictionary,
                  "seed term '" + std::string(seed) + "' must be a quasi-identifier");
    }
  }
  for (const auto& [alias, target] : synonyms_) {
    if (!terms_.contains(target)) {
      throw Error(ErrorCode::kInvalidDictionary,
                  "synonym '" + alias + "' targets unknown term '" + target + "'");
    }
  }
  for (const auto& [name, members] : profiles_) {
    for (const auto& m : members) {
      if (!terms_.contains(resolve(m))) {
        throw Error(ErrorCode::kInvalidDictionary,
                    "profile '" + name + "' member '" + m + "' is not a known term");
      }
    }
  }
}

QuasiIdentifierDictionary QuasiIdentifierDictionary::seed() {
  TermMap terms;
  for (auto s : kSeedTerms) terms.emplace(s, SemanticClass::kQuasiIdentifier);
  return {std::move(terms), {}, {}};
}

QuasiIdentifierDictionary QuasiIdentifierDictionary::defaults() {
  using SC = SemanticClass;
  TermMap terms;
  for (auto t : {"age", "sex", "race", "age group", "ethnicity", "date of birth", "zip code",
                 "location", "address", "neighborhood", "neighborhoodxy", "city", "language",
                 "marital status", "victim age", "victim gender", "victim race", "offender age",
                 "offender gender", "offender race"}) {
    terms.emplace(t, SC::kQuasiIdentifier);
  }
  for (auto t : {"case id", "incident number", "item number", "report number"}) {
    terms.emplace(t, SC::kLinking);
  }
  for (auto t : {"name", "first name", "last name", "full name", "ssn", "phone number", "email"}) {
    terms.emplace(t, SC::kDirectIdentifier);
  }
  for (auto t : {"charge", "charge description", "offense", "violation", "diagnosis",
                 "health condition", "income", "signal description"}) {
    terms.emplace(t, SC::kSensitive);
  }
  SynonymMap synonyms{
      {"gender", "sex"},
      {"dob", "date of birth"},
      {"birth date", "date of birth"},
      {"zip", "zip code"},
      {"zipcode", "zip code"},
      {"postal code", "zip code"},
      {"age range", "age group"},
      {"case number", "case id"},
      {"social security number", "ssn"},
      {"victim sex", "victim gender"},
      {"offender sex", "offender gender"},
  };
  ProfileMap profiles{
      {"police",
       {"victim age", "victim gender", "victim race", "offender age", "offender gender", "location"}},
      {"demographics", {"age", "sex", "race", "ethnicity", "zip code"}},
  };
  return {std::move(terms), std::move(synonyms), std::move(profiles)};
}

QuasiIdentifierDictionary QuasiIdentifierDictionary::from_json(const nlohmann::json& doc) {
  try {
    TermMap terms;
    for (const auto& [name, cls] : doc.at("terms").items()) {
      const auto n = normalize_attribute(name);
      if (n.empty()) throw Error(ErrorCode::kInvalidDictionary, "empty term name");
      terms[n] = parse_semantic_class(cls.get<std::string>());
    }
    SynonymMap synonyms;
    if (doc.contains("synonyms")) {
      for (const auto& [alias, target] : doc.at("synonyms").items()) {
        synonyms[normalize_attribute(alias)] = normalize_attribute(target.get<std::string>());
      }
    }
    ProfileMap profiles;
    if (doc.contains("profiles")) {
      for (const auto& [name, members] : doc.at("profiles").items()) {
        auto& list = profiles[name];
        for (const auto& m : members) list.push_back(normalize_attribute(m.get<std::string>()));
      }
    }
    return {std::move(terms), std::move(synonyms), std::move(profiles)};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidDictionary, std::string("malformed dictionary: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidArgument) throw Error(ErrorCode::kInvalidDictionary, e.what());
    throw;
  }
}

QuasiIdentifierDictionary QuasiIdentifierDictionary::load(const std::string& path) {
  const auto text = read_file(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidDictionary, path + ": " + e.what());
  }
  return from_json(doc);
}

QuasiIdentifierDictionary QuasiIdentifierDictionary::load_configured(
    const std::optional<std::string>& flag_path) {
  if (flag_path && !flag_path->empty()) return load(*flag_path);
  if (const char* env = std::getenv("RISKCAL_QI_DICT"); env && *env) return load(env);
  return defaults();
}

nlohmann::json QuasiIdentifierDictionary::to_json() const {
  nlohmann::json doc;
  auto& terms = doc["terms"] = nlohmann::json::object();
  for (const auto& [name, cls] : terms_) terms[name] = std::string(to_string(cls));
  doc["synonyms"] = synonyms_;
  doc["profiles"] = profiles_;
  return doc;
}

std::string QuasiIdentifierDictionary::resolve(std::string_view normalized) const {
  if (auto it = synonyms_.find(normalized); it != synonyms_.end()) return it->second;
  return std::string(normalized);
}

SemanticClass QuasiIdentifierDictionary::classify(std::string_view normalized) const {
  auto it = terms_.find(resolve(normalized));
  return it == terms_.end() ? SemanticClass::kOther : it->second;
}

const std::vector<std::string>& QuasiIdentifierDictionary::profile(std::string_view name) const {
  auto it = profiles_.find(name);
  if (it == profiles_.end()) throw Error(ErrorCode::kUnknownProfile, "unknown profile: " + std::string(name));
  return it->second;
}

std::size_t QuasiIdentifierDictionary::count(SemanticClass c) const {
  return static_cast<std::size_t>(
      std::count_if(terms_.begin(), terms_.end(), [c](const auto& kv) { return kv.second == c; }));
}

SemanticClass classify_attribute(std::string_view normalized, const QuasiIdentifierDictionary& dict) {
  return dict.classify(normalized);
}

QuasiIdentifierDictionary expand_dictionary(const QuasiIdentifierDictionary& dict,
                                            std::span<const TermAddition> additions) {
  auto terms = dict.terms();
  for (const auto& add : additions) {
    const auto name = dict.resolve(normalize_attribute(add.name));
    if (name.empty()) throw Error(ErrorCode::kInvalidArgument, "term name normalizes to empty text");
    auto [it, inserted] = terms.emplace(name, add.semantic_class);
    if (inserted || it->second == add.semantic_class) continue;
    if (!add.override_existing) {
      throw Error(ErrorCode::kConflictingClassification,
                  "'" + name + "' is already " + std::string(to_string(it->second)));
    }
    it->second = add.semantic_class;
  }
  return {std::move(terms), dict.synonyms(), dict.profiles()};
}

double profile_coverage(std::span<const AttributeDescriptor> attrs, std::span<const std::string> profile) {
  std::set<std::string> wanted;
  for (const auto& p : profile) wanted.insert(normalize_attribute(p));
  if (wanted.empty()) throw Error(ErrorCode::kEmptyProfile, "profile has no members");
  std::size_t hits = 0;
  for (const auto& w : wanted) {
    hits += std::any_of(attrs.begin(), attrs.end(),
                        [&](const AttributeDescriptor& a) { return a.normalized_name == w; });
  }
  return static_cast<double>(hits) / static_cast<double>(wanted.size());
}

AttributeDescriptor describe_attribute(std::string_view raw, const QuasiIdentifierDictionary& dict,
                                       ValueKind kind) {
  AttributeDescriptor d;
  d.raw_name = std::string(raw);
  d.normalized_name = normalize_attribute(raw);
  d.semantic_class = dict.classify(d.normalized_name);
  d.value_kind = kind;
  return d;
}

}  // namespace riskcal
