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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "riskcal/catalog.hpp"

namespace riskcal {

enum class Relevance { kHumanSubject, kNonHuman, kUndecided };
enum class Granularity { kIndividualRecord, kAggregate, kUnknown };

std::string_view to_string(Relevance r) noexcept;
std::string_view to_string(Granularity g) noexcept;
/// Throw Error(kInvalidLabel) on unrecognized text.
Relevance parse_relevance(std::string_view s);
Granularity parse_granularity(std::string_view s);

struct CurationLabel {
  Relevance relevance = Relevance::kUndecided;
  Granularity granularity = Granularity::kUnknown;
  std::optional<std::string> note;
  Timestamp labeled_at{};

  friend bool operator==(const CurationLabel&, const CurationLabel&) = default;
};

nlohmann::json to_json(const CurationLabel& l);
CurationLabel label_from_json(const nlohmann::json& j);

struct QiFiltered {
  DatasetMetadata metadata;
  /// Normalized attribute names, one per distinct dictionary quasi-identifier.
  std::vector<std::string> qi_hits;
};

/// Keeps resource_kind = dataset with at least one attribute.
std::vector<DatasetMetadata> filter_tabular(const std::vector<DatasetMetadata>& metadata);

/// Keeps datasets carrying at least min_qi distinct quasi-identifiers (after
/// synonym resolution). Throws Error(kInvalidArgument) when min_qi is 0.
std::vector<QiFiltered> filter_by_qi(const std::vector<DatasetMetadata>& datasets,
                                     const QuasiIdentifierDictionary& dict, std::size_t min_qi = 2);

struct ManifestEntry {
  DatasetMetadata metadata;
  std::vector<std::string> qi_hits;
  CurationLabel label;
  /// Every label ever applied, oldest first; the last one equals `label`.
  std::vector<CurationLabel> history;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

inline constexpr const char* kStageResources = "resources";
inline constexpr const char* kStageTabular = "tabular";
inline constexpr const char* kStageQiFiltered = "qi-filtered";
inline constexpr const char* kStageCurated = "curated";

/// Qi-filtered datasets keyed by "portal/dataset_id", plus the counts of the
/// two earlier funnel stages that are not kept as entries.
class CollectionManifest {
 public:
  CollectionManifest() = default;
  CollectionManifest(std::uint64_t resources, std::uint64_t tabular, std::vector<QiFiltered> retained);

  const std::map<std::string, ManifestEntry>& entries() const noexcept { return entries_; }
  /// Throws Error(kUnknownDataset).
  const ManifestEntry& entry(const std::string& ref) const;
  bool contains(const std::string& ref) const { return entries_.count(ref) != 0; }

  std::uint64_t resources() const noexcept { return resources_; }
  std::uint64_t tabular() const noexcept { return tabular_; }

  /// Funnel order: resources, tabular, qi-filtered, curated.
  std::vector<std::pair<std::string, std::uint64_t>> stage_counts() const;

  /// Throws Error(kUnknownDataset), Error(kInvalidLabel) for a human-subject
  /// label without a known granularity. Re-applying the current label is a
  /// no-op.
  void apply_label(const std::string& ref, const CurationLabel& label);

  friend bool operator==(const CollectionManifest&, const CollectionManifest&) = default;

 private:
  std::uint64_t resources_ = 0;
  std::uint64_t tabular_ = 0;
  std::map<std::string, ManifestEntry> entries_;
};

/// Runs filter_tabular and filter_by_qi over everything harvested.
CollectionManifest make_manifest(const std::vector<DatasetMetadata>& harvested, const QuasiIdentifierDictionary& dict,
                                 std::size_t min_qi = 2);

CollectionManifest label_dataset(CollectionManifest manifest, const std::string& ref, const CurationLabel& label);

/// The human-subject entries, ordered by ref. With strict set, throws
/// Error(kIncompleteLabeling) while any entry is still undecided.
std::vector<DatasetMetadata> build_collection(const CollectionManifest& manifest, bool strict = false);

struct FunnelReport {
  std::vector<std::pair<std::string, std::uint64_t>> stages;
  std::uint64_t individual = 0;
  std::uint64_t aggregate = 0;

  nlohmann::json to_json() const;
  /// Pretty JSON with a trailing newline; the `funnel.json` format.
  std::string to_json_text() const;
  /// "60 → 41 → 18 → 11 (6/5)": stage counts after the first, then the
  /// individual/aggregate split of the curated stage.
  std::string to_text() const;
};

FunnelReport funnel_report(const CollectionManifest& manifest);

/// Tabular datasets dropped by filter_by_qi, for manual review.
std::vector<DatasetMetadata> rejected_by_qi(const std::vector<DatasetMetadata>& harvested,
                                            const QuasiIdentifierDictionary& dict, std::size_t min_qi = 2);

/// Label file lines: {"portal","dataset_id","relevance","granularity","note","labeled_at"}.
struct LabelRecord {
  std::string ref;
  CurationLabel label;
};
std::vector<LabelRecord> load_labels(const std::filesystem::path& path);
/// Applies records in file order; refs outside the manifest throw
/// Error(kUnknownDataset).
void apply_labels(CollectionManifest& manifest, const std::vector<LabelRecord>& labels);

/// `collection.jsonl` (one entry per line, ordered by ref) plus the sidecar
/// `funnel.json` in the same directory.
void save_manifest(const CollectionManifest& manifest, const std::filesystem::path& path);
/// Throws Error(kUnknownCollection) when the file is missing.
CollectionManifest load_manifest(const std::filesystem::path& path);
std::filesystem::path funnel_path(const std::filesystem::path& manifest_path);

}  // namespace riskcal
