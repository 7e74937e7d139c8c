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
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "riskcal/qi_profile.hpp"
#include "riskcal/record_table.hpp"
#include "riskcal/util.hpp"

namespace riskcal {

enum class ResourceKind { kDataset, kMap, kDataDictionary, kOther };

std::string_view to_string(ResourceKind k) noexcept;
/// Maps a catalog asset-type string ("dataset", "map", "data-dictionary", ...).
/// Unrecognized types become kOther.
ResourceKind parse_resource_kind(std::string_view s) noexcept;

struct PortalDescriptor {
  std::string domain;
  std::string display_name;
  std::uint64_t resource_count = 0;

  friend bool operator==(const PortalDescriptor&, const PortalDescriptor&) = default;
};

struct DatasetMetadata {
  std::string portal;
  std::string dataset_id;
  std::string title;
  std::string description;
  ResourceKind resource_kind = ResourceKind::kOther;
  std::vector<AttributeDescriptor> attributes;
  std::optional<std::uint64_t> row_count;
  Timestamp fetched_at{};

  /// "portal/dataset_id", the identifier used across the CLI and HTTP API.
  std::string ref() const { return portal + "/" + dataset_id; }
  std::vector<std::string> attribute_names() const;

  friend bool operator==(const DatasetMetadata&, const DatasetMetadata&) = default;
};

nlohmann::json to_json(const AttributeDescriptor& a);
AttributeDescriptor attribute_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DatasetMetadata& m);
DatasetMetadata metadata_from_json(const nlohmann::json& j);

/// Deterministic content key over (portal, dataset_id, fetched_at date). The
/// readable prefix is for people browsing the cache; the hash suffix keeps
/// keys distinct after sanitizing.
std::string cache_key(const DatasetMetadata& meta);

struct FetchOptions {
  std::optional<std::size_t> limit;
  /// Ragged rows throw RowSchemaMismatch instead of being dropped.
  bool strict_rows = false;
};

struct FetchStats {
  std::size_t rows_read = 0;
  std::size_t rows_dropped = 0;
};

/// Builds a table from CSV text whose header names the dataset's attributes.
/// Columns are matched by normalized name and emitted in metadata order;
/// extra CSV columns are ignored. Throws NotTabular, RowSchemaMismatch.
RecordTable table_from_csv(const DatasetMetadata& meta, std::string_view csv_text,
                           const FetchOptions& options = {}, FetchStats* stats = nullptr);
std::string table_to_csv(const RecordTable& table);

/// Parses the `results` array of a discovery-API style catalog document.
/// Throws MalformedCatalog.
std::vector<DatasetMetadata> parse_catalog_results(const nlohmann::json& results, const std::string& domain,
                                                   const QuasiIdentifierDictionary& dict, Timestamp fetched_at);

class CatalogSource {
 public:
  virtual ~CatalogSource() = default;
  virtual std::vector<PortalDescriptor> discover_portals() = 0;
  virtual std::vector<DatasetMetadata> harvest_metadata(const PortalDescriptor& portal) = 0;
  virtual RecordTable fetch_records(const DatasetMetadata& meta, const FetchOptions& options = {},
                                    FetchStats* stats = nullptr) = 0;
  virtual std::string describe() const = 0;
};

/// Offline corpus: `portals/<domain>/catalog.json` plus
/// `portals/<domain>/data/<dataset_id>.csv`. Fully deterministic; the
/// fetched_at stamp comes from the catalog's `snapshot` field.
class FixtureSource final : public CatalogSource {
 public:
  FixtureSource(std::filesystem::path root, QuasiIdentifierDictionary dict);

  std::vector<PortalDescriptor> discover_portals() override;
  std::vector<DatasetMetadata> harvest_metadata(const PortalDescriptor& portal) override;
  RecordTable fetch_records(const DatasetMetadata& meta, const FetchOptions& options = {},
                            FetchStats* stats = nullptr) override;
  std::string describe() const override { return root_.string(); }

 private:
  nlohmann::json load_catalog(const std::string& domain) const;

  std::filesystem::path root_;
  QuasiIdentifierDictionary dict_;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};
/// Performs one GET. Transport failures throw Error(kNetworkFailure).
using HttpGet = std::function<HttpResponse(const std::string& url)>;
HttpGet default_http_get(std::chrono::seconds timeout = std::chrono::seconds(30));

struct LiveSourceOptions {
  std::size_t page_size = 1000;
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  /// Row endpoint origin; "{domain}" is substituted.
  std::string rows_origin = "https://{domain}";
  HttpGet http;
};

/// Live driver for a discovery-API catalog (`<base>/domains`,
/// `<base>?domains=...&limit=&offset=`) and per-dataset CSV row endpoints
/// (`<origin>/resource/<id>.csv`).
class LiveCatalogSource final : public CatalogSource {
 public:
  LiveCatalogSource(std::string discovery_base, QuasiIdentifierDictionary dict, LiveSourceOptions options = {});

  std::vector<PortalDescriptor> discover_portals() override;
  std::vector<DatasetMetadata> harvest_metadata(const PortalDescriptor& portal) override;
  RecordTable fetch_records(const DatasetMetadata& meta, const FetchOptions& options = {},
                            FetchStats* stats = nullptr) override;
  std::string describe() const override { return base_; }

 private:
  std::string get_with_retry(const std::string& url) const;

  std::string base_;
  QuasiIdentifierDictionary dict_;
  LiveSourceOptions options_;
};

/// One file per cache_key under `<root>/tables/`, plus `<root>/metadata.jsonl`
/// with every harvested entry. Concurrent reads are safe; writes to one key
/// are serialized and atomic.
class CatalogCache {
 public:
  explicit CatalogCache(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }
  std::filesystem::path table_path(const DatasetMetadata& meta) const;
  bool has_table(const DatasetMetadata& meta) const;
  void store_table(const DatasetMetadata& meta, const RecordTable& table);
  RecordTable load_table(const DatasetMetadata& meta, const FetchOptions& options = {},
                         FetchStats* stats = nullptr) const;

  std::filesystem::path metadata_path() const { return root_ / "metadata.jsonl"; }
  bool has_metadata() const;
  void store_metadata(const std::vector<DatasetMetadata>& metadata);
  std::vector<DatasetMetadata> load_metadata() const;

 private:
  std::filesystem::path root_;
};

/// Serves a previously harvested cache directory as a source.
class CachedSource final : public CatalogSource {
 public:
  explicit CachedSource(std::filesystem::path root);

  std::vector<PortalDescriptor> discover_portals() override;
  std::vector<DatasetMetadata> harvest_metadata(const PortalDescriptor& portal) override;
  RecordTable fetch_records(const DatasetMetadata& meta, const FetchOptions& options = {},
                            FetchStats* stats = nullptr) override;
  std::string describe() const override { return cache_.root().string(); }

 private:
  CatalogCache cache_;
  std::vector<DatasetMetadata> metadata_;
};

/// http(s):// → live driver; a directory with metadata.jsonl → cached
/// source; any other path → fixture source.
std::unique_ptr<CatalogSource> open_source(const std::string& spec, const QuasiIdentifierDictionary& dict);

struct HarvestOptions {
  bool fetch_tables = true;
  bool refresh = false;
  std::optional<std::size_t> limit;
};

struct HarvestReport {
  std::vector<PortalDescriptor> portals;
  /// Sorted by (portal, dataset_id).
  std::vector<DatasetMetadata> metadata;
  std::size_t tables_fetched = 0;
  std::size_t tables_cached = 0;
  std::size_t rows_dropped = 0;
};

/// Discovers every portal, harvests metadata (portals in parallel, pages
/// sequentially) and, with a cache, stores dataset tables. Existing cache
/// entries are kept unless options.refresh is set.
HarvestReport harvest(CatalogSource& source, CatalogCache* cache, const HarvestOptions& options = {});

}  // namespace riskcal
