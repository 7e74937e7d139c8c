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

#include "riskcal/catalog.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <future>
#include <mutex>
#include <set>

#include <nlohmann/json.hpp>

#include "riskcal/csv.hpp"
#include "riskcal/error.hpp"

namespace riskcal {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(ResourceKind k) noexcept {
  switch (k) {
    case ResourceKind::kDataset: return "dataset";
    case ResourceKind::kMap: return "map";
    case ResourceKind::kDataDictionary: return "data-dictionary";
    case ResourceKind::kOther: return "other";
  }
  return "other";
}

ResourceKind parse_resource_kind(std::string_view s) noexcept {
  const auto n = normalize_attribute(s);
  if (n == "dataset") return ResourceKind::kDataset;
  if (n == "map") return ResourceKind::kMap;
  if (n == "data dictionary") return ResourceKind::kDataDictionary;
  return ResourceKind::kOther;
}

std::vector<std::string> DatasetMetadata::attribute_names() const {
  std::vector<std::string> out;
  out.reserve(attributes.size());
  for (const auto& a : attributes) out.push_back(a.normalized_name);
  return out;
}

json to_json(const AttributeDescriptor& a) {
  return json{{"raw_name", a.raw_name},
              {"normalized_name", a.normalized_name},
              {"semantic_class", to_string(a.semantic_class)},
              {"value_kind", to_string(a.value_kind)}};
}

AttributeDescriptor attribute_from_json(const json& j) {
  AttributeDescriptor a;
  a.raw_name = j.at("raw_name").get<std::string>();
  a.normalized_name = j.at("normalized_name").get<std::string>();
  a.semantic_class = parse_semantic_class(j.at("semantic_class").get<std::string>());
  a.value_kind = parse_value_kind(j.at("value_kind").get<std::string>());
  return a;
}

json to_json(const DatasetMetadata& m) {
  json attrs = json::array();
  for (const auto& a : m.attributes) attrs.push_back(to_json(a));
  json j{{"portal", m.portal},
         {"dataset_id", m.dataset_id},
         {"title", m.title},
         {"description", m.description},
         {"resource_kind", to_string(m.resource_kind)},
         {"attributes", std::move(attrs)},
         {"row_count", nullptr},
         {"fetched_at", format_timestamp(m.fetched_at)}};
  if (m.row_count) j["row_count"] = *m.row_count;
  return j;
}

DatasetMetadata metadata_from_json(const json& j) {
  try {
    DatasetMetadata m;
    m.portal = j.at("portal").get<std::string>();
    m.dataset_id = j.at("dataset_id").get<std::string>();
    m.title = j.value("title", "");
    m.description = j.value("description", "");
    m.resource_kind = parse_resource_kind(j.at("resource_kind").get<std::string>());
    for (const auto& a : j.at("attributes")) m.attributes.push_back(attribute_from_json(a));
    if (j.contains("row_count") && !j["row_count"].is_null()) m.row_count = j["row_count"].get<std::uint64_t>();
    m.fetched_at = parse_timestamp(j.at("fetched_at").get<std::string>());
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedCatalog, std::string("bad metadata record: ") + e.what());
  }
}

std::string cache_key(const DatasetMetadata& meta) {
  const auto date = format_date(meta.fetched_at);
  std::string material = meta.portal;
  material += '\x1f';
  material += meta.dataset_id;
  material += '\x1f';
  material += date;
  std::string readable;
  for (char c : meta.portal + "__" + meta.dataset_id) {
    const auto u = static_cast<unsigned char>(c);
    readable += (std::isalnum(u) || c == '-' || c == '.' || c == '_') ? c : '_';
  }
  if (readable.size() > 80) readable.resize(80);
  return readable + "__" + date + "__" + hex64(fnv1a64(material));
}

RecordTable table_from_csv(const DatasetMetadata& meta, std::string_view csv_text, const FetchOptions& options,
                           FetchStats* stats) {
  if (meta.resource_kind != ResourceKind::kDataset) {
    throw Error(ErrorCode::kNotTabular, meta.ref() + " is a " + std::string(to_string(meta.resource_kind)));
  }
  auto parsed = csv::parse(csv_text);
  if (parsed.empty()) throw Error(ErrorCode::kRowSchemaMismatch, meta.ref() + ": missing CSV header");
  const auto& header = parsed.front();
  const std::size_t width = header.size();

  std::vector<std::size_t> source_col;
  source_col.reserve(meta.attributes.size());
  for (const auto& a : meta.attributes) {
    auto it = std::find_if(header.begin(), header.end(),
                           [&](const std::string& h) { return normalize_attribute(h) == a.normalized_name; });
    if (it == header.end()) {
      throw Error(ErrorCode::kRowSchemaMismatch, meta.ref() + ": CSV header lacks attribute '" + a.normalized_name + "'");
    }
    source_col.push_back(static_cast<std::size_t>(it - header.begin()));
  }

  FetchStats local;
  std::vector<Row> rows;
  for (std::size_t r = 1; r < parsed.size(); ++r) {
    if (options.limit && rows.size() >= *options.limit) break;
    ++local.rows_read;
    const auto& raw = parsed[r];
    if (raw.size() != width) {
      if (options.strict_rows) {
        throw Error(ErrorCode::kRowSchemaMismatch, meta.ref() + ": row " + std::to_string(r) + " has " +
                                                       std::to_string(raw.size()) + " cells, header has " +
                                                       std::to_string(width));
      }
      ++local.rows_dropped;
      continue;
    }
    Row row;
    row.reserve(source_col.size());
    for (auto c : source_col) row.push_back(raw[c]);
    rows.push_back(std::move(row));
  }
  if (stats) {
    stats->rows_read += local.rows_read;
    stats->rows_dropped += local.rows_dropped;
  }
  return RecordTable(meta.attributes, std::move(rows));
}

std::string table_to_csv(const RecordTable& table) {
  std::string out;
  csv::Row header;
  for (const auto& a : table.attributes()) header.push_back(a.raw_name.empty() ? a.normalized_name : a.raw_name);
  out += csv::format_row(header);
  for (const auto& row : table.rows()) out += csv::format_row(row);
  return out;
}

namespace {

ValueKind value_kind_from_datatype(std::string_view datatype) {
  const auto t = normalize_attribute(datatype);
  if (t == "number" || t == "money" || t == "percent" || t == "double") return ValueKind::kNumeric;
  if (t == "calendar date" || t == "date" || t == "floating timestamp" || t == "fixed timestamp") {
    return ValueKind::kDate;
  }
  if (t == "long text" || t == "html" || t == "url") return ValueKind::kFreeText;
  return ValueKind::kCategorical;
}

}  // namespace

std::vector<DatasetMetadata> parse_catalog_results(const json& results, const std::string& domain,
                                                   const QuasiIdentifierDictionary& dict, Timestamp fetched_at) {
  if (!results.is_array()) throw Error(ErrorCode::kMalformedCatalog, domain + ": results is not an array");
  std::vector<DatasetMetadata> out;
  std::set<std::string> ids;
  try {
    for (const auto& item : results) {
      const auto& res = item.at("resource");
      DatasetMetadata m;
      m.portal = domain;
      if (item.contains("metadata") && item["metadata"].contains("domain")) {
        m.portal = item["metadata"]["domain"].get<std::string>();
      }
      m.dataset_id = res.at("id").get<std::string>();
      if (m.dataset_id.empty()) throw Error(ErrorCode::kMalformedCatalog, domain + ": empty resource id");
      if (!ids.insert(m.dataset_id).second) {
        throw Error(ErrorCode::kMalformedCatalog, domain + ": duplicate resource id " + m.dataset_id);
      }
      m.title = res.value("name", "");
      m.description = res.value("description", "");
      m.resource_kind = parse_resource_kind(res.value("type", "other"));
      const json empty = json::array();
      const auto& names = res.contains("columns_field_name") ? res["columns_field_name"]
                          : res.contains("columns_name")     ? res["columns_name"]
                                                             : empty;
      const auto& types = res.contains("columns_datatype") ? res["columns_datatype"] : empty;
      std::set<std::string> seen;
      for (std::size_t i = 0; i < names.size(); ++i) {
        const auto kind = i < types.size() ? value_kind_from_datatype(types[i].get<std::string>())
                                           : ValueKind::kCategorical;
        auto desc = describe_attribute(names[i].get<std::string>(), dict, kind);
        if (desc.normalized_name.empty() || !seen.insert(desc.normalized_name).second) continue;
        m.attributes.push_back(std::move(desc));
      }
      if (res.contains("row_count") && !res["row_count"].is_null()) m.row_count = res["row_count"].get<std::uint64_t>();
      m.fetched_at = fetched_at;
      out.push_back(std::move(m));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedCatalog, domain + ": " + e.what());
  }
  return out;
}

// ---------------------------------------------------------------------------
// FixtureSource

FixtureSource::FixtureSource(fs::path root, QuasiIdentifierDictionary dict)
    : root_(std::move(root)), dict_(std::move(dict)) {}

json FixtureSource::load_catalog(const std::string& domain) const {
  const auto path = root_ / "portals" / domain / "catalog.json";
  if (!fs::exists(path)) throw Error(ErrorCode::kUnknownPortal, "no fixture portal " + domain);
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedCatalog, path.string() + ": " + e.what());
  }
}

std::vector<PortalDescriptor> FixtureSource::discover_portals() {
  std::vector<PortalDescriptor> out;
  const auto dir = root_ / "portals";
  if (!fs::is_directory(dir)) {
    if (fs::is_directory(root_)) return out;
    throw Error(ErrorCode::kIoError, "fixture root does not exist: " + root_.string());
  }
  std::vector<std::string> domains;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory()) domains.push_back(entry.path().filename().string());
  }
  std::sort(domains.begin(), domains.end());
  for (const auto& d : domains) {
    const auto doc = load_catalog(d);
    try {
      PortalDescriptor p;
      p.domain = doc.at("portal").at("domain").get<std::string>();
      if (p.domain != d) throw Error(ErrorCode::kMalformedCatalog, d + ": portal.domain does not match directory");
      p.display_name = doc["portal"].value("display_name", p.domain);
      p.resource_count = doc.at("results").size();
      out.push_back(std::move(p));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kMalformedCatalog, d + ": " + e.what());
    }
  }
  return out;
}

std::vector<DatasetMetadata> FixtureSource::harvest_metadata(const PortalDescriptor& portal) {
  const auto doc = load_catalog(portal.domain);
  Timestamp snapshot{};
  try {
    snapshot = parse_timestamp(doc.at("snapshot").get<std::string>());
    return parse_catalog_results(doc.at("results"), portal.domain, dict_, snapshot);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedCatalog, portal.domain + ": " + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidArgument) throw Error(ErrorCode::kMalformedCatalog, e.what());
    throw;
  }
}

RecordTable FixtureSource::fetch_records(const DatasetMetadata& meta, const FetchOptions& options,
                                         FetchStats* stats) {
  if (meta.resource_kind != ResourceKind::kDataset) {
    throw Error(ErrorCode::kNotTabular, meta.ref() + " is a " + std::string(to_string(meta.resource_kind)));
  }
  const auto path = root_ / "portals" / meta.portal / "data" / (meta.dataset_id + ".csv");
  if (!fs::exists(path)) throw Error(ErrorCode::kUnknownDataset, "no fixture rows for " + meta.ref());
  return table_from_csv(meta, read_file(path), options, stats);
}

// ---------------------------------------------------------------------------
// CatalogCache

namespace {

std::mutex& key_mutex(const std::string& key) {
  static std::array<std::mutex, 64> stripes;
  return stripes[fnv1a64(key) % stripes.size()];
}

}  // namespace

CatalogCache::CatalogCache(fs::path root) : root_(std::move(root)) {}

fs::path CatalogCache::table_path(const DatasetMetadata& meta) const {
  return root_ / "tables" / (cache_key(meta) + ".csv");
}

bool CatalogCache::has_table(const DatasetMetadata& meta) const { return fs::exists(table_path(meta)); }

void CatalogCache::store_table(const DatasetMetadata& meta, const RecordTable& table) {
  const auto key = cache_key(meta);
  std::lock_guard lock(key_mutex(key));
  write_file_atomic(table_path(meta), table_to_csv(table));
}

RecordTable CatalogCache::load_table(const DatasetMetadata& meta, const FetchOptions& options,
                                     FetchStats* stats) const {
  const auto path = table_path(meta);
  if (!fs::exists(path)) throw Error(ErrorCode::kUnknownDataset, "not cached: " + meta.ref());
  return table_from_csv(meta, read_file(path), options, stats);
}

bool CatalogCache::has_metadata() const { return fs::exists(metadata_path()); }

void CatalogCache::store_metadata(const std::vector<DatasetMetadata>& metadata) {
  std::string text;
  for (const auto& m : metadata) text += to_json(m).dump() + "\n";
  std::lock_guard lock(key_mutex("metadata.jsonl"));
  write_file_atomic(metadata_path(), text);
}

std::vector<DatasetMetadata> CatalogCache::load_metadata() const {
  std::vector<DatasetMetadata> out;
  const auto text = read_file(metadata_path());
  for (const auto& line : split(text, '\n')) {
    if (trim(line).empty()) continue;
    try {
      out.push_back(metadata_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kMalformedCatalog, metadata_path().string() + ": " + e.what());
    }
  }
  return out;
}

CachedSource::CachedSource(fs::path root) : cache_(std::move(root)), metadata_(cache_.load_metadata()) {}

std::vector<PortalDescriptor> CachedSource::discover_portals() {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& m : metadata_) ++counts[m.portal];
  std::vector<PortalDescriptor> out;
  for (const auto& [domain, n] : counts) out.push_back({domain, domain, n});
  return out;
}

std::vector<DatasetMetadata> CachedSource::harvest_metadata(const PortalDescriptor& portal) {
  std::vector<DatasetMetadata> out;
  for (const auto& m : metadata_) {
    if (m.portal == portal.domain) out.push_back(m);
  }
  if (out.empty()) throw Error(ErrorCode::kUnknownPortal, "portal not in cache: " + portal.domain);
  return out;
}

RecordTable CachedSource::fetch_records(const DatasetMetadata& meta, const FetchOptions& options,
                                        FetchStats* stats) {
  if (meta.resource_kind != ResourceKind::kDataset) {
    throw Error(ErrorCode::kNotTabular, meta.ref() + " is a " + std::string(to_string(meta.resource_kind)));
  }
  return cache_.load_table(meta, options, stats);
}

std::unique_ptr<CatalogSource> open_source(const std::string& spec, const QuasiIdentifierDictionary& dict) {
  if (spec.rfind("http://", 0) == 0 || spec.rfind("https://", 0) == 0) {
    return std::make_unique<LiveCatalogSource>(spec, dict);
  }
  if (fs::exists(fs::path(spec) / "metadata.jsonl")) return std::make_unique<CachedSource>(spec);
  return std::make_unique<FixtureSource>(spec, dict);
}

// ---------------------------------------------------------------------------
// harvest

HarvestReport harvest(CatalogSource& source, CatalogCache* cache, const HarvestOptions& options) {
  HarvestReport report;
  report.portals = source.discover_portals();

  std::vector<std::future<std::vector<DatasetMetadata>>> pending;
  pending.reserve(report.portals.size());
  for (const auto& p : report.portals) {
    pending.push_back(std::async(std::launch::async, [&source, p] { return source.harvest_metadata(p); }));
  }
  for (auto& f : pending) {
    auto part = f.get();
    std::move(part.begin(), part.end(), std::back_inserter(report.metadata));
  }
  std::sort(report.metadata.begin(), report.metadata.end(), [](const auto& a, const auto& b) {
    return std::tie(a.portal, a.dataset_id) < std::tie(b.portal, b.dataset_id);
  });

  if (cache) {
    if (options.fetch_tables) {
      for (const auto& m : report.metadata) {
        if (m.resource_kind != ResourceKind::kDataset) continue;
        if (!options.refresh && cache->has_table(m)) {
          ++report.tables_cached;
          continue;
        }
        FetchStats stats;
        FetchOptions fetch;
        fetch.limit = options.limit;
        cache->store_table(m, source.fetch_records(m, fetch, &stats));
        report.rows_dropped += stats.rows_dropped;
        ++report.tables_fetched;
      }
    }
    cache->store_metadata(report.metadata);
  }
  return report;
}

}  // namespace riskcal
