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

#include "riskcal/curation.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "riskcal/error.hpp"

namespace riskcal {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Relevance r) noexcept {
  switch (r) {
    case Relevance::kHumanSubject: return "human-subject";
    case Relevance::kNonHuman: return "non-human";
    case Relevance::kUndecided: return "undecided";
  }
  return "undecided";
}

std::string_view to_string(Granularity g) noexcept {
  switch (g) {
    case Granularity::kIndividualRecord: return "individual-record";
    case Granularity::kAggregate: return "aggregate";
    case Granularity::kUnknown: return "unknown";
  }
  return "unknown";
}

Relevance parse_relevance(std::string_view s) {
  for (auto r : {Relevance::kHumanSubject, Relevance::kNonHuman, Relevance::kUndecided}) {
    if (s == to_string(r)) return r;
  }
  throw Error(ErrorCode::kInvalidLabel, "unknown relevance: " + std::string(s));
}

Granularity parse_granularity(std::string_view s) {
  for (auto g : {Granularity::kIndividualRecord, Granularity::kAggregate, Granularity::kUnknown}) {
    if (s == to_string(g)) return g;
  }
  if (s == "individual") return Granularity::kIndividualRecord;
  throw Error(ErrorCode::kInvalidLabel, "unknown granularity: " + std::string(s));
}

json to_json(const CurationLabel& l) {
  json j{{"relevance", to_string(l.relevance)},
         {"granularity", to_string(l.granularity)},
         {"labeled_at", format_timestamp(l.labeled_at)}};
  j["note"] = l.note ? json(*l.note) : json(nullptr);
  return j;
}

CurationLabel label_from_json(const json& j) {
  CurationLabel l;
  l.relevance = parse_relevance(j.at("relevance").get<std::string>());
  l.granularity = parse_granularity(j.at("granularity").get<std::string>());
  if (j.contains("note") && j["note"].is_string() && !j["note"].get<std::string>().empty()) {
    l.note = j["note"].get<std::string>();
  }
  if (j.contains("labeled_at")) l.labeled_at = parse_timestamp(j["labeled_at"].get<std::string>());
  return l;
}

std::vector<DatasetMetadata> filter_tabular(const std::vector<DatasetMetadata>& metadata) {
  std::vector<DatasetMetadata> out;
  std::copy_if(metadata.begin(), metadata.end(), std::back_inserter(out), [](const DatasetMetadata& m) {
    return m.resource_kind == ResourceKind::kDataset && !m.attributes.empty();
  });
  return out;
}

std::vector<QiFiltered> filter_by_qi(const std::vector<DatasetMetadata>& datasets,
                                     const QuasiIdentifierDictionary& dict, std::size_t min_qi) {
  if (min_qi == 0) throw Error(ErrorCode::kInvalidArgument, "min_qi must be at least 1");
  std::vector<QiFiltered> out;
  for (const auto& m : datasets) {
    std::set<std::string> canonical;
    std::vector<std::string> hits;
    for (const auto& a : m.attributes) {
      if (dict.classify(a.normalized_name) != SemanticClass::kQuasiIdentifier) continue;
      if (canonical.insert(dict.resolve(a.normalized_name)).second) hits.push_back(a.normalized_name);
    }
    if (hits.size() >= min_qi) out.push_back({m, std::move(hits)});
  }
  return out;
}

std::vector<DatasetMetadata> rejected_by_qi(const std::vector<DatasetMetadata>& harvested,
                                            const QuasiIdentifierDictionary& dict, std::size_t min_qi) {
  const auto tabular = filter_tabular(harvested);
  std::set<std::string> kept;
  for (const auto& q : filter_by_qi(tabular, dict, min_qi)) kept.insert(q.metadata.ref());
  std::vector<DatasetMetadata> out;
  for (const auto& m : tabular) {
    if (!kept.count(m.ref())) out.push_back(m);
  }
  return out;
}

CollectionManifest::CollectionManifest(std::uint64_t resources, std::uint64_t tabular,
                                       std::vector<QiFiltered> retained)
    : resources_(resources), tabular_(tabular) {
  if (tabular > resources || retained.size() > tabular) {
    throw Error(ErrorCode::kInvalidArgument, "funnel stage counts must not increase");
  }
  for (auto& q : retained) {
    auto ref = q.metadata.ref();
    ManifestEntry e{std::move(q.metadata), std::move(q.qi_hits), {}, {}};
    if (!entries_.emplace(ref, std::move(e)).second) {
      throw Error(ErrorCode::kMalformedCatalog, "duplicate dataset " + ref);
    }
  }
}

const ManifestEntry& CollectionManifest::entry(const std::string& ref) const {
  auto it = entries_.find(ref);
  if (it == entries_.end()) throw Error(ErrorCode::kUnknownDataset, "not in manifest: " + ref);
  return it->second;
}

std::vector<std::pair<std::string, std::uint64_t>> CollectionManifest::stage_counts() const {
  const auto curated = std::count_if(entries_.begin(), entries_.end(), [](const auto& kv) {
    return kv.second.label.relevance == Relevance::kHumanSubject;
  });
  return {{kStageResources, resources_},
          {kStageTabular, tabular_},
          {kStageQiFiltered, entries_.size()},
          {kStageCurated, static_cast<std::uint64_t>(curated)}};
}

void CollectionManifest::apply_label(const std::string& ref, const CurationLabel& label) {
  auto it = entries_.find(ref);
  if (it == entries_.end()) throw Error(ErrorCode::kUnknownDataset, "not in manifest: " + ref);
  if (label.relevance == Relevance::kHumanSubject && label.granularity == Granularity::kUnknown) {
    throw Error(ErrorCode::kInvalidLabel, ref + ": human-subject datasets need a granularity");
  }
  auto& e = it->second;
  if (!e.history.empty() && e.label == label) return;
  e.label = label;
  e.history.push_back(label);
}

CollectionManifest make_manifest(const std::vector<DatasetMetadata>& harvested, const QuasiIdentifierDictionary& dict,
                                 std::size_t min_qi) {
  const auto tabular = filter_tabular(harvested);
  return CollectionManifest(harvested.size(), tabular.size(), filter_by_qi(tabular, dict, min_qi));
}

CollectionManifest label_dataset(CollectionManifest manifest, const std::string& ref, const CurationLabel& label) {
  manifest.apply_label(ref, label);
  return manifest;
}

std::vector<DatasetMetadata> build_collection(const CollectionManifest& manifest, bool strict) {
  std::vector<DatasetMetadata> out;
  std::vector<std::string> undecided;
  for (const auto& [ref, e] : manifest.entries()) {
    if (e.label.relevance == Relevance::kHumanSubject) out.push_back(e.metadata);
    if (e.label.relevance == Relevance::kUndecided) undecided.push_back(ref);
  }
  if (strict && !undecided.empty()) {
    throw Error(ErrorCode::kIncompleteLabeling,
                std::to_string(undecided.size()) + " undecided: " + join(undecided, ", "));
  }
  return out;
}

json FunnelReport::to_json() const {
  json stage_list = json::array();
  for (const auto& [name, count] : stages) stage_list.push_back({{"name", name}, {"count", count}});
  return {{"stages", stage_list}, {"granularity", {{"individual", individual}, {"aggregate", aggregate}}}};
}

std::string FunnelReport::to_json_text() const { return to_json().dump(2) + "\n"; }

std::string FunnelReport::to_text() const {
  std::string out;
  for (std::size_t i = 1; i < stages.size(); ++i) {
    if (i > 1) out += " → ";
    out += std::to_string(stages[i].second);
  }
  out += " (" + std::to_string(individual) + "/" + std::to_string(aggregate) + ")";
  return out;
}

FunnelReport funnel_report(const CollectionManifest& manifest) {
  FunnelReport r;
  r.stages = manifest.stage_counts();
  for (const auto& [ref, e] : manifest.entries()) {
    if (e.label.relevance != Relevance::kHumanSubject) continue;
    if (e.label.granularity == Granularity::kIndividualRecord) ++r.individual;
    if (e.label.granularity == Granularity::kAggregate) ++r.aggregate;
  }
  return r;
}

std::vector<LabelRecord> load_labels(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::kIoError, "no label file " + path.string());
  std::vector<LabelRecord> out;
  for (const auto& line : split(read_file(path), '\n')) {
    if (trim(line).empty()) continue;
    try {
      const auto j = json::parse(line);
      out.push_back({j.at("portal").get<std::string>() + "/" + j.at("dataset_id").get<std::string>(),
                     label_from_json(j)});
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kInvalidLabel, path.string() + ": " + e.what());
    }
  }
  return out;
}

void apply_labels(CollectionManifest& manifest, const std::vector<LabelRecord>& labels) {
  for (const auto& l : labels) manifest.apply_label(l.ref, l.label);
}

fs::path funnel_path(const fs::path& manifest_path) { return manifest_path.parent_path() / "funnel.json"; }

void save_manifest(const CollectionManifest& manifest, const fs::path& path) {
  std::string text;
  for (const auto& [ref, e] : manifest.entries()) {
    json history = json::array();
    for (const auto& h : e.history) history.push_back(to_json(h));
    json line{{"ref", ref},
              {"metadata", to_json(e.metadata)},
              {"qi_hits", e.qi_hits},
              {"label", to_json(e.label)},
              {"history", history}};
    text += line.dump() + "\n";
  }
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  write_file_atomic(path, text);
  write_file_atomic(funnel_path(path), funnel_report(manifest).to_json_text());
}

CollectionManifest load_manifest(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::kUnknownCollection, "no manifest at " + path.string());
  std::vector<QiFiltered> retained;
  std::vector<ManifestEntry> loaded;
  for (const auto& line : split(read_file(path), '\n')) {
    if (trim(line).empty()) continue;
    try {
      const auto j = json::parse(line);
      ManifestEntry e;
      e.metadata = metadata_from_json(j.at("metadata"));
      e.qi_hits = j.at("qi_hits").get<std::vector<std::string>>();
      for (const auto& h : j.value("history", json::array())) e.history.push_back(label_from_json(h));
      e.label = e.history.empty() ? label_from_json(j.at("label")) : e.history.back();
      retained.push_back({e.metadata, e.qi_hits});
      loaded.push_back(std::move(e));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kMalformedCatalog, path.string() + ": " + e.what());
    }
  }
  std::uint64_t resources = retained.size();
  std::uint64_t tabular = retained.size();
  if (fs::exists(funnel_path(path))) {
    try {
      const auto f = json::parse(read_file(funnel_path(path)));
      for (const auto& s : f.at("stages")) {
        if (s.at("name") == kStageResources) resources = s.at("count").get<std::uint64_t>();
        if (s.at("name") == kStageTabular) tabular = s.at("count").get<std::uint64_t>();
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kMalformedCatalog, funnel_path(path).string() + ": " + e.what());
    }
  }
  CollectionManifest m(resources, tabular, std::move(retained));
  for (const auto& e : loaded) {
    for (const auto& h : e.history) m.apply_label(e.metadata.ref(), h);
  }
  return m;
}

}  // namespace riskcal
