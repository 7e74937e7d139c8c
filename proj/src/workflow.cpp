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

#include "riskcal/workflow.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>

#include "riskcal/error.hpp"
#include "riskcal/redaction.hpp"
#include "riskcal/risk_metrics.hpp"

namespace riskcal {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::pair<WorkflowStep, std::string_view> kStepNames[] = {
    {WorkflowStep::kCluster, "cluster"},         {WorkflowStep::kPairs, "pairs"},
    {WorkflowStep::kJoin, "join"},               {WorkflowStep::kSuggest, "suggest"},
    {WorkflowStep::kParallelSets, "parallel_sets"}, {WorkflowStep::kDisclosures, "disclosures"},
};

void check_stop(std::stop_token stop) {
  if (stop.stop_requested()) throw Error(ErrorCode::kCancelled, "step cancelled");
}

void out_of_order(WorkflowStep step, std::string_view needs) {
  throw Error(ErrorCode::kStepOutOfOrder, std::string(to_string(step)) + " requires " + std::string(needs));
}

template <typename T>
T param(const json& params, const char* name, T fallback) {
  if (!params.is_object() || !params.contains(name) || params[name].is_null()) return fallback;
  try {
    return params[name].get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::kInvalidArgument, std::string("parameter ") + name + " has the wrong type");
  }
}

bool wants_redaction(const json& params) {
  const bool redact = param(params, "redact", true);
  require_acknowledgment(redact, param<std::string>(params, "acknowledge", ""));
  return redact;
}

std::string redact_transition(std::string_view label) {
  const auto pos = label.find(kTransitionArrow);
  if (pos == std::string_view::npos) return redact_cell(label);
  return redact_cell(label.substr(0, pos)) + std::string(kTransitionArrow) +
         redact_cell(label.substr(pos + kTransitionArrow.size()));
}

KeyTuple masked(const KeyTuple& key, bool redact) {
  if (!redact) return key;
  KeyTuple out;
  for (const auto& v : key) out.push_back(redact_cell(v));
  return out;
}

void clear_from_clusters(DefenderSession& s) {
  s.cut.reset();
  s.clusters.reset();
  s.selected_cluster.reset();
  s.outputs.erase("cluster");
}

void clear_from_pairs(DefenderSession& s) {
  s.pairs.reset();
  s.selected_pair.reset();
  s.outputs.erase("pairs");
}

void clear_from_join(DefenderSession& s) {
  s.join_spec.reset();
  s.last_result.reset();
  s.join_score.reset();
  s.disclosures.reset();
  for (const auto* k : {"join", "suggest", "parallel_sets", "disclosures"}) s.outputs.erase(k);
}

json shared_attributes_json(const std::vector<SharedAttribute>& attrs) {
  json out = json::array();
  for (const auto& a : attrs) {
    out.push_back({{"name", a.name},
                   {"semantic_class", to_string(a.semantic_class)},
                   {"left_entropy", a.left_entropy},
                   {"right_entropy", a.right_entropy},
                   {"min_entropy", a.min_entropy()}});
  }
  return out;
}

std::vector<std::string> normalized_list(const json& params, const char* name) {
  std::vector<std::string> out;
  for (const auto& raw : param<std::vector<std::string>>(params, name, {})) {
    auto n = normalize_attribute(raw);
    if (n.empty()) throw Error(ErrorCode::kInvalidArgument, "blank attribute name in " + std::string(name));
    if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(std::move(n));
  }
  return out;
}

const DatasetCluster& selected_cluster_of(const DefenderSession& s) {
  for (const auto& c : *s.clusters) {
    if (c.id == *s.selected_cluster) return c;
  }
  throw Error(ErrorCode::kStepOutOfOrder, "selected cluster is gone");
}

json step_cluster(DefenderSession& s, const CollectionContext& ctx, const json& params) {
  if (s.selected_qis.empty()) out_of_order(WorkflowStep::kCluster, "selected quasi-identifiers");
  const double cut = param(params, "cut", kDefaultDistanceCut);
  auto ranked = rank_clusters(cluster_datasets(ctx.collection(), cut), s.selected_qis);
  json clusters = json::array();
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    auto c = to_json(ranked[i]);
    c["rank"] = i + 1;
    clusters.push_back(std::move(c));
  }
  clear_from_join(s);
  clear_from_pairs(s);
  s.selected_cluster.reset();
  s.cut = cut;
  s.clusters = std::move(ranked);
  return {{"step", "cluster"}, {"cut", cut}, {"clusters", clusters}};
}

json step_pairs(DefenderSession& s, const CollectionContext& ctx, const json& params, std::stop_token stop) {
  if (!s.clusters) out_of_order(WorkflowStep::kPairs, "a cluster step");
  const DatasetCluster* chosen = nullptr;
  const auto& clusters = *s.clusters;
  if (params.is_object() && params.contains("cluster") && params["cluster"].is_string()) {
    const auto id = params["cluster"].get<std::string>();
    for (const auto& c : clusters) {
      if (c.id == id) chosen = &c;
    }
    if (!chosen) throw Error(ErrorCode::kInvalidArgument, "no cluster " + id);
  } else {
    const auto rank = param<std::int64_t>(params, "cluster", 1);
    if (rank < 1 || static_cast<std::size_t>(rank) > clusters.size()) {
      throw Error(ErrorCode::kInvalidArgument, "cluster rank out of range");
    }
    chosen = &clusters[static_cast<std::size_t>(rank - 1)];
  }
  const auto lookup = ctx.lookup(stop);
  auto ranked = rank_pairs(chosen->members, lookup, ctx.dictionary());
  json pairs = json::array();
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    check_stop(stop);
    auto p = to_json(ranked[i]);
    p["rank"] = i + 1;
    p["shared_attributes"] = shared_attributes_json(
        rank_shared_attributes(lookup(ranked[i].spec.left_id), lookup(ranked[i].spec.right_id), ctx.dictionary()));
    pairs.push_back(std::move(p));
  }
  clear_from_join(s);
  s.selected_cluster = chosen->id;
  s.selected_pair.reset();
  s.pairs = std::move(ranked);
  return {{"step", "pairs"},
          {"cluster", chosen->id},
          {"members", chosen->members},
          {"pair_count", pair_count(chosen->members.size())},
          {"pairs", pairs}};
}

json step_join(DefenderSession& s, const CollectionContext& ctx, const json& params, std::stop_token stop) {
  if (!s.pairs) out_of_order(WorkflowStep::kJoin, "a pairs step");
  JoinSpec spec;
  const bool explicit_ids = params.is_object() && params.contains("left") && params.contains("right");
  if (explicit_ids) {
    spec.left_id = param<std::string>(params, "left", "");
    spec.right_id = param<std::string>(params, "right", "");
    const auto& members = selected_cluster_of(s).members;
    for (const auto* id : {&spec.left_id, &spec.right_id}) {
      if (std::find(members.begin(), members.end(), *id) == members.end()) {
        throw Error(ErrorCode::kInvalidArgument, *id + " is not in the selected cluster");
      }
    }
    if (spec.left_id == spec.right_id) throw Error(ErrorCode::kInvalidArgument, "a pair needs two datasets");
  } else {
    const auto rank = param<std::int64_t>(params, "pair", 1);
    if (rank < 1 || static_cast<std::size_t>(rank) > s.pairs->size()) {
      throw Error(ErrorCode::kInvalidArgument, "pair rank out of range");
    }
    spec = (*s.pairs)[static_cast<std::size_t>(rank - 1)].spec;
  }
  const auto lookup = ctx.lookup(stop);
  const auto& a = lookup(spec.left_id);
  const auto& b = lookup(spec.right_id);
  spec.key_attrs = normalized_list(params, "key");
  if (spec.key_attrs.empty()) spec.key_attrs = auto_join_key(a, b, ctx.dictionary());
  const auto cap = param<std::size_t>(params, "row_cap", kDefaultJoinRowCap);
  check_stop(stop);
  auto result = execute_join(a, b, spec, cap);
  const auto score = joinability_risk(a, b, spec.key_attrs);
  check_stop(stop);

  std::vector<std::string> unused;
  for (const auto& attr : shared_attributes(a, b)) {
    if (std::find(spec.key_attrs.begin(), spec.key_attrs.end(), attr) == spec.key_attrs.end()) unused.push_back(attr);
  }
  json out{{"step", "join"},
           {"spec", to_json(spec)},
           {"score", to_json(score)},
           {"matched_keys", result.matches.size()},
           {"joined_rows", result.joined_rows.size()},
           {"total_joined_rows", result.total_joined_rows},
           {"truncated", result.truncated},
           {"mean_multiplicity", mean_match_multiplicity(result)},
           {"shared_attributes", shared_attributes_json(rank_shared_attributes(a, b, ctx.dictionary()))},
           {"unused_shared", unused},
           {"schema", joined_schema(result, a, b)}};
  clear_from_join(s);
  s.selected_pair = std::pair{spec.left_id, spec.right_id};
  s.join_spec = spec;
  s.join_score = score;
  s.last_result = std::move(result);
  return out;
}

json step_suggest(DefenderSession& s, const CollectionContext& ctx, const json& params, std::stop_token stop) {
  if (!s.last_result) out_of_order(WorkflowStep::kSuggest, "a join step");
  const auto lookup = ctx.lookup(stop);
  const auto& a = lookup(s.join_spec->left_id);
  const auto& b = lookup(s.join_spec->right_id);
  auto attrs = normalized_list(params, "attrs");
  if (attrs.empty()) {
    for (const auto& attr : shared_attributes(a, b)) {
      const auto& key = s.join_spec->key_attrs;
      if (std::find(key.begin(), key.end(), attr) == key.end()) attrs.push_back(attr);
    }
  }
  json suggestions = json::array();
  for (const auto& f : suggest_features(*s.last_result, attrs, a, b)) suggestions.push_back(to_json(f));
  return {{"step", "suggest"}, {"key", s.join_spec->key_attrs}, {"suggestions", suggestions}};
}

json step_parallel_sets(DefenderSession& s, const CollectionContext& ctx, const json& params, std::stop_token stop) {
  if (!s.last_result) out_of_order(WorkflowStep::kParallelSets, "a join step");
  const bool redact = wants_redaction(params);
  auto axes = param<std::vector<std::string>>(params, "axes", s.join_spec->key_attrs);
  const auto max_categories = param<std::size_t>(params, "max_categories", kDefaultMaxCategories);
  const auto lookup = ctx.lookup(stop);
  auto model = parallel_sets_model(*s.last_result, lookup(s.join_spec->left_id), lookup(s.join_spec->right_id), axes,
                                   max_categories);
  if (redact) model = mask_categories(model, &redact_transition);
  return {{"step", "parallel_sets"}, {"redacted", redact}, {"model", to_json(model)}};
}

json step_disclosures(DefenderSession& s, const CollectionContext& ctx, const json& params, std::stop_token stop) {
  if (!s.last_result) out_of_order(WorkflowStep::kDisclosures, "a join step");
  const bool redact = wants_redaction(params);
  const auto lookup = ctx.lookup(stop);
  const auto& a = lookup(s.join_spec->left_id);
  const auto& b = lookup(s.join_spec->right_id);
  auto found = detect_disclosures(*s.last_result, a.attributes(), b.attributes(), ctx.dictionary());
  std::size_t identity = 0;
  json candidates = json::array();
  for (const auto& c : found) {
    identity += c.kind == DisclosureKind::kIdentity;
    auto j = to_json(c);
    j["key"] = masked(c.key, redact);
    candidates.push_back(std::move(j));
  }
  json out{{"step", "disclosures"},
           {"spec", to_json(*s.join_spec)},
           {"identity_count", identity},
           {"attribute_count", found.size() - identity},
           {"redacted", redact},
           {"candidates", candidates}};
  s.disclosures = std::move(found);
  return out;
}

json record_json(const RecordTable& t, std::size_t row, bool redact) {
  json out = json::object();
  for (std::size_t c = 0; c < t.column_count(); ++c) {
    const auto& v = t.cell(row, c);
    out[t.attributes()[c].normalized_name] = redact ? redact_cell(v) : std::string(trim(v));
  }
  return out;
}

}  // namespace

std::string_view to_string(WorkflowStep s) noexcept {
  for (const auto& [k, name] : kStepNames) {
    if (k == s) return name;
  }
  return "unknown";
}

WorkflowStep parse_step(std::string_view s) {
  for (const auto& [k, name] : kStepNames) {
    if (name == s) return k;
  }
  throw Error(ErrorCode::kUnknownStep, "unknown step " + std::string(s));
}

// ---------------------------------------------------------------------------
// CollectionContext

CollectionContext::CollectionContext(std::string ref, CollectionManifest manifest,
                                     std::unique_ptr<CatalogSource> source, QuasiIdentifierDictionary dict)
    : ref_(std::move(ref)),
      manifest_(std::move(manifest)),
      collection_(build_collection(manifest_)),
      source_(std::move(source)),
      dict_(std::move(dict)) {}

std::shared_ptr<CollectionContext> CollectionContext::open(const fs::path& manifest_path,
                                                           const std::optional<std::string>& source_spec,
                                                           const QuasiIdentifierDictionary& dict) {
  if (manifest_path.empty() || !fs::is_regular_file(manifest_path)) {
    throw Error(ErrorCode::kUnknownCollection, "no manifest at " + manifest_path.string());
  }
  const auto canonical = fs::weakly_canonical(manifest_path);
  auto manifest = load_manifest(canonical);
  auto source = open_source(source_spec.value_or(canonical.parent_path().string()), dict);
  return std::make_shared<CollectionContext>(canonical.string(), std::move(manifest), std::move(source), dict);
}

const DatasetMetadata& CollectionContext::metadata(const std::string& dataset_ref) const {
  if (!manifest_.contains(dataset_ref)) throw Error(ErrorCode::kUnknownDataset, "no dataset " + dataset_ref);
  return manifest_.entry(dataset_ref).metadata;
}

const RecordTable& CollectionContext::table(const std::string& dataset_ref) const {
  const auto& meta = metadata(dataset_ref);
  std::lock_guard lock(tables_mu_);
  auto& slot = tables_[dataset_ref];
  if (!slot) slot = std::make_unique<RecordTable>(source_->fetch_records(meta));
  return *slot;
}

TableLookup CollectionContext::lookup(std::stop_token stop) const {
  return [this, stop](const std::string& id) -> const RecordTable& {
    check_stop(stop);
    return table(id);
  };
}

// ---------------------------------------------------------------------------
// history

json to_json(const HistoryEvent& e) {
  json j{{"event", e.event}, {"params", e.params}, {"at", format_timestamp(e.at)}};
  if (e.step) j["step"] = to_string(*e.step);
  if (!e.output_digest.empty()) j["output_digest"] = e.output_digest;
  return j;
}

HistoryEvent history_event_from_json(const json& j) {
  try {
    HistoryEvent e;
    e.event = j.at("event").get<std::string>();
    if (j.contains("step")) e.step = parse_step(j["step"].get<std::string>());
    e.params = j.value("params", json::object());
    e.output_digest = j.value("output_digest", "");
    if (j.contains("at")) e.at = parse_timestamp(j["at"].get<std::string>());
    return e;
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::kInvalidArgument, std::string("malformed history event: ") + ex.what());
  }
}

std::vector<HistoryEvent> load_history(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw Error(ErrorCode::kIoError, "no history file " + path.string());
  std::vector<HistoryEvent> out;
  for (const auto& line : split(read_file(path), '\n')) {
    if (trim(line).empty()) continue;
    try {
      out.push_back(history_event_from_json(json::parse(line)));
    } catch (const json::parse_error& ex) {
      throw Error(ErrorCode::kInvalidArgument, "malformed history line in " + path.string() + ": " + ex.what());
    }
  }
  return out;
}

void append_history(const fs::path& path, const HistoryEvent& e) {
  std::ofstream out(path, std::ios::app | std::ios::binary);
  out << to_json(e).dump() << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::kIoError, "cannot append to " + path.string());
}

std::string output_digest(const json& output) { return hex64(fnv1a64(output.dump())); }

// ---------------------------------------------------------------------------
// session operations

std::string new_session_id() {
  static std::mutex mu;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(mu);
  return hex64(rng()) + hex64(rng());
}

DefenderSession create_session(const CollectionContext& ctx, std::string session_id) {
  DefenderSession s;
  s.session_id = std::move(session_id);
  s.collection_ref = ctx.ref();
  s.history.push_back({"created", std::nullopt,
                       json{{"session_id", s.session_id}, {"collection", ctx.ref()}, {"source", ctx.source_description()}},
                       "", now_seconds()});
  return s;
}

void set_quasi_identifiers(DefenderSession& session, const CollectionContext& ctx,
                           const std::vector<std::string>& qis_or_profile) {
  std::vector<std::string> qis;
  std::optional<std::string> profile;
  constexpr std::string_view kProfilePrefix = "profile:";
  if (qis_or_profile.size() == 1 && qis_or_profile[0].rfind(kProfilePrefix, 0) == 0) {
    profile = qis_or_profile[0].substr(kProfilePrefix.size());
    qis = ctx.dictionary().profile(*profile);
  } else {
    for (const auto& raw : qis_or_profile) {
      auto n = normalize_attribute(raw);
      if (!n.empty() && std::find(qis.begin(), qis.end(), n) == qis.end()) qis.push_back(std::move(n));
    }
  }
  if (qis.empty()) throw Error(ErrorCode::kEmptySelection, "no quasi-identifiers selected");
  clear_from_join(session);
  clear_from_pairs(session);
  clear_from_clusters(session);
  session.selected_qis = std::move(qis);
  session.qi_profile = profile;
  session.history.push_back({"qis", std::nullopt, json{{"qis", qis_or_profile}}, "", now_seconds()});
}

json run_step(DefenderSession& session, const CollectionContext& ctx, WorkflowStep step, const json& params,
              std::stop_token stop) {
  if (!params.is_null() && !params.is_object()) throw Error(ErrorCode::kInvalidArgument, "step parameters must be an object");
  check_stop(stop);
  DefenderSession next = session;
  json out;
  switch (step) {
    case WorkflowStep::kCluster: out = step_cluster(next, ctx, params); break;
    case WorkflowStep::kPairs: out = step_pairs(next, ctx, params, stop); break;
    case WorkflowStep::kJoin: out = step_join(next, ctx, params, stop); break;
    case WorkflowStep::kSuggest: out = step_suggest(next, ctx, params, stop); break;
    case WorkflowStep::kParallelSets: out = step_parallel_sets(next, ctx, params, stop); break;
    case WorkflowStep::kDisclosures: out = step_disclosures(next, ctx, params, stop); break;
  }
  check_stop(stop);
  next.outputs[std::string(to_string(step))] = out;
  next.history.push_back({"step", step, params.is_null() ? json::object() : params, output_digest(out), now_seconds()});
  session = std::move(next);
  return out;
}

json describe_session(const DefenderSession& s) {
  json history = json::array();
  for (const auto& e : s.history) history.push_back(to_json(e));
  json j{{"session_id", s.session_id},
         {"collection", s.collection_ref},
         {"selected_qis", s.selected_qis},
         {"qi_profile", s.qi_profile ? json(*s.qi_profile) : json()},
         {"selected_cluster", s.selected_cluster ? json(*s.selected_cluster) : json()},
         {"selected_pair", s.selected_pair ? json{s.selected_pair->first, s.selected_pair->second} : json()},
         {"join_spec", s.join_spec ? to_json(*s.join_spec) : json()},
         {"outputs", s.outputs},
         {"history", history}};
  return j;
}

json export_report(const DefenderSession& s, const CollectionContext& ctx, bool redact, std::string_view acknowledgment) {
  if (!s.disclosures) throw Error(ErrorCode::kNothingToReport, "run a disclosures step before exporting a report");
  require_acknowledgment(redact, acknowledgment);

  json steps = json::array();
  for (const auto& e : s.history) {
    if (e.event == "step") {
      steps.push_back({{"step", to_string(*e.step)}, {"params", e.params}, {"output_digest", e.output_digest}});
    } else if (e.event == "qis") {
      steps.push_back({{"step", "qis"}, {"params", e.params}});
    }
  }
  json cluster;
  if (s.selected_cluster) {
    const auto& c = selected_cluster_of(s);
    cluster = {{"id", c.id}, {"members", c.members}, {"core_signature", c.core_signature}, {"qi_overlap", c.qi_overlap}};
  }
  const auto& spec = *s.join_spec;
  const auto& result = *s.last_result;

  return {{"session_id", s.session_id},
          {"collection", s.collection_ref},
          {"selected_qis", s.selected_qis},
          {"qi_profile", s.qi_profile ? json(*s.qi_profile) : json()},
          {"redacted", redact},
          {"steps", steps},
          {"cluster", cluster},
          {"join",
           {{"spec", to_json(spec)},
            {"score", to_json(*s.join_score)},
            {"matched_keys", result.matches.size()},
            {"joined_rows", result.joined_rows.size()},
            {"total_joined_rows", result.total_joined_rows},
            {"truncated", result.truncated}}},
          {"disclosures", disclosure_records(ctx, spec, *s.disclosures, redact)}};
}

json disclosure_records(const CollectionContext& ctx, const JoinSpec& spec,
                        const std::vector<DisclosureCandidate>& found, bool redact) {
  const auto& a = ctx.table(spec.left_id);
  const auto& b = ctx.table(spec.right_id);
  std::size_t identity = 0;
  json candidates = json::array();
  for (const auto& c : found) {
    identity += c.kind == DisclosureKind::kIdentity;
    json revealed = json::object();
    const bool from_right = c.located != LocatedSide::kRight;
    const auto& other = from_right ? b : a;
    const auto other_row = from_right ? c.right_row : c.left_row;
    for (const auto& attr : c.revealed_attrs) {
      const auto& v = other.cell(other_row, other.column(attr));
      revealed[attr] = redact ? redact_cell(v) : std::string(trim(v));
    }
    candidates.push_back({{"kind", to_string(c.kind)},
                          {"key", masked(c.key, redact)},
                          {"located", to_string(c.located)},
                          {"revealed_attrs", c.revealed_attrs},
                          {"revealed_values", revealed},
                          {"left", {{"dataset", spec.left_id}, {"row", c.left_row}, {"record", record_json(a, c.left_row, redact)}}},
                          {"right",
                           {{"dataset", spec.right_id}, {"row", c.right_row}, {"record", record_json(b, c.right_row, redact)}}}});
  }
  return {{"identity_count", identity}, {"attribute_count", found.size() - identity}, {"candidates", candidates}};
}

ReplayResult replay_history(const std::vector<HistoryEvent>& history, const CollectionContext& ctx) {
  if (history.empty() || history.front().event != "created") {
    throw Error(ErrorCode::kInvalidArgument, "history must start with a created event");
  }
  ReplayResult r;
  r.session = create_session(ctx, history.front().params.value("session_id", new_session_id()));
  r.session.history.front() = history.front();
  for (std::size_t i = 1; i < history.size(); ++i) {
    const auto& e = history[i];
    if (e.event == "qis") {
      set_quasi_identifiers(r.session, ctx, e.params.at("qis").get<std::vector<std::string>>());
    } else if (e.event == "step" && e.step) {
      r.outputs.push_back(run_step(r.session, ctx, *e.step, e.params));
      if (output_digest(r.outputs.back()) != e.output_digest) r.mismatches.push_back(r.outputs.size() - 1);
    } else {
      throw Error(ErrorCode::kInvalidArgument, "unexpected history event " + e.event);
    }
    r.session.history.back().at = e.at;
  }
  return r;
}

json scan_dataset(const CollectionContext& ctx, const std::string& dataset_ref, const std::vector<std::string>& keys,
                  std::size_t threshold, bool subsets, bool redact) {
  const auto& table = ctx.table(dataset_ref);
  std::vector<std::string> key_attrs;
  std::vector<std::string> sensitive;
  for (const auto& a : table.attributes()) {
    if (a.semantic_class == SemanticClass::kSensitive) sensitive.push_back(a.normalized_name);
  }
  if (keys.size() == 1 && keys[0] == "auto") {
    for (const auto& a : table.attributes()) {
      if (a.semantic_class == SemanticClass::kQuasiIdentifier) key_attrs.push_back(a.normalized_name);
    }
  } else {
    for (const auto& k : keys) key_attrs.push_back(normalize_attribute(k));
  }
  if (key_attrs.empty()) throw Error(ErrorCode::kEmptySelection, "no key attributes for " + dataset_ref);
  json findings = json::array();
  for (const auto& f : vulnerable_entry_points(table, key_attrs, threshold, subsets)) {
    auto j = to_json(f);
    j["key"] = masked(f.key, redact);
    findings.push_back(std::move(j));
  }
  return {{"dataset", dataset_ref},
          {"rows", table.row_count()},
          {"threshold", threshold},
          {"redacted", redact},
          {"summary", to_json(summarize_risk(table, key_attrs, sensitive))},
          {"findings", findings}};
}

// ---------------------------------------------------------------------------
// SessionStore

SessionStore::SessionStore(SessionStoreOptions options) : options_(std::move(options)) {
  if (options_.session_dir) fs::create_directories(*options_.session_dir);
}

std::shared_ptr<CollectionContext> SessionStore::collection(const std::string& manifest_ref) {
  const fs::path path = manifest_ref.empty() ? options_.default_manifest : fs::path(manifest_ref);
  if (path.empty() || !fs::is_regular_file(path)) {
    throw Error(ErrorCode::kUnknownCollection, "no manifest at " + path.string());
  }
  const auto key = fs::weakly_canonical(path).string();
  std::lock_guard lock(mu_);
  auto& ctx = collections_[key];
  if (!ctx) ctx = CollectionContext::open(key, options_.source, options_.dict);
  return ctx;
}

std::string SessionStore::create(const std::string& manifest_ref) {
  auto ctx = collection(manifest_ref);
  auto s = std::make_shared<Slot>();
  s->ctx = ctx;
  s->session = create_session(*ctx, new_session_id());
  persist(*s, s->session.history.back());
  std::lock_guard lock(mu_);
  sessions_[s->session.session_id] = s;
  return s->session.session_id;
}

std::shared_ptr<SessionStore::Slot> SessionStore::slot(const std::string& id) {
  {
    std::lock_guard lock(mu_);
    if (auto it = sessions_.find(id); it != sessions_.end()) return it->second;
  }
  const bool plausible = !id.empty() && std::all_of(id.begin(), id.end(), [](char c) { return std::isxdigit(static_cast<unsigned char>(c)); });
  if (!plausible || !options_.session_dir || !fs::is_regular_file(*options_.session_dir / (id + ".jsonl"))) {
    throw Error(ErrorCode::kUnknownSession, "no session " + id);
  }
  const auto history = load_history(*options_.session_dir / (id + ".jsonl"));
  if (history.empty()) throw Error(ErrorCode::kUnknownSession, "empty history for session " + id);
  auto s = std::make_shared<Slot>();
  s->ctx = collection(history.front().params.value("collection", ""));
  s->session = replay_history(history, *s->ctx).session;
  std::lock_guard lock(mu_);
  auto [it, inserted] = sessions_.emplace(id, s);
  return it->second;
}

void SessionStore::persist(const Slot& s, const HistoryEvent& e) const {
  if (options_.session_dir) append_history(*options_.session_dir / (s.session.session_id + ".jsonl"), e);
}

json SessionStore::set_qis(const std::string& id, const std::vector<std::string>& qis_or_profile) {
  auto s = slot(id);
  std::unique_lock lock(s->mu);
  auto next = s->session;
  set_quasi_identifiers(next, *s->ctx, qis_or_profile);
  persist(*s, next.history.back());
  s->session = std::move(next);
  return {{"session_id", id}, {"selected_qis", s->session.selected_qis}};
}

json SessionStore::run(const std::string& id, WorkflowStep step, const json& params) {
  auto s = slot(id);
  std::stop_token stop;
  {
    std::lock_guard g(s->stop_mu);
    s->stop = std::stop_source{};
    stop = s->stop.get_token();
  }
  std::unique_lock lock(s->mu);
  auto out = run_step(s->session, *s->ctx, step, params, stop);
  persist(*s, s->session.history.back());
  return out;
}

json SessionStore::describe(const std::string& id) {
  auto s = slot(id);
  std::shared_lock lock(s->mu);
  return describe_session(s->session);
}

json SessionStore::report(const std::string& id, bool redact, std::string_view acknowledgment) {
  auto s = slot(id);
  std::shared_lock lock(s->mu);
  return export_report(s->session, *s->ctx, redact, acknowledgment);
}

void SessionStore::cancel(const std::string& id) {
  auto s = slot(id);
  std::lock_guard g(s->stop_mu);
  s->stop.request_stop();
}

}  // namespace riskcal
