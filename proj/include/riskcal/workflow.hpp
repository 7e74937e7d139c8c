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

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stop_token>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "riskcal/cluster.hpp"
#include "riskcal/curation.hpp"
#include "riskcal/join.hpp"
#include "riskcal/parallel_sets.hpp"
#include "riskcal/util.hpp"

namespace riskcal {

enum class WorkflowStep { kCluster, kPairs, kJoin, kSuggest, kParallelSets, kDisclosures };
std::string_view to_string(WorkflowStep s) noexcept;
/// Throws Error(kUnknownStep).
WorkflowStep parse_step(std::string_view s);

/// A curated collection opened for analysis. Tables load lazily and are
/// shared by every session on the collection.
class CollectionContext {
 public:
  CollectionContext(std::string ref, CollectionManifest manifest, std::unique_ptr<CatalogSource> source,
                    QuasiIdentifierDictionary dict);

  /// `source_spec` defaults to the manifest's directory. Throws
  /// Error(kUnknownCollection) when the manifest does not exist.
  static std::shared_ptr<CollectionContext> open(const std::filesystem::path& manifest_path,
                                                 const std::optional<std::string>& source_spec,
                                                 const QuasiIdentifierDictionary& dict);

  /// Canonical manifest path.
  const std::string& ref() const noexcept { return ref_; }
  const CollectionManifest& manifest() const noexcept { return manifest_; }
  /// The human-subject datasets.
  const std::vector<DatasetMetadata>& collection() const noexcept { return collection_; }
  const QuasiIdentifierDictionary& dictionary() const noexcept { return dict_; }
  std::string source_description() const { return source_->describe(); }

  /// Any manifest entry. Throws Error(kUnknownDataset).
  const DatasetMetadata& metadata(const std::string& dataset_ref) const;
  const RecordTable& table(const std::string& dataset_ref) const;
  TableLookup lookup(std::stop_token stop = {}) const;

 private:
  std::string ref_;
  CollectionManifest manifest_;
  std::vector<DatasetMetadata> collection_;
  std::unique_ptr<CatalogSource> source_;
  QuasiIdentifierDictionary dict_;
  mutable std::mutex tables_mu_;
  mutable std::map<std::string, std::unique_ptr<RecordTable>> tables_;
};

struct HistoryEvent {
  /// "created", "qis" or "step".
  std::string event;
  std::optional<WorkflowStep> step;
  nlohmann::json params;
  /// Digest of the step output; empty for other events.
  std::string output_digest;
  Timestamp at{};
};

nlohmann::json to_json(const HistoryEvent& e);
HistoryEvent history_event_from_json(const nlohmann::json& j);

struct DefenderSession {
  std::string session_id;
  std::string collection_ref;
  std::vector<std::string> selected_qis;
  std::optional<std::string> qi_profile;
  std::optional<double> cut;
  /// Ranked.
  std::optional<std::vector<DatasetCluster>> clusters;
  std::optional<std::string> selected_cluster;
  std::optional<std::vector<PairScore>> pairs;
  std::optional<std::pair<std::string, std::string>> selected_pair;
  std::optional<JoinSpec> join_spec;
  std::optional<JoinResult> last_result;
  std::optional<JoinabilityScore> join_score;
  std::optional<std::vector<DisclosureCandidate>> disclosures;
  /// Latest output of each step.
  std::map<std::string, nlohmann::json> outputs;
  std::vector<HistoryEvent> history;
};

/// A fresh session with a `created` history event.
DefenderSession create_session(const CollectionContext& ctx, std::string session_id);

/// 128 random bits as hex.
std::string new_session_id();

/// A single "profile:NAME" entry selects a dictionary profile; otherwise the
/// names are normalized, deduplicated in order and stored. Clears everything
/// downstream. Throws Error(kUnknownProfile), Error(kEmptySelection).
void set_quasi_identifiers(DefenderSession& session, const CollectionContext& ctx,
                           const std::vector<std::string>& qis_or_profile);

/// Runs one step, stores its state and appends history. The session is left
/// untouched on failure. Prerequisites: cluster needs selected QIs, pairs
/// needs clusters, join needs pairs, the rest need a join result; otherwise
/// Error(kStepOutOfOrder). Error(kCancelled) when `stop` fires.
nlohmann::json run_step(DefenderSession& session, const CollectionContext& ctx, WorkflowStep step,
                        const nlohmann::json& params, std::stop_token stop = {});

/// Session parameters, scores and disclosure candidates with the records
/// involved. No timestamps. Throws Error(kNothingToReport) before a
/// disclosures step, Error(kAcknowledgmentRequired) for an unacknowledged
/// unredacted export.
nlohmann::json export_report(const DefenderSession& session, const CollectionContext& ctx, bool redact,
                             std::string_view acknowledgment = {});

/// Identity and attribute counts plus each candidate with both records
/// and the revealed values, masked when `redact` is set.
nlohmann::json disclosure_records(const CollectionContext& ctx, const JoinSpec& spec,
                                  const std::vector<DisclosureCandidate>& found, bool redact);

/// Selections, latest outputs and history.
nlohmann::json describe_session(const DefenderSession& session);

std::string output_digest(const nlohmann::json& output);

std::vector<HistoryEvent> load_history(const std::filesystem::path& path);
void append_history(const std::filesystem::path& path, const HistoryEvent& e);

struct ReplayResult {
  DefenderSession session;
  /// One per recorded step, in order.
  std::vector<nlohmann::json> outputs;
  /// Indices into `outputs` whose digest differs from the recorded one.
  std::vector<std::size_t> mismatches;
};

/// Re-runs recorded parameters under the recorded session id. Throws
/// Error(kInvalidArgument) when the history does not start with `created`.
ReplayResult replay_history(const std::vector<HistoryEvent>& history, const CollectionContext& ctx);

/// Risk summary and vulnerable entry points of one dataset. `keys` is a
/// list of attributes or {"auto"} for the table's quasi-identifiers.
nlohmann::json scan_dataset(const CollectionContext& ctx, const std::string& dataset_ref,
                            const std::vector<std::string>& keys, std::size_t threshold, bool subsets, bool redact);

struct SessionStoreOptions {
  /// Collection used when a request names none.
  std::filesystem::path default_manifest;
  std::optional<std::string> source;
  /// Histories are written to <dir>/<session id>.jsonl when set.
  std::optional<std::filesystem::path> session_dir;
  QuasiIdentifierDictionary dict = QuasiIdentifierDictionary::defaults();
};

/// Thread-safe session registry. Sessions are independent; steps within one
/// session run one at a time while reads wait only for the running step's
/// commit. Sessions found in the session directory are restored by replay.
class SessionStore {
 public:
  explicit SessionStore(SessionStoreOptions options);

  /// Empty ref means the default manifest.
  std::shared_ptr<CollectionContext> collection(const std::string& manifest_ref = {});

  std::string create(const std::string& manifest_ref = {});
  nlohmann::json set_qis(const std::string& id, const std::vector<std::string>& qis_or_profile);
  nlohmann::json run(const std::string& id, WorkflowStep step, const nlohmann::json& params);
  nlohmann::json describe(const std::string& id);
  nlohmann::json report(const std::string& id, bool redact, std::string_view acknowledgment);
  /// Requests cancellation of the step currently running in the session.
  void cancel(const std::string& id);

 private:
  struct Slot {
    std::shared_mutex mu;
    DefenderSession session;
    std::shared_ptr<CollectionContext> ctx;
    std::mutex stop_mu;
    std::stop_source stop;
  };

  std::shared_ptr<Slot> slot(const std::string& id);
  void persist(const Slot& s, const HistoryEvent& e) const;

  SessionStoreOptions options_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<CollectionContext>> collections_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;
};

}  // namespace riskcal
