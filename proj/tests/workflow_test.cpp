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

#include <atomic>
#include <fstream>
#include <thread>

#include <gtest/gtest.h>

#include "fixture_support.hpp"
#include "oracles.hpp"
#include "riskcal/error.hpp"
#include "riskcal/redaction.hpp"

namespace riskcal {
namespace {

using nlohmann::json;
using testing::TempDir;

const std::string kEpr2015 = "data.nola.example/epr-2015";
const std::string kEpr2016 = "data.nola.example/epr-2016";

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kIoError;
}

class Workflow : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir();
    manifest_ = testing::write_fixture_manifest(dir_->path());
    ctx_ = CollectionContext::open(manifest_, testing::kCorpus.string(), QuasiIdentifierDictionary::defaults());
  }
  static void TearDownTestSuite() {
    ctx_.reset();
    delete dir_;
  }

  static DefenderSession police_session() {
    auto s = create_session(*ctx_, new_session_id());
    set_quasi_identifiers(s, *ctx_, {"profile:police"});
    return s;
  }

  static TempDir* dir_;
  static std::filesystem::path manifest_;
  static std::shared_ptr<CollectionContext> ctx_;
};

TempDir* Workflow::dir_ = nullptr;
std::filesystem::path Workflow::manifest_;
std::shared_ptr<CollectionContext> Workflow::ctx_;

TEST_F(Workflow, CreateSession) {
  const auto s = create_session(*ctx_, new_session_id());
  ASSERT_EQ(s.history.size(), 1u);
  EXPECT_EQ(s.history[0].event, "created");
  EXPECT_TRUE(s.selected_qis.empty());
  EXPECT_FALSE(s.clusters);
  EXPECT_EQ(code_of([] { CollectionContext::open(dir_->path() / "missing.jsonl", std::nullopt, QuasiIdentifierDictionary::defaults()); }),
            ErrorCode::kUnknownCollection);
  EXPECT_NE(new_session_id(), new_session_id());
  EXPECT_EQ(new_session_id().size(), 32u);
}

TEST_F(Workflow, QuasiIdentifierSelection) {
  auto s = police_session();
  EXPECT_EQ(s.selected_qis.size(), 6u);
  EXPECT_EQ(s.qi_profile, "police");
  set_quasi_identifiers(s, *ctx_, {"Age", " SEX", "age"});
  EXPECT_EQ(s.selected_qis, (std::vector<std::string>{"age", "sex"}));
  EXPECT_FALSE(s.qi_profile);
  EXPECT_EQ(code_of([&] { set_quasi_identifiers(s, *ctx_, {}); }), ErrorCode::kEmptySelection);
  EXPECT_EQ(code_of([&] { set_quasi_identifiers(s, *ctx_, {"profile:nope"}); }), ErrorCode::kUnknownProfile);
  EXPECT_EQ(s.selected_qis, (std::vector<std::string>{"age", "sex"}));
}

TEST_F(Workflow, StepNames) {
  for (auto step : {WorkflowStep::kCluster, WorkflowStep::kPairs, WorkflowStep::kJoin, WorkflowStep::kSuggest,
                    WorkflowStep::kParallelSets, WorkflowStep::kDisclosures}) {
    EXPECT_EQ(parse_step(to_string(step)), step);
  }
  EXPECT_EQ(code_of([] { parse_step("identify"); }), ErrorCode::kUnknownStep);
}

TEST_F(Workflow, FirstPoliceClusterHas28Pairs) {
  auto s = police_session();
  const auto clusters = run_step(s, *ctx_, WorkflowStep::kCluster, json::object());
  ASSERT_FALSE(clusters["clusters"].empty());
  EXPECT_EQ(clusters["clusters"][0]["size"], 8);
  EXPECT_EQ(clusters["clusters"][0]["qi_overlap"], 6);
  const auto pairs = run_step(s, *ctx_, WorkflowStep::kPairs, {{"cluster", 1}});
  EXPECT_EQ(pairs["pair_count"], 28);
  EXPECT_EQ(pairs["pairs"].size(), 28u);
  for (const auto& p : pairs["pairs"]) EXPECT_FALSE(p["shared_attributes"].empty());
}

// Allowed steps per stage: no QIs, QIs, clusters, pairs, join.
TEST_F(Workflow, StepOutOfOrderExactlyWhenPrerequisiteMissing) {
  const std::vector<WorkflowStep> steps = {WorkflowStep::kCluster, WorkflowStep::kPairs,
                                           WorkflowStep::kJoin,    WorkflowStep::kSuggest,
                                           WorkflowStep::kParallelSets, WorkflowStep::kDisclosures};
  const std::size_t allowed[] = {0, 1, 2, 3, 6};
  for (std::size_t stage = 0; stage < 5; ++stage) {
    auto base = create_session(*ctx_, new_session_id());
    if (stage >= 1) set_quasi_identifiers(base, *ctx_, {"profile:police"});
    if (stage >= 2) run_step(base, *ctx_, WorkflowStep::kCluster, {});
    if (stage >= 3) run_step(base, *ctx_, WorkflowStep::kPairs, {});
    if (stage >= 4) run_step(base, *ctx_, WorkflowStep::kJoin, {{"left", kEpr2015}, {"right", kEpr2016}});
    for (std::size_t i = 0; i < steps.size(); ++i) {
      auto s = base;
      const auto history = s.history.size();
      bool out_of_order = false;
      try {
        run_step(s, *ctx_, steps[i], {});
      } catch (const Error& e) {
        out_of_order = e.code() == ErrorCode::kStepOutOfOrder;
        if (!out_of_order) ADD_FAILURE() << to_string(e.code()) << ": " << e.what();
        EXPECT_EQ(s.history.size(), history);
      }
      EXPECT_EQ(out_of_order, i >= allowed[stage]) << "stage " << stage << " step " << to_string(steps[i]);
    }
  }
}

TEST_F(Workflow, NewSelectionsClearDownstreamState) {
  auto s = police_session();
  run_step(s, *ctx_, WorkflowStep::kCluster, {});
  run_step(s, *ctx_, WorkflowStep::kPairs, {});
  run_step(s, *ctx_, WorkflowStep::kJoin, {});
  ASSERT_TRUE(s.last_result);
  run_step(s, *ctx_, WorkflowStep::kPairs, {{"cluster", 1}});
  EXPECT_FALSE(s.last_result);
  EXPECT_FALSE(s.join_spec);
  EXPECT_EQ(code_of([&] { run_step(s, *ctx_, WorkflowStep::kSuggest, {}); }), ErrorCode::kStepOutOfOrder);
  run_step(s, *ctx_, WorkflowStep::kCluster, {{"cut", 0.5}});
  EXPECT_FALSE(s.pairs);
  EXPECT_FALSE(s.selected_cluster);
  EXPECT_EQ(code_of([&] { run_step(s, *ctx_, WorkflowStep::kJoin, {}); }), ErrorCode::kStepOutOfOrder);
  set_quasi_identifiers(s, *ctx_, {"age"});
  EXPECT_FALSE(s.clusters);
  EXPECT_EQ(code_of([&] { run_step(s, *ctx_, WorkflowStep::kPairs, {}); }), ErrorCode::kStepOutOfOrder);

  std::size_t steps = 0;
  for (const auto& e : s.history) steps += e.event == "step";
  EXPECT_EQ(steps, 5u);
}

TEST_F(Workflow, JoinRejectsDatasetsOutsideCluster) {
  auto s = police_session();
  run_step(s, *ctx_, WorkflowStep::kCluster, {});
  run_step(s, *ctx_, WorkflowStep::kPairs, {});
  EXPECT_EQ(code_of([&] {
              run_step(s, *ctx_, WorkflowStep::kJoin, {{"left", kEpr2015}, {"right", "ft-laud.example/citations"}});
            }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { run_step(s, *ctx_, WorkflowStep::kJoin, {{"pair", 29}}); }), ErrorCode::kInvalidArgument);
}

TEST_F(Workflow, NolaParallelSetsSumToJoinedRecords) {
  auto s = police_session();
  run_step(s, *ctx_, WorkflowStep::kCluster, {});
  run_step(s, *ctx_, WorkflowStep::kPairs, {});
  const auto key = ctx_->dictionary().profile("police");
  const auto join = run_step(s, *ctx_, WorkflowStep::kJoin, {{"left", kEpr2015}, {"right", kEpr2016}, {"key", key}});
  const auto expected = oracle::nested_loop_join(ctx_->table(kEpr2015), ctx_->table(kEpr2016), key).size();
  EXPECT_EQ(join["joined_rows"], expected);
  const auto out = run_step(s, *ctx_, WorkflowStep::kParallelSets,
                            {{"axes", {"victim race", "offender gender", "disposition"}},
                             {"redact", false},
                             {"acknowledge", "i-understand-risk"}});
  const auto& model = out["model"];
  EXPECT_EQ(model["total"], expected);
  for (const auto& axis : model["axes"]) {
    std::size_t sum = 0;
    for (const auto& c : axis["categories"]) sum += c["count"].get<std::size_t>();
    EXPECT_EQ(sum, expected) << axis["attr"];
  }
  for (const auto& band : model["ribbons"]) {
    std::size_t sum = 0;
    for (const auto& r : band) sum += r["count"].get<std::size_t>();
    EXPECT_EQ(sum, expected);
  }
  std::size_t singletons = 0;
  for (const auto& c : model["axes"][2]["categories"]) {
    if (c["name"] == "Open → Closed") {
      EXPECT_EQ(c["count"], 1);
      ++singletons;
    }
  }
  EXPECT_EQ(singletons, 1u);
}

TEST_F(Workflow, StepOutputsRedactedByDefault) {
  auto s = police_session();
  run_step(s, *ctx_, WorkflowStep::kCluster, {});
  run_step(s, *ctx_, WorkflowStep::kPairs, {});
  run_step(s, *ctx_, WorkflowStep::kJoin,
           {{"left", kEpr2015}, {"right", kEpr2016}, {"key", ctx_->dictionary().profile("police")}});
  const auto ps = run_step(s, *ctx_, WorkflowStep::kParallelSets, {{"axes", {"disposition"}}});
  EXPECT_TRUE(ps["redacted"].get<bool>());
  bool masked_transition = false;
  for (const auto& c : ps["model"]["axes"][0]["categories"]) masked_transition |= c["name"] == "OXXX → CXXXXX";
  EXPECT_TRUE(masked_transition);
  EXPECT_EQ(code_of([&] { run_step(s, *ctx_, WorkflowStep::kDisclosures, {{"redact", false}}); }),
            ErrorCode::kAcknowledgmentRequired);
}

TEST_F(Workflow, ReportRequiresDisclosures) {
  auto s = police_session();
  run_step(s, *ctx_, WorkflowStep::kCluster, {});
  EXPECT_EQ(code_of([&] { export_report(s, *ctx_, true); }), ErrorCode::kNothingToReport);
}

TEST_F(Workflow, ReportMasksValuesAndKeepsCounts) {
  auto s = police_session();
  run_step(s, *ctx_, WorkflowStep::kCluster, {});
  run_step(s, *ctx_, WorkflowStep::kPairs, {});
  const auto key = ctx_->dictionary().profile("police");
  run_step(s, *ctx_, WorkflowStep::kJoin, {{"left", kEpr2015}, {"right", kEpr2016}, {"key", key}});
  run_step(s, *ctx_, WorkflowStep::kDisclosures, {});
  const auto redacted = export_report(s, *ctx_, true);
  EXPECT_EQ(code_of([&] { export_report(s, *ctx_, false); }), ErrorCode::kAcknowledgmentRequired);
  const auto clear = export_report(s, *ctx_, false, "i-understand-risk");
  EXPECT_TRUE(redacted["redacted"].get<bool>());
  EXPECT_EQ(redacted["disclosures"]["identity_count"], clear["disclosures"]["identity_count"]);
  EXPECT_EQ(redacted["disclosures"]["attribute_count"], clear["disclosures"]["attribute_count"]);
  EXPECT_EQ(redacted["join"], clear["join"]);
  ASSERT_GE(clear["disclosures"]["identity_count"].get<int>(), 1);
  const auto& rc = redacted["disclosures"]["candidates"];
  const auto& cc = clear["disclosures"]["candidates"];
  ASSERT_EQ(rc.size(), cc.size());
  for (std::size_t i = 0; i < rc.size(); ++i) {
    EXPECT_EQ(rc[i]["left"]["row"], cc[i]["left"]["row"]);
    for (const auto& [attr, v] : cc[i]["left"]["record"].items()) {
      EXPECT_EQ(rc[i]["left"]["record"][attr], redact_cell(v.get<std::string>()));
    }
    for (std::size_t k = 0; k < cc[i]["key"].size(); ++k) {
      EXPECT_EQ(rc[i]["key"][k], redact_cell(cc[i]["key"][k].get<std::string>()));
    }
  }
  EXPECT_EQ(redacted.dump().find("\"at\""), std::string::npos);
}

TEST_F(Workflow, ReplayReproducesOutputsAndReport) {
  auto s = police_session();
  std::vector<json> outputs;
  outputs.push_back(run_step(s, *ctx_, WorkflowStep::kCluster, {{"cut", 0.6}}));
  outputs.push_back(run_step(s, *ctx_, WorkflowStep::kPairs, {{"cluster", 1}}));
  outputs.push_back(run_step(s, *ctx_, WorkflowStep::kJoin, {{"pair", 1}}));
  auto key = s.join_spec->key_attrs;
  key.push_back("disposition");
  outputs.push_back(run_step(s, *ctx_, WorkflowStep::kSuggest, {}));
  outputs.push_back(run_step(s, *ctx_, WorkflowStep::kJoin, {{"pair", 1}, {"key", key}}));
  outputs.push_back(run_step(s, *ctx_, WorkflowStep::kParallelSets, {{"axes", {"disposition", "location"}}}));
  outputs.push_back(run_step(s, *ctx_, WorkflowStep::kDisclosures, {}));

  const auto path = dir_->path() / (s.session_id + ".jsonl");
  for (const auto& e : s.history) append_history(path, e);
  const auto replayed = replay_history(load_history(path), *ctx_);
  EXPECT_TRUE(replayed.mismatches.empty());
  ASSERT_EQ(replayed.outputs.size(), outputs.size());
  for (std::size_t i = 0; i < outputs.size(); ++i) EXPECT_EQ(replayed.outputs[i].dump(), outputs[i].dump()) << i;
  EXPECT_EQ(replayed.session.session_id, s.session_id);
  EXPECT_EQ(export_report(replayed.session, *ctx_, true).dump(), export_report(s, *ctx_, true).dump());
  EXPECT_EQ(describe_session(replayed.session).dump(), describe_session(s).dump());
}

TEST_F(Workflow, ReplayFlagsTamperedDigest) {
  auto s = police_session();
  run_step(s, *ctx_, WorkflowStep::kCluster, {});
  auto history = s.history;
  history.back().output_digest = "0000000000000000";
  EXPECT_EQ(replay_history(history, *ctx_).mismatches, (std::vector<std::size_t>{0}));
  history.erase(history.begin());
  EXPECT_EQ(code_of([&] { replay_history(history, *ctx_); }), ErrorCode::kInvalidArgument);
}

TEST_F(Workflow, ScanDataset) {
  const auto out = scan_dataset(*ctx_, "datahub.smc.example/wpc-demo-2", {"auto"}, 1, false, false);
  EXPECT_FALSE(out["findings"].empty());
  EXPECT_EQ(out["summary"]["k"], 1);
  EXPECT_EQ(code_of([] { scan_dataset(*ctx_, "nowhere/x", {"auto"}, 5, false, true); }), ErrorCode::kUnknownDataset);
}

TEST_F(Workflow, StoreSessionsPersistAndRestore) {
  TempDir sessions;
  SessionStoreOptions opts{manifest_, testing::kCorpus.string(), sessions.path(), QuasiIdentifierDictionary::defaults()};
  std::string id;
  json report;
  {
    SessionStore store(opts);
    id = store.create();
    store.set_qis(id, {"profile:police"});
    store.run(id, WorkflowStep::kCluster, {});
    store.run(id, WorkflowStep::kPairs, {});
    store.run(id, WorkflowStep::kJoin, {});
    store.run(id, WorkflowStep::kDisclosures, {});
    report = store.report(id, true, "");
    EXPECT_EQ(code_of([&] { store.describe("feedbeef"); }), ErrorCode::kUnknownSession);
    EXPECT_EQ(code_of([&] { store.describe("../etc"); }), ErrorCode::kUnknownSession);
  }
  SessionStore restored(opts);
  EXPECT_EQ(restored.report(id, true, "").dump(), report.dump());
  EXPECT_EQ(load_history(sessions.path() / (id + ".jsonl")).size(), 6u);
  EXPECT_EQ(code_of([&] { restored.create((sessions.path() / "none.jsonl").string()); }),
            ErrorCode::kUnknownCollection);
}

TEST_F(Workflow, StoreSessionsIndependentUnderConcurrency) {
  SessionStore store({manifest_, testing::kCorpus.string(), std::nullopt, QuasiIdentifierDictionary::defaults()});
  std::vector<std::string> ids;
  for (int i = 0; i < 4; ++i) ids.push_back(store.create());
  std::vector<std::string> reports(ids.size());
  std::vector<std::thread> threads;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    threads.emplace_back([&, i] {
      store.set_qis(ids[i], {"profile:police"});
      store.run(ids[i], WorkflowStep::kCluster, {});
      store.run(ids[i], WorkflowStep::kPairs, {});
      store.run(ids[i], WorkflowStep::kJoin, {});
      store.run(ids[i], WorkflowStep::kDisclosures, {});
      auto r = store.report(ids[i], true, "");
      r.erase("session_id");
      reports[i] = r.dump();
    });
  }
  for (auto& t : threads) t.join();
  for (const auto& r : reports) EXPECT_EQ(r, reports[0]);
}

TEST_F(Workflow, CancelledStepLeavesSessionUntouched) {
  auto s = police_session();
  run_step(s, *ctx_, WorkflowStep::kCluster, {});
  std::stop_source stop;
  stop.request_stop();
  const auto before = describe_session(s).dump();
  EXPECT_EQ(code_of([&] { run_step(s, *ctx_, WorkflowStep::kPairs, {}, stop.get_token()); }), ErrorCode::kCancelled);
  EXPECT_EQ(describe_session(s).dump(), before);
}

}  // namespace
}  // namespace riskcal
