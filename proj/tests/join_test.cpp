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

#include "riskcal/join.hpp"

#include <random>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "fixture_support.hpp"
#include "oracles.hpp"
#include "riskcal/error.hpp"

namespace riskcal {
namespace {

using nlohmann::json;
using Strs = std::vector<std::string>;
using testing::FixtureCorpus;

RecordTable table(const Strs& names, std::vector<Row> rows) {
  return RecordTable::from_columns(names, std::move(rows), QuasiIdentifierDictionary::defaults());
}

std::multiset<std::pair<std::size_t, std::size_t>> as_multiset(const JoinResult& r) {
  return {r.joined_rows.begin(), r.joined_rows.end()};
}

Strs random_key(std::mt19937& rng, const RecordTable& a, const RecordTable& b) {
  Strs shared;
  for (const auto& s : shared_attributes(a, b)) shared.push_back(s);
  std::shuffle(shared.begin(), shared.end(), rng);
  shared.resize(std::min<std::size_t>(shared.size(), 1 + rng() % 3));
  return shared;
}

std::set<oracle::OracleCandidate> as_oracle(const std::vector<DisclosureCandidate>& cs) {
  std::set<oracle::OracleCandidate> out;
  for (const auto& c : cs) {
    out.insert({std::string(to_string(c.kind)), c.left_row, c.right_row, std::string(to_string(c.located)),
                c.revealed_attrs});
  }
  return out;
}

TEST(SharedAttributes, Examples) {
  auto& corpus = FixtureCorpus::get(testing::kCorpus);
  const auto shared = shared_attributes(corpus.meta("albany-pd.example/apd-fi-cards-nbhd"),
                                        corpus.meta("albany-pd.example/apd-arrests-nbhd"));
  for (const auto* a : {"age", "race", "sex", "neighborhoodxy"}) EXPECT_TRUE(shared.count(a)) << a;

  EXPECT_TRUE(shared_attributes(table({"a"}, {}), table({"b"}, {})).empty());
  const Strs nine = {"a", "b", "c", "d", "e", "f", "g", "h", "i"};
  EXPECT_EQ(shared_attributes(table(nine, {}), table(nine, {})).size(), 9u);
}

TEST(AutoJoinKey, Examples) {
  const auto dict = QuasiIdentifierDictionary::defaults();
  // age has 8 values, notes 64, sex 2.
  std::vector<Row> rows;
  for (int i = 0; i < 64; ++i) rows.push_back({std::to_string(i % 8), "n" + std::to_string(i), i % 2 ? "F" : "M"});
  const auto a = table({"Age", "Notes", "Sex"}, rows);
  EXPECT_EQ(auto_join_key(a, a, dict, 2), (Strs{"age", "sex"}));
  EXPECT_EQ(auto_join_key(a, a, dict, 4), (Strs{"age", "sex", "notes"}));

  const auto b = table({"Case ID", "Charge"}, {{"1", "x"}});
  const auto c = table({"Case_ID", "Violation"}, {{"1", "y"}});
  EXPECT_EQ(auto_join_key(b, c, dict), (Strs{"case id"}));

  try {
    auto_join_key(table({"x"}, {}), table({"y"}, {}), dict);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoSharedAttributes);
  }
}

TEST(Containment, Examples) {
  const auto a = table({"k"}, {{"x"}, {"y"}, {"z"}});
  const auto b = table({"k"}, {{"y"}, {"z"}, {"w"}, {"v"}});
  EXPECT_DOUBLE_EQ(containment(a, a, Strs{"k"}), 1.0);
  EXPECT_DOUBLE_EQ(containment(a, table({"k"}, {{"q"}}), Strs{"k"}), 0.0);
  EXPECT_DOUBLE_EQ(containment(a, b, Strs{"k"}), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(containment(a, table({"k"}, {}), Strs{"k"}), 0.0);
  EXPECT_THROW(containment(a, b, Strs{"nope"}), Error);
}

TEST(JoinabilityRisk, Examples) {
  const auto a = table({"k"}, {{"1"}, {"2"}, {"3"}});
  EXPECT_DOUBLE_EQ(joinability_risk(a, a, Strs{"k"}).risk, 1.0);
  EXPECT_DOUBLE_EQ(joinability_risk(a, table({"k"}, {{"9"}}), Strs{"k"}).risk, 0.0);
}

TEST(JoinabilityRisk, BlankKeysNeverMatch) {
  const auto a = table({"k"}, {{""}, {" "}, {"1"}});
  const auto s = joinability_risk(a, a, Strs{"k"});
  EXPECT_EQ(s.left_distinct_keys, 1u);
  EXPECT_EQ(s.matched_distinct_keys, 1u);
  EXPECT_EQ(execute_join(a, a, {"a", "a", {"k"}}).joined_rows.size(), 1u);
}

TEST(RankPairs, Counts) {
  EXPECT_EQ(pair_count(8), 28u);
  EXPECT_EQ(pair_count(426), 90525u);
  EXPECT_EQ(pair_count(2), 1u);
  EXPECT_EQ(pair_count(1), 0u);

  const auto t = table({"Age"}, {{"1"}});
  for (std::size_t m : {2u, 3u, 8u}) {
    Strs ids;
    for (std::size_t i = 0; i < m; ++i) ids.push_back("d" + std::to_string(i));
    EXPECT_EQ(rank_pairs(ids, [&](const std::string&) -> const RecordTable& { return t; },
                         QuasiIdentifierDictionary::defaults())
                  .size(),
              pair_count(m));
  }
  try {
    rank_pairs({"one"}, [&](const std::string&) -> const RecordTable& { return t; },
               QuasiIdentifierDictionary::defaults());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientMembers);
  }
}

TEST(RankPairs, OrderedByRisk) {
  const auto a = table({"Age"}, {{"1"}, {"2"}});
  const auto b = table({"Age"}, {{"1"}, {"2"}});
  const auto c = table({"Age"}, {{"1"}, {"1"}, {"5"}});
  const auto d = table({"Wattage"}, {{"9"}});
  const std::map<std::string, const RecordTable*> ts = {{"a", &a}, {"b", &b}, {"c", &c}, {"d", &d}};
  const auto pairs = rank_pairs({"d", "c", "b", "a"}, [&](const std::string& id) -> const RecordTable& {
    return *ts.at(id);
  }, QuasiIdentifierDictionary::defaults());
  ASSERT_EQ(pairs.size(), 6u);
  EXPECT_EQ(pairs[0].spec.left_id, "a");
  EXPECT_EQ(pairs[0].spec.right_id, "b");
  EXPECT_DOUBLE_EQ(pairs[0].score.risk, 1.0);
  for (std::size_t i = 1; i < pairs.size(); ++i) EXPECT_GE(pairs[i - 1].score.risk, pairs[i].score.risk);
  EXPECT_TRUE(pairs.back().spec.key_attrs.empty());
}

TEST(ExecuteJoin, Examples) {
  const auto a = table({"k", "v"}, {{"x", "1"}, {"y", "2"}});
  const auto b = table({"k", "w"}, {{"x", "3"}});
  const auto r = execute_join(a, b, {"a", "b", {"k"}});
  ASSERT_EQ(r.joined_rows.size(), 1u);
  EXPECT_EQ(r.joined_rows[0], (std::pair<std::size_t, std::size_t>{0, 0}));
  EXPECT_TRUE(execute_join(a, table({"k"}, {{"q"}}), {"a", "b", {"k"}}).matches.empty());
  EXPECT_THROW(execute_join(a, b, {"a", "b", {"v"}}), Error);
}

TEST(ExecuteJoin, CapTruncatesButKeepsMatches) {
  std::vector<Row> rows(50, Row{"x"});
  const auto a = table({"k"}, rows);
  const auto r = execute_join(a, a, {"a", "a", {"k"}}, 100);
  EXPECT_TRUE(r.truncated);
  EXPECT_EQ(r.joined_rows.size(), 100u);
  EXPECT_EQ(r.total_joined_rows, 2500u);
  EXPECT_EQ(r.matches.at(KeyTuple{"x"}).left_rows.size(), 50u);
}

TEST(ExecuteJoin, MatchesNestedLoopOracle) {
  std::mt19937 rng(43);
  const auto dict = QuasiIdentifierDictionary::defaults();
  for (int round = 0; round < 300; ++round) {
    const auto [a, b] = oracle::random_pair(rng, 40);
    const auto key = random_key(rng, a, b);
    const auto r = execute_join(a, b, {"a", "b", key});
    EXPECT_EQ(as_multiset(r), oracle::nested_loop_join(a, b, key));
    EXPECT_FALSE(r.truncated);

    std::size_t total = 0;
    for (const auto& [k, m] : r.matches) total += m.left_rows.size() * m.right_rows.size();
    EXPECT_EQ(total, r.joined_rows.size());

    const auto s = joinability_risk(a, b, key);
    const auto o = oracle::score(a, b, key);
    EXPECT_NEAR(s.containment, o.containment, 1e-12);
    EXPECT_NEAR(s.unique_match_fraction, o.unique_fraction, 1e-12);
    EXPECT_EQ(s.matched_distinct_keys, o.matched);
    EXPECT_LE(s.risk, s.containment);
    EXPECT_LE(s.containment, 1.0);

    EXPECT_EQ(as_oracle(detect_disclosures(r, a.attributes(), b.attributes(), dict)),
              oracle::candidates(a, b, key, dict));
  }
}

TEST(ExecuteJoin, SymmetricUpToSwap) {
  std::mt19937 rng(47);
  for (int round = 0; round < 200; ++round) {
    const auto [a, b] = oracle::random_pair(rng, 30);
    const auto key = random_key(rng, a, b);
    std::multiset<std::pair<std::size_t, std::size_t>> swapped;
    for (const auto& [l, r] : execute_join(b, a, {"b", "a", key}).joined_rows) swapped.emplace(r, l);
    EXPECT_EQ(as_multiset(execute_join(a, b, {"a", "b", key})), swapped);
  }
}

TEST(ExecuteJoin, AppendingKeyAttributeNeverAddsJoinedRows) {
  std::mt19937 rng(53);
  for (int round = 0; round < 200; ++round) {
    const auto [a, b] = oracle::random_pair(rng, 40);
    Strs shared;
    for (const auto& s : shared_attributes(a, b)) shared.push_back(s);
    if (shared.size() < 2) continue;
    std::shuffle(shared.begin(), shared.end(), rng);
    const Strs shorter(shared.begin(), shared.end() - 1);
    // Distinct matched tuples can split when a key grows; joined pairs and
    // matched rows cannot grow.
    const auto loose = execute_join(a, b, {"a", "b", shorter});
    const auto tight = execute_join(a, b, {"a", "b", shared});
    EXPECT_GE(loose.total_joined_rows, tight.total_joined_rows);
    const auto loose_pairs = as_multiset(loose);
    for (const auto& p : tight.joined_rows) EXPECT_TRUE(loose_pairs.count(p));
    std::set<std::size_t> loose_left, tight_left;
    for (const auto& p : loose.joined_rows) loose_left.insert(p.first);
    for (const auto& p : tight.joined_rows) tight_left.insert(p.first);
    EXPECT_GE(loose_left.size(), tight_left.size());
  }
}

TEST(DetectDisclosures, IdentityKeysAreUniqueInRawTables) {
  std::mt19937 rng(59);
  const auto dict = QuasiIdentifierDictionary::defaults();
  for (int round = 0; round < 200; ++round) {
    const auto [a, b] = oracle::random_pair(rng, 40);
    const auto key = random_key(rng, a, b);
    const auto r = execute_join(a, b, {"a", "b", key});
    for (const auto& c : detect_disclosures(r, a.attributes(), b.attributes(), dict)) {
      if (c.kind != DisclosureKind::kIdentity) continue;
      const auto ca = a.columns(key);
      const auto cb = b.columns(key);
      EXPECT_EQ(oracle::multiplicity(a, c.left_row, ca, a, ca), 1u);
      EXPECT_EQ(oracle::multiplicity(a, c.left_row, ca, b, cb), 1u);
    }
  }
}

TEST(DetectDisclosures, ManyToManyYieldsNothing) {
  const auto a = table({"Age", "Charge"}, {{"1", "x"}, {"1", "y"}});
  const auto b = table({"Age", "Violation"}, {{"1", "p"}, {"1", "q"}});
  const auto r = execute_join(a, b, {"a", "b", {"age"}});
  EXPECT_TRUE(detect_disclosures(r, a.attributes(), b.attributes(), QuasiIdentifierDictionary::defaults()).empty());
}

json expected_candidates(const std::string& file) {
  return json::parse(read_file(testing::kCorpus / "expected" / file));
}

void check_scenario(const std::string& file, bool need_identity, bool need_attribute) {
  auto& corpus = FixtureCorpus::get(testing::kCorpus);
  const auto expected = expected_candidates(file);
  const auto left = expected["left"].get<std::string>();
  const auto right = expected["right"].get<std::string>();
  const auto& a = corpus.table(left);
  const auto& b = corpus.table(right);
  const auto r = execute_join(a, b, {left, right, expected["key"].get<Strs>()});
  const auto found = detect_disclosures(r, corpus.meta(left).attributes, corpus.meta(right).attributes,
                                        QuasiIdentifierDictionary::defaults());
  json got = json::array();
  for (const auto& c : found) got.push_back(to_json(c));
  EXPECT_EQ(got, expected["candidates"]) << got.dump(2);
  bool identity = false, attribute = false;
  for (const auto& c : found) {
    identity = identity || c.kind == DisclosureKind::kIdentity;
    attribute = attribute || c.kind == DisclosureKind::kAttribute;
  }
  if (need_identity) EXPECT_TRUE(identity);
  if (need_attribute) EXPECT_TRUE(attribute);
}

TEST(Scenario, FortLauderdaleCaseIdJoins) {
  check_scenario("ftl-juvenile-adult-case-id.json", true, false);
  check_scenario("ftl-adult-citations-case-id.json", true, true);
}

TEST(Scenario, AlbanyQuasiIdentifierJoin) { check_scenario("albany-interviews-arrests.json", false, true); }

TEST(Transitive, BridgeFixture) {
  auto& corpus = FixtureCorpus::get(testing::kTransitive);
  const auto found = transitive_candidates(
      corpus.metadata(), [&](const std::string& id) -> const RecordTable& { return corpus.table(id); },
      QuasiIdentifierDictionary::defaults(), 0.2);
  ASSERT_EQ(found.size(), 1u);
  EXPECT_EQ(found[0].bridge_b, "tri.example/voter-roll");
  EXPECT_EQ(found[0].endpoint_a, "tri.example/clinic-visits");
  EXPECT_EQ(found[0].endpoint_c, "tri.example/household-income");
  EXPECT_FALSE(found[0].key_ab.empty());
  EXPECT_EQ(found[0].key_bc, Strs{"zip"});
  EXPECT_DOUBLE_EQ(found[0].score_ab.risk, 1.0);
  EXPECT_DOUBLE_EQ(found[0].score_bc.risk, 1.0);
}

std::vector<DatasetMetadata> metas_for(const std::vector<std::pair<std::string, Strs>>& specs) {
  const auto dict = QuasiIdentifierDictionary::defaults();
  std::vector<DatasetMetadata> out;
  for (const auto& [id, attrs] : specs) {
    DatasetMetadata m;
    m.portal = "x.example";
    m.dataset_id = id;
    m.resource_kind = ResourceKind::kDataset;
    for (const auto& a : attrs) m.attributes.push_back(describe_attribute(a, dict));
    out.push_back(m);
  }
  return out;
}

TEST(Transitive, NoBridgeAndSmallCollections) {
  const auto metas = metas_for({{"a", {"age", "income"}}, {"b", {"sex", "charge"}}, {"c", {"zip", "diagnosis"}}});
  std::map<std::string, RecordTable> tables;
  for (const auto& m : metas) {
    tables.emplace(m.ref(), RecordTable(m.attributes, {Row(m.attributes.size(), "1")}));
  }
  auto lookup = [&](const std::string& id) -> const RecordTable& { return tables.at(id); };
  EXPECT_TRUE(transitive_candidates(metas, lookup, QuasiIdentifierDictionary::defaults(), 0.0).empty());
  const std::vector<DatasetMetadata> two(metas.begin(), metas.begin() + 2);
  EXPECT_TRUE(transitive_candidates(two, lookup, QuasiIdentifierDictionary::defaults(), 0.0).empty());
}

TEST(Transitive, MatchesExhaustiveTripleEnumeration) {
  std::mt19937 rng(61);
  const auto dict = QuasiIdentifierDictionary::defaults();
  const Strs pool = {"age", "sex", "zip", "race", "income", "charge"};
  for (int round = 0; round < 40; ++round) {
    std::vector<std::pair<std::string, Strs>> specs;
    for (int d = 0; d < 5; ++d) {
      Strs attrs;
      for (const auto& p : pool) {
        if (rng() % 3 == 0) attrs.push_back(p);
      }
      if (attrs.empty()) attrs.push_back("income");
      specs.push_back({"d" + std::to_string(d), attrs});
    }
    const auto metas = metas_for(specs);
    std::map<std::string, RecordTable> tables;
    for (const auto& m : metas) {
      std::vector<Row> rows;
      for (int r = 0; r < 6; ++r) {
        Row row;
        for (std::size_t c = 0; c < m.attributes.size(); ++c) row.push_back(std::to_string(rng() % 4));
        rows.push_back(row);
      }
      tables.emplace(m.ref(), RecordTable(m.attributes, rows));
    }
    auto lookup = [&](const std::string& id) -> const RecordTable& { return tables.at(id); };
    const double min_risk = (rng() % 4) / 10.0;
    const auto found = transitive_candidates(metas, lookup, dict, min_risk);

    std::set<std::tuple<std::string, std::string, std::string>> expected;
    auto shares_qi = [&](const DatasetMetadata& x, const DatasetMetadata& y) {
      for (const auto& a : x.attributes) {
        for (const auto& b : y.attributes) {
          if (a.normalized_name == b.normalized_name && dict.classify(a.normalized_name) == SemanticClass::kQuasiIdentifier) {
            return true;
          }
        }
      }
      return false;
    };
    for (const auto& a : metas) {
      for (const auto& c : metas) {
        if (!(a.ref() < c.ref()) || shares_qi(a, c)) continue;
        for (const auto& b : metas) {
          if (b.ref() == a.ref() || b.ref() == c.ref() || !shares_qi(a, b) || !shares_qi(b, c)) continue;
          const auto& ta = tables.at(a.ref());
          const auto& tb = tables.at(b.ref());
          const auto& tc = tables.at(c.ref());
          const auto kab = auto_join_key(ta, tb, dict);
          const auto kbc = auto_join_key(tb, tc, dict);
          const auto sab = oracle::score(ta, tb, kab);
          const auto sbc = oracle::score(tb, tc, kbc);
          if (sab.containment * sab.unique_fraction >= min_risk && sbc.containment * sbc.unique_fraction >= min_risk) {
            expected.emplace(a.ref(), c.ref(), b.ref());
          }
        }
      }
    }
    std::set<std::tuple<std::string, std::string, std::string>> got;
    for (const auto& t : found) got.emplace(t.endpoint_a, t.endpoint_c, t.bridge_b);
    EXPECT_EQ(got.size(), found.size());
    EXPECT_EQ(got, expected);
  }
}

TEST(SuggestFeatures, BlurResolvesToSingleMatch) {
  // Ten keys, each 3×3; within key "k0" one pair also agrees on "flag".
  std::vector<Row> left, right;
  for (int k = 0; k < 10; ++k) {
    for (int i = 0; i < 3; ++i) {
      left.push_back({"k" + std::to_string(k), k == 0 && i == 0 ? "open" : "l", "same"});
      right.push_back({"k" + std::to_string(k), k == 0 && i == 0 ? "open" : "r", "same"});
    }
  }
  const auto a = table({"key", "flag", "const"}, left);
  const auto b = table({"key", "flag", "const"}, right);
  const auto r = execute_join(a, b, {"a", "b", {"key"}});
  const auto s = suggest_features(r, Strs{"const", "flag"}, a, b);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].attr, "flag");
  EXPECT_NEAR(s[0].separation_gain, 8.0 / 9.0, 1e-12);
  EXPECT_EQ(s[0].matched_keys_after, 1u);
  EXPECT_EQ(s[1].attr, "const");
  EXPECT_EQ(s[1].separation_gain, 0.0);
}

TEST(SuggestFeatures, OverconstrainingRanksLast) {
  const auto a = table({"k", "x", "y"}, {{"1", "a", "p"}, {"1", "b", "p"}});
  const auto b = table({"k", "x", "y"}, {{"1", "c", "p"}, {"1", "a", "q"}});
  const auto r = execute_join(a, b, {"a", "b", {"k"}});
  const auto s = suggest_features(r, Strs{"y", "x"}, a, b);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_FALSE(s[0].overconstraining);
  EXPECT_EQ(s[0].attr, "x");
  EXPECT_EQ(s[1].attr, "y");
  EXPECT_FALSE(s[1].overconstraining);

  const auto c = table({"k", "z"}, {{"1", "a"}});
  const auto d = table({"k", "z"}, {{"1", "b"}});
  const auto over = suggest_features(execute_join(c, d, {"c", "d", {"k"}}), Strs{"z"}, c, d);
  ASSERT_EQ(over.size(), 1u);
  EXPECT_TRUE(over[0].overconstraining);
  EXPECT_EQ(to_json(over[0])["tag"], "overconstraining");
}

TEST(SuggestFeatures, MatchesReJoinOracle) {
  std::mt19937 rng(67);
  for (int round = 0; round < 150; ++round) {
    const auto [a, b] = oracle::random_pair(rng, 40);
    Strs shared;
    for (const auto& s : shared_attributes(a, b)) shared.push_back(s);
    if (shared.size() < 2) continue;
    const Strs key = {shared[0]};
    const Strs rest(shared.begin() + 1, shared.end());
    const auto r = execute_join(a, b, {"a", "b", key});
    const auto got = suggest_features(r, rest, a, b);
    if (r.matches.empty()) {
      EXPECT_TRUE(got.empty());
      continue;
    }
    auto mean = [&](const Strs& k) -> std::pair<double, std::size_t> {
      const auto pairs = oracle::nested_loop_join(a, b, k);
      const auto o = oracle::score(a, b, k);
      return {o.matched ? static_cast<double>(pairs.size()) / o.matched : 0.0, o.matched};
    };
    const double before = mean(key).first;
    std::vector<std::tuple<int, double, std::string>> expected;
    for (const auto& attr : rest) {
      Strs k = key;
      k.push_back(attr);
      const auto [after, matched] = mean(k);
      if (matched == 0) {
        expected.emplace_back(1, 0.0, attr);
      } else {
        expected.emplace_back(0, -std::clamp((before - after) / before, 0.0, 1.0), attr);
      }
    }
    std::sort(expected.begin(), expected.end());
    ASSERT_EQ(got.size(), expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].attr, std::get<2>(expected[i]));
      EXPECT_NEAR(got[i].separation_gain, -std::get<1>(expected[i]), 1e-12);
      EXPECT_EQ(got[i].overconstraining, std::get<0>(expected[i]) == 1);
    }
  }
}

}  // namespace
}  // namespace riskcal
