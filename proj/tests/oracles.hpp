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

// Brute-force reference implementations used by the unit tests and the
// acceptance suite. They favour obviousness over speed: pairwise row
// comparisons, exhaustive subset enumeration, exact integer arithmetic.

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "riskcal/record_table.hpp"
#include "riskcal/util.hpp"

namespace riskcal::oracle {

inline RecordTable random_table(std::mt19937& rng, std::size_t max_rows, std::size_t max_attrs,
                                std::size_t min_rows = 1) {
  std::uniform_int_distribution<std::size_t> nrows(min_rows, max_rows);
  std::uniform_int_distribution<std::size_t> nattrs(1, max_attrs);
  const std::size_t rows = nrows(rng);
  const std::size_t attrs = nattrs(rng);
  std::vector<AttributeDescriptor> desc;
  std::vector<std::size_t> alphabet;
  for (std::size_t a = 0; a < attrs; ++a) {
    const std::string name = "c" + std::to_string(a);
    desc.push_back({name, name, SemanticClass::kOther, ValueKind::kCategorical});
    alphabet.push_back(std::uniform_int_distribution<std::size_t>(1, 6)(rng));
  }
  std::vector<Row> data;
  for (std::size_t r = 0; r < rows; ++r) {
    Row row;
    for (std::size_t a = 0; a < attrs; ++a) {
      const auto v = std::uniform_int_distribution<std::size_t>(0, alphabet[a])(rng);
      // v == alphabet[a] stands for a blank cell; padding checks trimming.
      std::string cell = v == alphabet[a] ? std::string(rng() % 2 ? "" : "  ") : "v" + std::to_string(v);
      if (!cell.empty() && rng() % 7 == 0) cell = " " + cell;
      row.push_back(cell);
    }
    data.push_back(std::move(row));
  }
  return RecordTable(std::move(desc), std::move(data));
}

inline bool same_key(const RecordTable& t, std::size_t a, std::size_t b, const std::vector<std::size_t>& cols) {
  for (auto c : cols) {
    if (trim(t.cell(a, c)) != trim(t.cell(b, c))) return false;
  }
  return true;
}

/// Rows sharing row r's key, by pairwise comparison.
inline std::vector<std::size_t> class_of(const RecordTable& t, std::size_t r, const std::vector<std::size_t>& cols) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < t.row_count(); ++j) {
    if (same_key(t, r, j, cols)) out.push_back(j);
  }
  return out;
}

inline std::size_t k_anonymity(const RecordTable& t, const std::vector<std::size_t>& cols) {
  std::size_t k = SIZE_MAX;
  for (std::size_t r = 0; r < t.row_count(); ++r) k = std::min(k, class_of(t, r, cols).size());
  return k;
}

inline std::size_t l_diversity(const RecordTable& t, const std::vector<std::size_t>& cols, std::size_t s) {
  std::size_t l = SIZE_MAX;
  for (std::size_t r = 0; r < t.row_count(); ++r) {
    std::set<std::string> distinct;
    for (auto j : class_of(t, r, cols)) distinct.insert(std::string(trim(t.cell(j, s))));
    l = std::min(l, distinct.size());
  }
  return l;
}

/// Exact: TVD = sum |c_v * n - g_v * m| / (2 m n) with integer numerators.
inline double t_closeness(const RecordTable& t, const std::vector<std::size_t>& cols, std::size_t s) {
  const std::int64_t n = static_cast<std::int64_t>(t.row_count());
  std::set<std::string> values;
  for (std::size_t r = 0; r < t.row_count(); ++r) values.insert(std::string(trim(t.cell(r, s))));
  long double best = 0;
  for (std::size_t r = 0; r < t.row_count(); ++r) {
    const auto cls = class_of(t, r, cols);
    const std::int64_t m = static_cast<std::int64_t>(cls.size());
    std::int64_t num = 0;
    for (const auto& v : values) {
      std::int64_t c = 0, g = 0;
      for (auto j : cls) c += trim(t.cell(j, s)) == v;
      for (std::size_t j = 0; j < t.row_count(); ++j) g += trim(t.cell(j, s)) == v;
      num += std::llabs(c * n - g * m);
    }
    best = std::max(best, static_cast<long double>(num) / (2.0L * m * n));
  }
  return static_cast<double>(best);
}

struct SmallClass {
  std::vector<std::size_t> cols;
  std::vector<std::string> key;
  std::vector<std::size_t> rows;
  auto operator<=>(const SmallClass&) const = default;
};

/// Every class of size <= threshold over each column subset in `subsets`.
inline std::set<SmallClass> small_classes(const RecordTable& t, const std::vector<std::vector<std::size_t>>& subsets,
                                          std::size_t threshold) {
  std::set<SmallClass> out;
  for (const auto& cols : subsets) {
    for (std::size_t r = 0; r < t.row_count(); ++r) {
      auto rows = class_of(t, r, cols);
      if (rows.size() > threshold) continue;
      std::vector<std::string> key;
      for (auto c : cols) key.emplace_back(trim(t.cell(r, c)));
      out.insert({cols, key, rows});
    }
  }
  return out;
}

}  // namespace riskcal::oracle

#include "riskcal/cluster.hpp"

namespace riskcal::oracle {

/// Textbook average linkage with the Lance–Williams update in long double.
/// Returns sorted member lists, sorted by first member.
inline std::vector<std::vector<std::string>> average_linkage(const std::vector<ClusterInput>& inputs, double cut) {
  std::vector<std::vector<std::string>> clusters;
  std::vector<const AttributeSet*> attrs;
  std::vector<const ClusterInput*> sorted;
  for (const auto& in : inputs) sorted.push_back(&in);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->id < b->id; });
  for (auto* in : sorted) clusters.push_back({in->id});
  const std::size_t n = sorted.size();
  std::vector<std::vector<long double>> d(n, std::vector<long double>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto& a = sorted[i]->attributes;
      const auto& b = sorted[j]->attributes;
      std::size_t common = 0;
      for (const auto& x : a) common += b.count(x);
      const std::size_t uni = a.size() + b.size() - common;
      d[i][j] = uni == 0 ? 0.0L : 1.0L - static_cast<long double>(common) / static_cast<long double>(uni);
    }
  }
  std::vector<bool> alive(n, true);
  for (;;) {
    long double best = 10;
    std::pair<std::string, std::string> best_ids;
    std::size_t bi = n, bj = n;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j || !alive[i] || !alive[j]) continue;
        const auto ids = std::minmax(clusters[i].front(), clusters[j].front());
        const std::pair<std::string, std::string> key(ids.first, ids.second);
        if (d[i][j] < best - 1e-12L || (d[i][j] <= best + 1e-12L && key < best_ids)) {
          best = d[i][j];
          best_ids = key;
          bi = std::min(i, j);
          bj = std::max(i, j);
        }
      }
    }
    if (bi == n || best > cut + 1e-12L) break;
    const long double ni = clusters[bi].size(), nj = clusters[bj].size();
    for (std::size_t k = 0; k < n; ++k) {
      if (!alive[k] || k == bi || k == bj) continue;
      d[bi][k] = d[k][bi] = (ni * d[bi][k] + nj * d[bj][k]) / (ni + nj);
    }
    clusters[bi].insert(clusters[bi].end(), clusters[bj].begin(), clusters[bj].end());
    std::sort(clusters[bi].begin(), clusters[bi].end());
    alive[bj] = false;
  }
  std::vector<std::vector<std::string>> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (alive[i]) out.push_back(clusters[i]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace riskcal::oracle

#include "riskcal/join.hpp"

namespace riskcal::oracle {

/// Two tables over names drawn from a pool that mixes quasi-identifiers,
/// sensitive and linking attributes. "age" is always shared.
inline std::pair<RecordTable, RecordTable> random_pair(std::mt19937& rng, std::size_t max_rows) {
  static const std::vector<std::string> pool = {"age", "sex", "race", "charge", "case id", "violation", "note"};
  auto make = [&](std::size_t rows) {
    std::vector<std::string> names = {"age"};
    for (std::size_t i = 1; i < pool.size(); ++i) {
      if (rng() % 2) names.push_back(pool[i]);
    }
    std::shuffle(names.begin(), names.end(), rng);
    const auto dict = QuasiIdentifierDictionary::defaults();
    std::vector<AttributeDescriptor> desc;
    for (const auto& n : names) desc.push_back(describe_attribute(n, dict));
    std::vector<Row> data;
    for (std::size_t r = 0; r < rows; ++r) {
      Row row;
      for (const auto& n : names) {
        const auto width = 1 + std::hash<std::string>{}(n) % 4;
        const auto v = rng() % (width + 1);
        row.push_back(v == width ? (rng() % 2 ? "" : " ") : n.substr(0, 1) + std::to_string(v));
      }
      data.push_back(std::move(row));
    }
    return RecordTable(std::move(desc), std::move(data));
  };
  std::uniform_int_distribution<std::size_t> nrows(0, max_rows);
  return {make(nrows(rng)), make(nrows(rng))};
}

inline bool keys_equal(const RecordTable& a, std::size_t i, const std::vector<std::size_t>& ca, const RecordTable& b,
                       std::size_t j, const std::vector<std::size_t>& cb) {
  for (std::size_t k = 0; k < ca.size(); ++k) {
    const auto x = trim(a.cell(i, ca[k]));
    if (x.empty() || x != trim(b.cell(j, cb[k]))) return false;
  }
  return true;
}

inline std::multiset<std::pair<std::size_t, std::size_t>> nested_loop_join(const RecordTable& a, const RecordTable& b,
                                                                           const std::vector<std::string>& key) {
  const auto ca = a.columns(key);
  const auto cb = b.columns(key);
  std::multiset<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < a.row_count(); ++i) {
    for (std::size_t j = 0; j < b.row_count(); ++j) {
      if (keys_equal(a, i, ca, b, j, cb)) out.emplace(i, j);
    }
  }
  return out;
}

/// Rows of `t` whose key equals row i of `a` (blank keys match nothing).
inline std::size_t multiplicity(const RecordTable& a, std::size_t i, const std::vector<std::size_t>& ca,
                                const RecordTable& t, const std::vector<std::size_t>& ct) {
  std::size_t n = 0;
  for (std::size_t j = 0; j < t.row_count(); ++j) n += keys_equal(a, i, ca, t, j, ct);
  return n;
}

struct OracleScore {
  double containment;
  double unique_fraction;
  std::size_t matched;
};

inline OracleScore score(const RecordTable& a, const RecordTable& b, const std::vector<std::string>& key) {
  const auto ca = a.columns(key);
  const auto cb = b.columns(key);
  auto distinct = [](const RecordTable& t, const std::vector<std::size_t>& c) {
    std::set<std::vector<std::string>> s;
    for (std::size_t r = 0; r < t.row_count(); ++r) {
      std::vector<std::string> k;
      bool blank = false;
      for (auto x : c) {
        k.emplace_back(trim(t.cell(r, x)));
        blank = blank || k.back().empty();
      }
      if (!blank) s.insert(k);
    }
    return s;
  };
  const auto da = distinct(a, ca), db = distinct(b, cb);
  std::size_t matched = 0, unique = 0;
  for (const auto& k : da) {
    if (!db.count(k)) continue;
    ++matched;
    std::size_t ma = 0, mb = 0;
    for (std::size_t r = 0; r < a.row_count(); ++r) {
      bool eq = true;
      for (std::size_t x = 0; x < ca.size(); ++x) eq = eq && trim(a.cell(r, ca[x])) == k[x];
      ma += eq;
    }
    for (std::size_t r = 0; r < b.row_count(); ++r) {
      bool eq = true;
      for (std::size_t x = 0; x < cb.size(); ++x) eq = eq && trim(b.cell(r, cb[x])) == k[x];
      mb += eq;
    }
    unique += ma == 1 && mb == 1;
  }
  const auto denom = std::min(da.size(), db.size());
  return {denom ? static_cast<double>(matched) / denom : 0.0, matched ? static_cast<double>(unique) / matched : 0.0,
          matched};
}

struct OracleCandidate {
  std::string kind;
  std::size_t left_row, right_row;
  std::string located;
  std::vector<std::string> revealed;
  auto operator<=>(const OracleCandidate&) const = default;
};

inline std::vector<std::string> reveals(const RecordTable& from, const RecordTable& into,
                                        const QuasiIdentifierDictionary& dict) {
  std::vector<std::string> out;
  for (const auto& a : from.attributes()) {
    const auto c = dict.classify(a.normalized_name);
    if ((c == SemanticClass::kSensitive || c == SemanticClass::kLinking) && !into.has_attribute(a.normalized_name)) {
      out.push_back(a.normalized_name);
    }
  }
  return out;
}

inline std::set<OracleCandidate> candidates(const RecordTable& a, const RecordTable& b,
                                            const std::vector<std::string>& key,
                                            const QuasiIdentifierDictionary& dict) {
  const auto ca = a.columns(key);
  const auto cb = b.columns(key);
  const auto from_right = reveals(b, a, dict);
  const auto from_left = reveals(a, b, dict);
  std::set<OracleCandidate> out;
  for (const auto& [i, j] : nested_loop_join(a, b, key)) {
    const auto left_mult = multiplicity(a, i, ca, a, ca);
    const auto right_mult = multiplicity(a, i, ca, b, cb);
    if (left_mult == 1 && right_mult == 1) out.insert({"identity", i, j, "both", {}});
    if (left_mult == 1 && !from_right.empty()) out.insert({"attribute", i, j, "left", from_right});
    if (right_mult == 1 && !from_left.empty()) out.insert({"attribute", i, j, "right", from_left});
  }
  return out;
}

}  // namespace riskcal::oracle
