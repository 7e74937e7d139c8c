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

#include "riskcal/cluster.hpp"

#include <algorithm>
#include <limits>

#include <nlohmann/json.hpp>

#include "riskcal/error.hpp"

namespace riskcal {

namespace {

// Linkages closer than this are treated as tied.
constexpr double kTieEpsilon = 1e-12;

DatasetCluster describe(std::vector<std::string> members, const std::map<std::string, const AttributeSet*>& attrs) {
  DatasetCluster c;
  std::sort(members.begin(), members.end());
  c.id = members.front();
  c.members = std::move(members);
  std::map<std::string, std::size_t> presence;
  for (const auto& m : c.members) {
    for (const auto& a : *attrs.at(m)) ++presence[a];
  }
  const double n = static_cast<double>(c.members.size());
  for (const auto& [a, count] : presence) {
    if (count == c.members.size()) c.core_signature.insert(a);
    const double fraction = static_cast<double>(count) / n;
    if (fraction >= kExtendedSignatureFraction) c.extended_signature[a] = fraction;
  }
  return c;
}

}  // namespace

double attribute_jaccard(const AttributeSet& a, const AttributeSet& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t common = 0;
  for (const auto& x : a) common += b.count(x);
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

std::vector<DatasetCluster> cluster_datasets(const std::vector<ClusterInput>& inputs, double distance_cut) {
  if (inputs.empty()) throw Error(ErrorCode::kEmptyCollection, "nothing to cluster");
  if (!(distance_cut > 0.0 && distance_cut <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "distance cut must be in (0, 1]");
  }
  std::map<std::string, const AttributeSet*> attrs;
  for (const auto& in : inputs) {
    if (!attrs.emplace(in.id, &in.attributes).second) throw Error(ErrorCode::kInvalidArgument, "duplicate id " + in.id);
  }

  // Work in id order so index order and tie order agree.
  std::vector<const ClusterInput*> sorted;
  for (const auto& in : inputs) sorted.push_back(&in);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->id < b->id; });
  const std::size_t n = sorted.size();

  // sum[i][j]: sum of base distances over all cross-member pairs.
  std::vector<std::vector<double>> sum(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      sum[i][j] = sum[j][i] = 1.0 - attribute_jaccard(sorted[i]->attributes, sorted[j]->attributes);
    }
  }
  std::vector<std::vector<std::string>> members(n);
  std::vector<bool> alive(n, true);
  for (std::size_t i = 0; i < n; ++i) members[i] = {sorted[i]->id};

  for (;;) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = n, bj = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!alive[j]) continue;
        const double d = sum[i][j] / static_cast<double>(members[i].size() * members[j].size());
        if (d < best - kTieEpsilon) {
          best = d;
          bi = i;
          bj = j;
        } else if (d <= best + kTieEpsilon) {
          // Cluster ids are members.front() since members stay sorted.
          const auto& cur = std::minmax(members[bi].front(), members[bj].front());
          const auto& cand = std::minmax(members[i].front(), members[j].front());
          if (cand < cur) {
            bi = i;
            bj = j;
          }
        }
      }
    }
    if (bi == n || best > distance_cut + kTieEpsilon) break;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == bi || k == bj || !alive[k]) continue;
      sum[bi][k] = sum[k][bi] = sum[bi][k] + sum[bj][k];
    }
    members[bi].insert(members[bi].end(), members[bj].begin(), members[bj].end());
    std::sort(members[bi].begin(), members[bi].end());
    alive[bj] = false;
  }

  std::vector<DatasetCluster> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (alive[i]) out.push_back(describe(members[i], attrs));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

std::vector<DatasetCluster> cluster_datasets(const std::vector<DatasetMetadata>& collection, double distance_cut) {
  std::vector<ClusterInput> inputs;
  for (const auto& m : collection) {
    ClusterInput in{m.ref(), {}};
    for (const auto& a : m.attributes) in.attributes.insert(a.normalized_name);
    inputs.push_back(std::move(in));
  }
  return cluster_datasets(inputs, distance_cut);
}

std::vector<DatasetCluster> rank_clusters(std::vector<DatasetCluster> clusters, std::span<const std::string> selected_qis) {
  AttributeSet selected;
  for (const auto& q : selected_qis) selected.insert(normalize_attribute(q));
  for (auto& c : clusters) {
    c.qi_overlap = 0;
    for (const auto& a : c.core_signature) c.qi_overlap += selected.count(a);
  }
  std::sort(clusters.begin(), clusters.end(), [](const DatasetCluster& a, const DatasetCluster& b) {
    if (a.qi_overlap != b.qi_overlap) return a.qi_overlap > b.qi_overlap;
    if (a.size() != b.size()) return a.size() > b.size();
    return a.id < b.id;
  });
  return clusters;
}

nlohmann::json to_json(const DatasetCluster& c) {
  return {{"id", c.id},
          {"members", c.members},
          {"core_signature", c.core_signature},
          {"extended_signature", c.extended_signature},
          {"qi_overlap", c.qi_overlap},
          {"size", c.size()}};
}

}  // namespace riskcal
