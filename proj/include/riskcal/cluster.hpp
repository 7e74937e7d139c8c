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

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "riskcal/catalog.hpp"

namespace riskcal {

using AttributeSet = std::set<std::string>;

/// |a ∩ b| / |a ∪ b|; 1 when both are empty.
double attribute_jaccard(const AttributeSet& a, const AttributeSet& b);

struct ClusterInput {
  std::string id;
  AttributeSet attributes;
};

struct DatasetCluster {
  /// Smallest member id.
  std::string id;
  /// Sorted ascending.
  std::vector<std::string> members;
  AttributeSet core_signature;
  /// Attributes present in at least kExtendedSignatureFraction of members.
  std::map<std::string, double> extended_signature;
  /// |core_signature ∩ selected QIs|, filled in by rank_clusters.
  std::size_t qi_overlap = 0;

  std::size_t size() const noexcept { return members.size(); }

  friend bool operator==(const DatasetCluster&, const DatasetCluster&) = default;
};

inline constexpr double kDefaultDistanceCut = 0.6;
inline constexpr double kExtendedSignatureFraction = 0.75;

/// Average-linkage agglomerative clustering on 1 - Jaccard. Clusters merge
/// while the closest pair is at distance <= cut; ties go to the
/// lexicographically smallest pair of cluster ids. Output is ordered by
/// cluster id. Throws Error(kEmptyCollection), Error(kInvalidArgument) for a
/// cut outside (0, 1] or duplicate ids.
std::vector<DatasetCluster> cluster_datasets(const std::vector<ClusterInput>& inputs,
                                             double distance_cut = kDefaultDistanceCut);
std::vector<DatasetCluster> cluster_datasets(const std::vector<DatasetMetadata>& collection,
                                             double distance_cut = kDefaultDistanceCut);

/// Descending core-signature overlap with the selection, then descending
/// size, then ascending id.
std::vector<DatasetCluster> rank_clusters(std::vector<DatasetCluster> clusters,
                                          std::span<const std::string> selected_qis);

nlohmann::json to_json(const DatasetCluster& c);

}  // namespace riskcal
