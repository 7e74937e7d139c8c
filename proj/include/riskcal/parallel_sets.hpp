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

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "riskcal/join.hpp"

namespace riskcal {

inline constexpr std::string_view kOtherCategory = "⟨other⟩";
inline constexpr std::string_view kBlankCategory = "⟨blank⟩";
inline constexpr std::string_view kTransitionArrow = " → ";
inline constexpr std::size_t kDefaultMaxCategories = 12;

struct Category {
  std::string name;
  std::size_t count = 0;
};

struct ParallelAxis {
  /// As requested, normalized: "age", "left.charge", "disposition".
  std::string attr;
  /// Descending count, then name; kOtherCategory last when present.
  std::vector<Category> categories;
};

struct Ribbon {
  std::string from;
  std::string to;
  std::size_t count = 0;
};

struct ParallelSetsModel {
  std::vector<ParallelAxis> axes;
  /// ribbons[i] connects axes[i] and axes[i + 1].
  std::vector<std::vector<Ribbon>> ribbons;
  std::size_t total = 0;
  bool truncated = false;
};

/// Attribute names a parallel-sets axis may use for this join: key
/// attributes, then "left.<attr>" and "right.<attr>" for every other column.
std::vector<std::string> joined_schema(const JoinResult& result, const RecordTable& left, const RecordTable& right);

/// Frequencies over the materialized joined rows. An axis is a key
/// attribute, a side-qualified "left.x"/"right.x", or a bare non-key name:
/// present on one side it reads that side, present on both it becomes a
/// transition axis whose category is the shared value or "l → r". Categories
/// beyond max_categories fold into kOtherCategory. Throws
/// Error(kEmptyResult), Error(kUnknownAttribute), Error(kEmptySelection) for
/// no axes, Error(kInvalidArgument) for max_categories 0.
ParallelSetsModel parallel_sets_model(const JoinResult& result, const RecordTable& left, const RecordTable& right,
                                      std::span<const std::string> axes,
                                      std::size_t max_categories = kDefaultMaxCategories);

/// Rewrites every category label through `mask`, merging labels that
/// collide. Counts are preserved.
ParallelSetsModel mask_categories(const ParallelSetsModel& model, std::string (*mask)(std::string_view));

nlohmann::json to_json(const ParallelSetsModel& m);

}  // namespace riskcal
