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

#include <string>
#include <string_view>

namespace riskcal {

/// The phrase that unlocks unredacted output (CLI `--i-understand-risk`,
/// HTTP `acknowledge=i-understand-risk`).
inline constexpr std::string_view kRiskAcknowledgment = "i-understand-risk";

/// Dates ("YYYY-MM-DD" with optional time) keep only "YYYY-MM"; anything
/// else keeps its first character and replaces the rest with 'X', one per
/// UTF-8 character. Blank cells stay blank.
std::string redact_cell(std::string_view cell);

/// Throws Error(kAcknowledgmentRequired) when unredacted output is requested
/// without the acknowledgment phrase.
void require_acknowledgment(bool redact, std::string_view acknowledgment);

}  // namespace riskcal
