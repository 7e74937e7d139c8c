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

#include "riskcal/redaction.hpp"

#include <regex>

#include "riskcal/error.hpp"
#include "riskcal/util.hpp"

namespace riskcal {

namespace {

std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;
}

}  // namespace

std::string redact_cell(std::string_view cell) {
  const auto t = trim(cell);
  if (t.empty()) return {};
  static const std::regex date(R"((\d{4}-\d{2})-\d{2}([T ].*)?)");
  std::match_results<std::string_view::const_iterator> m;
  if (std::regex_match(t.begin(), t.end(), m, date)) return m[1].str();

  std::size_t i = std::min(utf8_length(static_cast<unsigned char>(t[0])), t.size());
  std::string out(t.substr(0, i));
  while (i < t.size()) {
    i += utf8_length(static_cast<unsigned char>(t[i]));
    out += 'X';
  }
  return out;
}

void require_acknowledgment(bool redact, std::string_view acknowledgment) {
  if (!redact && acknowledgment != kRiskAcknowledgment) {
    throw Error(ErrorCode::kAcknowledgmentRequired,
                "unredacted output requires the acknowledgment " + std::string(kRiskAcknowledgment));
  }
}

}  // namespace riskcal
