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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace riskcal {

using Timestamp = std::chrono::sys_seconds;

std::string_view trim(std::string_view s) noexcept;
std::string to_lower_ascii(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// ISO-8601 UTC, e.g. "2023-01-15T00:00:00Z".
std::string format_timestamp(Timestamp t);
/// Accepts "YYYY-MM-DD" or "YYYY-MM-DDTHH:MM:SS[.fff][Z]". Throws
/// Error(kInvalidArgument) otherwise.
Timestamp parse_timestamp(std::string_view s);
std::string format_date(Timestamp t);
Timestamp now_seconds();

/// 64-bit FNV-1a; stable across platforms and runs.
std::uint64_t fnv1a64(std::string_view data) noexcept;
std::string hex64(std::uint64_t v);

std::string read_file(const std::filesystem::path& path);
/// Writes through a temporary sibling and renames, so readers never observe
/// a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace riskcal
