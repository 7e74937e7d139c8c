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
#include <memory>
#include <optional>
#include <string>

#include "riskcal/error.hpp"
#include "riskcal/workflow.hpp"

namespace riskcal {

/// 404 for unknown sessions, datasets, collections and steps; 409 for
/// StepOutOfOrder and Cancelled; 403 for AcknowledgmentRequired; 502 for
/// NetworkFailure; 500 for IoError; 400 otherwise.
int http_status(ErrorCode code) noexcept;

/// {"error": {"code": "...", "message": "..."}}
nlohmann::json error_body(ErrorCode code, std::string_view message);

/// The /v1 JSON API over a session store, optionally serving a static UI
/// bundle at "/".
class HttpService {
 public:
  explicit HttpService(SessionStore& store, std::optional<std::filesystem::path> ui_dir = std::nullopt);
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Binds; port 0 picks a free port. Returns the bound port. Throws
  /// Error(kIoError) when binding fails.
  int bind(const std::string& host, int port);
  /// Serves until stop(). Call after bind().
  void serve();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace riskcal
