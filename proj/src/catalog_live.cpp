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

#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "riskcal/catalog.hpp"
#include "riskcal/error.hpp"

namespace riskcal {

using nlohmann::json;

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // starts with '/'
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorCode::kInvalidArgument, "not a URL: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string url_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 15];
    }
  }
  return out;
}

json parse_json(const std::string& body, const std::string& what) {
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedCatalog, what + ": " + e.what());
  }
}

}  // namespace

HttpGet default_http_get(std::chrono::seconds timeout) {
  return [timeout](const std::string& url) {
    const auto parts = split_url(url);
    httplib::Client client(parts.origin);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_follow_location(true);
    auto res = client.Get(parts.path);
    if (!res) {
      throw Error(ErrorCode::kNetworkFailure, "GET " + url + " failed: " + httplib::to_string(res.error()));
    }
    return HttpResponse{res->status, res->body};
  };
}

LiveCatalogSource::LiveCatalogSource(std::string discovery_base, QuasiIdentifierDictionary dict,
                                     LiveSourceOptions options)
    : base_(std::move(discovery_base)), dict_(std::move(dict)), options_(std::move(options)) {
  while (!base_.empty() && base_.back() == '/') base_.pop_back();
  if (!options_.http) options_.http = default_http_get();
  if (options_.page_size == 0) options_.page_size = 1000;
  if (options_.attempts < 1) options_.attempts = 1;
}

std::string LiveCatalogSource::get_with_retry(const std::string& url) const {
  auto backoff = options_.initial_backoff;
  std::string last_error;
  for (int attempt = 1; attempt <= options_.attempts; ++attempt) {
    try {
      auto res = options_.http(url);
      if (res.status >= 200 && res.status < 300) return std::move(res.body);
      last_error = "HTTP " + std::to_string(res.status);
      // Only throttling and server-side failures are worth retrying.
      if (res.status != 429 && res.status < 500) break;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNetworkFailure) throw;
      last_error = e.what();
    }
    if (attempt < options_.attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw Error(ErrorCode::kNetworkFailure, "GET " + url + ": " + last_error);
}

std::vector<PortalDescriptor> LiveCatalogSource::discover_portals() {
  std::vector<PortalDescriptor> out;
  for (std::size_t offset = 0;; offset += options_.page_size) {
    const auto url = base_ + "/domains?limit=" + std::to_string(options_.page_size) +
                     "&offset=" + std::to_string(offset);
    const auto doc = parse_json(get_with_retry(url), url);
    try {
      const auto& results = doc.at("results");
      for (const auto& r : results) {
        PortalDescriptor p;
        p.domain = r.at("domain").get<std::string>();
        p.display_name = r.value("display_name", p.domain);
        p.resource_count = r.value("count", std::uint64_t{0});
        out.push_back(std::move(p));
      }
      const auto total = doc.value("resultSetSize", out.size());
      if (results.size() < options_.page_size || out.size() >= total) break;
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kMalformedCatalog, url + ": " + e.what());
    }
  }
  return out;
}

std::vector<DatasetMetadata> LiveCatalogSource::harvest_metadata(const PortalDescriptor& portal) {
  std::vector<DatasetMetadata> out;
  const auto fetched_at = now_seconds();
  const auto domain = url_encode(portal.domain);
  for (std::size_t offset = 0;; offset += options_.page_size) {
    const auto url = base_ + "?domains=" + domain + "&search_context=" + domain +
                     "&limit=" + std::to_string(options_.page_size) + "&offset=" + std::to_string(offset);
    const auto doc = parse_json(get_with_retry(url), url);
    if (!doc.contains("results")) throw Error(ErrorCode::kMalformedCatalog, url + ": no results field");
    auto page = parse_catalog_results(doc["results"], portal.domain, dict_, fetched_at);
    const auto page_size = page.size();
    std::move(page.begin(), page.end(), std::back_inserter(out));
    const std::size_t total = doc.value("resultSetSize", out.size());
    if (page_size < options_.page_size || out.size() >= total) break;
  }
  return out;
}

RecordTable LiveCatalogSource::fetch_records(const DatasetMetadata& meta, const FetchOptions& options,
                                             FetchStats* stats) {
  if (meta.resource_kind != ResourceKind::kDataset) {
    throw Error(ErrorCode::kNotTabular, meta.ref() + " is a " + std::string(to_string(meta.resource_kind)));
  }
  std::string origin = options_.rows_origin;
  if (auto pos = origin.find("{domain}"); pos != std::string::npos) origin.replace(pos, 8, meta.portal);
  std::string url = origin + "/resource/" + url_encode(meta.dataset_id) + ".csv";
  if (options.limit) url += "?$limit=" + std::to_string(*options.limit);
  return table_from_csv(meta, get_with_retry(url), options, stats);
}

}  // namespace riskcal
