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

#include "riskcal/http_api.hpp"

#include <httplib.h>

#include "riskcal/redaction.hpp"
#include "riskcal/risk_metrics.hpp"

namespace riskcal {

using nlohmann::json;

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kUnknownSession:
    case ErrorCode::kUnknownDataset:
    case ErrorCode::kUnknownCollection:
    case ErrorCode::kUnknownStep: return 404;
    case ErrorCode::kStepOutOfOrder:
    case ErrorCode::kCancelled: return 409;
    case ErrorCode::kAcknowledgmentRequired: return 403;
    case ErrorCode::kNetworkFailure: return 502;
    case ErrorCode::kIoError: return 500;
    default: return 400;
  }
}

json error_body(ErrorCode code, std::string_view message) {
  return {{"error", {{"code", to_string(code)}, {"message", message}}}};
}

namespace {

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json body_of(const httplib::Request& req) {
  if (trim(req.body).empty()) return json::object();
  try {
    auto j = json::parse(req.body);
    if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "request body must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("malformed JSON body: ") + e.what());
  }
}

bool flag(const httplib::Request& req, const char* name, bool fallback) {
  if (!req.has_param(name)) return fallback;
  const auto v = req.get_param_value(name);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw Error(ErrorCode::kInvalidArgument, std::string(name) + " must be true or false");
}

std::size_t count_param(const httplib::Request& req, const char* name, std::size_t fallback) {
  if (!req.has_param(name)) return fallback;
  try {
    const auto v = std::stoll(req.get_param_value(name));
    if (v < 0) throw std::out_of_range(name);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw Error(ErrorCode::kInvalidArgument, std::string(name) + " must be a non-negative integer");
  }
}

template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      send(res, http_status(e.code()), error_body(e.code(), e.what()));
    } catch (const json::exception& e) {
      send(res, 400, error_body(ErrorCode::kInvalidArgument, e.what()));
    } catch (const std::exception& e) {
      send(res, 500, error_body(ErrorCode::kIoError, e.what()));
    }
  };
}

std::vector<std::string> qis_of(const json& body) {
  if (body.contains("profile")) return {"profile:" + body["profile"].get<std::string>()};
  if (!body.contains("qis")) throw Error(ErrorCode::kEmptySelection, "body needs qis or profile");
  return body["qis"].get<std::vector<std::string>>();
}

json collection_json(const CollectionContext& ctx) {
  json datasets = json::array();
  for (const auto& [ref, e] : ctx.manifest().entries()) {
    json attrs = json::array();
    for (const auto& a : e.metadata.attributes) attrs.push_back(to_json(a));
    datasets.push_back({{"ref", ref},
                        {"title", e.metadata.title},
                        {"attributes", attrs},
                        {"qi_hits", e.qi_hits},
                        {"label", to_json(e.label)}});
  }
  std::vector<std::string> curated;
  for (const auto& m : ctx.collection()) curated.push_back(m.ref());
  return {{"collection", ctx.ref()},
          {"funnel", funnel_report(ctx.manifest()).to_json()},
          {"curated", curated},
          {"datasets", datasets}};
}

}  // namespace

struct HttpService::Impl {
  SessionStore& store;
  httplib::Server server;

  explicit Impl(SessionStore& s) : store(s) {}
};

HttpService::HttpService(SessionStore& store, std::optional<std::filesystem::path> ui_dir)
    : impl_(std::make_unique<Impl>(store)) {
  auto& srv = impl_->server;
  auto& st = impl_->store;

  srv.Post("/v1/sessions", guarded([&st](const httplib::Request& req, httplib::Response& res) {
             const auto body = body_of(req);
             const auto id = st.create(body.value("collection", ""));
             send(res, 201, {{"session_id", id}});
           }));
  srv.Post(R"(/v1/sessions/([0-9A-Za-z]+)/qis)", guarded([&st](const httplib::Request& req, httplib::Response& res) {
             send(res, 200, st.set_qis(req.matches[1], qis_of(body_of(req))));
           }));
  srv.Post(R"(/v1/sessions/([0-9A-Za-z]+)/steps/([a-z_]+))",
           guarded([&st](const httplib::Request& req, httplib::Response& res) {
             const auto step = parse_step(req.matches[2].str());
             send(res, 200, st.run(req.matches[1], step, body_of(req)));
           }));
  srv.Post(R"(/v1/sessions/([0-9A-Za-z]+)/cancel)", guarded([&st](const httplib::Request& req, httplib::Response& res) {
             st.cancel(req.matches[1]);
             send(res, 202, {{"session_id", req.matches[1].str()}, {"cancel_requested", true}});
           }));
  srv.Get(R"(/v1/sessions/([0-9A-Za-z]+))", guarded([&st](const httplib::Request& req, httplib::Response& res) {
            send(res, 200, st.describe(req.matches[1]));
          }));
  srv.Get(R"(/v1/sessions/([0-9A-Za-z]+)/report)", guarded([&st](const httplib::Request& req, httplib::Response& res) {
            const bool redact = flag(req, "redact", true);
            send(res, 200, st.report(req.matches[1], redact, req.get_param_value("acknowledge")));
          }));
  srv.Get("/v1/collection", guarded([&st](const httplib::Request& req, httplib::Response& res) {
            send(res, 200, collection_json(*st.collection(req.get_param_value("manifest"))));
          }));
  srv.Get(R"(/v1/datasets/(.+)/risk)", guarded([&st](const httplib::Request& req, httplib::Response& res) {
            const bool redact = flag(req, "redact", true);
            require_acknowledgment(redact, req.get_param_value("acknowledge"));
            auto keys = req.has_param("keys") ? split(req.get_param_value("keys"), ',') : std::vector<std::string>{"auto"};
            const auto ctx = st.collection(req.get_param_value("manifest"));
            send(res, 200,
                 scan_dataset(*ctx, req.matches[1], keys, count_param(req, "threshold", kDefaultEntryPointThreshold),
                              flag(req, "subsets", false), redact));
          }));
  if (ui_dir) {
    if (!srv.set_mount_point("/", ui_dir->string())) {
      throw Error(ErrorCode::kIoError, "cannot serve UI from " + ui_dir->string());
    }
  }
  srv.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    if (res.status == 404) {
      send(res, 404, error_body(ErrorCode::kUnknownStep, "no route for " + req.method + " " + req.path));
    }
  });
}

HttpService::~HttpService() { stop(); }

int HttpService::bind(const std::string& host, int port) {
  auto& srv = impl_->server;
  const int bound = port == 0 ? srv.bind_to_any_port(host) : (srv.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error(ErrorCode::kIoError, "cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void HttpService::serve() { impl_->server.listen_after_bind(); }

void HttpService::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace riskcal
