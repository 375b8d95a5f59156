// Copyright 2026 The Specflow Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "specflow/api_server.hpp"

#include <charconv>
#include <mutex>

#include "httplib.h"
#include "specflow/codec.hpp"
#include "specflow/project.hpp"

namespace specflow {

namespace {

void send_json(httplib::Response& res, const ojson& body, int status = 200) {
  res.status = status;
  res.set_content(dump_json(body), "application/json");
}

void send_error(httplib::Response& res, ErrorCode code, const std::string& message) {
  ojson body;
  body["schema_version"] = kSchemaVersion;
  body["error"] = error_json(code, message);
  send_json(res, body, http_status_for(code));
}

template <typename F>
httplib::Server::Handler guarded(F fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send_error(res, e.code(), e.what());
    } catch (const std::exception& e) {
      send_error(res, ErrorCode::Internal, e.what());
    }
  };
}

ojson parse_body(const httplib::Request& req) {
  if (req.body.empty()) return ojson::object();
  auto j = ojson::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) fail(ErrorCode::ParseFailure, "request body must be a JSON object");
  return j;
}

std::string string_field(const ojson& body, const char* key) {
  if (!body.contains(key) || !body[key].is_string()) {
    fail(ErrorCode::InvalidArgument, std::string("missing string field '") + key + "'");
  }
  return body[key].get<std::string>();
}

int64_t int_param(const httplib::Request& req, const char* key, int64_t fallback) {
  if (!req.has_param(key)) return fallback;
  auto text = req.get_param_value(key);
  int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    fail(ErrorCode::InvalidArgument, std::string("query parameter '") + key + "' must be an integer");
  }
  return value;
}

}  // namespace

int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Ok:
      return 200;
    case ErrorCode::NotFound:
    case ErrorCode::UnknownStage:
    case ErrorCode::UnknownNode:
    case ErrorCode::NotRegistered:
    case ErrorCode::NoSuchVersion:
      return 404;
    case ErrorCode::ReviewPending:
    case ErrorCode::NoPendingReview:
    case ErrorCode::GateBlocking:
      return 409;
    case ErrorCode::InvalidArgument:
    case ErrorCode::EmptyFeedback:
    case ErrorCode::EmptyQuery:
    case ErrorCode::InvalidRef:
    case ErrorCode::PathOutsideDocs:
    case ErrorCode::PathOutsideProject:
    case ErrorCode::ParseFailure:
    case ErrorCode::RawTierViolation:
      return 422;
    case ErrorCode::BackendError:
    case ErrorCode::TranscriptMismatch:
    case ErrorCode::InvalidResponse:
    case ErrorCode::ProvenanceError:
      return 502;
    default:
      return 500;
  }
}

struct ApiServer::Impl {
  Project& project;
  std::string static_dir;
  httplib::Server svr;
  std::mutex join_mu;

  Impl(Project& p, std::string dir) : project(p), static_dir(std::move(dir)) {}

  void routes() {
    svr.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                             {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                             {"Access-Control-Allow-Headers", "Content-Type"}});
    svr.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    svr.Get("/session", guarded([this](const auto&, auto& res) { send_json(res, project.status()); }));
    svr.Get("/graph", guarded([this](const httplib::Request& req, httplib::Response& res) {
              auto format = req.has_param("format") ? req.get_param_value("format") : "json";
              if (format == "dot") {
                res.set_content(project.graph(GraphFormat::Dot), "text/vnd.graphviz");
              } else if (format == "json") {
                ojson body;
                body["schema_version"] = kSchemaVersion;
                auto graph = ojson::parse(project.graph(GraphFormat::Json));
                for (auto& [k, v] : graph.items()) body[k] = v;
                send_json(res, body);
              } else {
                fail(ErrorCode::InvalidArgument, "format must be json or dot");
              }
            }));
    svr.Get(R"(/docs/(.+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
              std::optional<int> version;
              if (req.has_param("version")) version = static_cast<int>(int_param(req, "version", 0));
              send_json(res, project.doc("docs/" + req.matches[1].str(), version));
            }));
    svr.Get(R"(/lineage/(.+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
              send_json(res, project.lineage(req.matches[1].str()));
            }));
    svr.Get("/events", guarded([this](const httplib::Request& req, httplib::Response& res) {
              send_json(res, project.events(int_param(req, "since", 0)));
            }));
    svr.Get("/verify", guarded([this](const auto&, auto& res) { send_json(res, project.verify()); }));
    svr.Get("/search", guarded([this](const httplib::Request& req, httplib::Response& res) {
              send_json(res, project.search(req.has_param("q") ? req.get_param_value("q") : ""));
            }));

    svr.Post("/invoke", guarded([this](const httplib::Request& req, httplib::Response& res) {
               send_json(res, project.run(string_field(parse_body(req), "stage")));
             }));
    svr.Post("/review", guarded([this](const httplib::Request& req, httplib::Response& res) {
               auto body = parse_body(req);
               auto decision = string_field(body, "decision");
               ReviewDecision d;
               if (decision == "approve") {
                 d = ReviewDecision::approve();
               } else if (decision == "skip") {
                 d = ReviewDecision::skip();
               } else if (decision == "revise") {
                 d = ReviewDecision::revise(body.value("feedback", ""));
               } else {
                 fail(ErrorCode::InvalidArgument, "decision must be approve, revise or skip");
               }
               send_json(res, project.review(d));
             }));
    svr.Post("/mark-changed", guarded([this](const httplib::Request& req, httplib::Response& res) {
               send_json(res, project.mark_changed(string_field(parse_body(req), "artifact")));
             }));
    svr.Post("/sync", guarded([this](const auto&, auto& res) { send_json(res, project.sync()); }));
    svr.Post("/cancel", guarded([this](const auto&, auto& res) {
               project.cancel();
               send_json(res, {{"schema_version", kSchemaVersion}, {"cancelled", true}});
             }));

    if (!static_dir.empty() && !svr.set_mount_point("/ui", static_dir)) {
      fail(ErrorCode::NotFound, "static directory not found: " + static_dir);
    }
  }
};

ApiServer::ApiServer(Project& project, std::string static_dir)
    : impl_(std::make_unique<Impl>(project, std::move(static_dir))) {
  impl_->routes();
}

ApiServer::~ApiServer() { stop(); }

int ApiServer::start(const std::string& host, int port) {
  if (thread_.joinable()) fail(ErrorCode::Internal, "server already started");
  if (port == 0) {
    port_ = impl_->svr.bind_to_any_port(host);
  } else {
    port_ = impl_->svr.bind_to_port(host, port) ? port : -1;
  }
  if (port_ <= 0) fail(ErrorCode::IoError, "cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { impl_->svr.listen_after_bind(); });
  impl_->svr.wait_until_ready();
  return port_;
}

void ApiServer::wait() {
  std::lock_guard lock(impl_->join_mu);
  if (thread_.joinable()) thread_.join();
}

void ApiServer::stop() {
  impl_->svr.stop();
  std::lock_guard lock(impl_->join_mu);
  if (thread_.joinable()) thread_.join();
}

}  // namespace specflow
