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

#pragma once

// JSON-over-HTTP surface for the review dashboard.
//
//   GET  /session                 status
//   GET  /graph?format=json|dot   observed dependency graph
//   GET  /docs/<path>?version=N   one context document version
//   GET  /lineage/<path>          provenance trace
//   GET  /events?since=N          event log tail
//   GET  /verify                  integrity report
//   GET  /search?q=...            context search
//   POST /invoke   {"stage"}
//   POST /review   {"decision", "feedback"}
//   POST /mark-changed {"artifact"}
//   POST /sync
//   POST /cancel

#include <memory>
#include <string>
#include <thread>

#include "specflow/error.hpp"

namespace specflow {

class Project;

/// HTTP status for an error code.
int http_status_for(ErrorCode code);

class ApiServer {
 public:
  /// `static_dir` (optional) is mounted at /ui.
  explicit ApiServer(Project& project, std::string static_dir = {});
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Binds and starts serving on a background thread. Port 0 picks a free
  /// port. Throws IoError when the bind fails.
  int start(const std::string& host, int port);
  /// Blocks until stop() is called from elsewhere.
  void wait();
  void stop();
  int port() const { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace specflow
