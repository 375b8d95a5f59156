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

// A project on disk and the operations the CLI, the HTTP API and the C API
// expose. Every operation rebuilds its view from disk under a lock on the
// project directory: exclusive for mutations, shared for reads. That keeps
// separate processes (a CLI next to a running server) from losing updates.

#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "specflow/agent_gateway.hpp"
#include "specflow/quality_gates.hpp"
#include "specflow/session_runtime.hpp"
#include "specflow/workflow_graph.hpp"

namespace specflow {

class Clock;

using ojson = nlohmann::ordered_json;

inline constexpr std::string_view kConfigFile = "specflow.json";
inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kTokenEnv = "SPECFLOW_API_TOKEN";

enum class BackendKind { Remote, Scripted };

struct ProjectConfig {
  std::string workflow_doc = "WORKFLOW.md";
  std::string commands_dir = "commands";
  std::vector<CheckConfig> gates;
  BackendKind backend = BackendKind::Remote;
  std::string transcript;  // scripted backend, relative to the root
  RemoteSettings remote;
  int max_attempts = 3;
  size_t max_context_bytes = 0;

  static ProjectConfig defaults();
  /// Throws InvalidConfig.
  static ProjectConfig from_json(const ojson& j);
  ojson to_json() const;
};

/// Creates the canonical layout. Throws NonEmptyTarget. Returns created
/// paths relative to `root`, directories with a trailing slash.
std::vector<std::string> scaffold(const std::filesystem::path& root);

/// Command file contents written by scaffold, by name.
std::vector<std::pair<std::string, std::string>> canonical_command_files();
std::string canonical_workflow_doc();

class Project {
 public:
  /// Throws NotAProject, InvalidConfig and workflow compile errors.
  static std::unique_ptr<Project> open(const std::filesystem::path& root, std::shared_ptr<Clock> clock = nullptr);
  ~Project();

  const std::filesystem::path& root() const { return root_; }
  ProjectConfig config() const;

  /// Replaces the configured backend; the factory runs once per invoke.
  void set_backend_factory(std::function<std::unique_ptr<AgentBackend>(const ProjectConfig&)> factory);

  ojson run(std::string_view stage);
  ojson review(const ReviewDecision& decision);
  ojson status();
  std::string graph(GraphFormat format);
  ojson lineage(std::string_view path);
  ojson verify();
  ojson search(std::string_view query);
  ojson doc(std::string_view path, std::optional<int> version);
  ojson events(int64_t since);
  ojson mark_changed(std::string_view node);
  ojson sync();
  ojson ingest(std::optional<std::string> path);
  ojson gate();
  ojson replay(std::string_view transcript_text, std::string_view decisions_text);

  /// Aborts an in-flight backend call, if any.
  void cancel();

 private:
  struct View;
  enum class Access { Shared, Exclusive };

  Project(std::filesystem::path root, std::shared_ptr<Clock> clock);

  static std::unique_ptr<View> load_view(const std::filesystem::path& root, Clock& clock);

  template <typename F>
  auto with_view(Access access, F&& fn);

  std::unique_ptr<AgentBackend> make_backend(const ProjectConfig& config, View& view);
  void publish(const View& view);

  std::filesystem::path root_;
  std::shared_ptr<Clock> clock_;
  std::mutex op_mu_;
  std::function<std::unique_ptr<AgentBackend>(const ProjectConfig&)> backend_factory_;

  std::mutex inflight_mu_;
  AgentBackend* inflight_ = nullptr;

  // Last state seen by a finished or running operation; served to readers
  // while a long operation holds op_mu_.
  mutable std::mutex pub_mu_;
  ojson published_status_;
  std::vector<SessionEvent> published_events_;
  bool has_published_ = false;
};

}  // namespace specflow
