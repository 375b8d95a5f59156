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

// The boundary to whatever produces a stage's work: request assembly,
// backends, transactional application of responses, and the bounded repair
// loop that feeds gate diagnostics back to the backend.

#include <atomic>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "specflow/command_spec.hpp"
#include "specflow/data_store.hpp"
#include "specflow/quality_gates.hpp"
#include "specflow/workflow_graph.hpp"

namespace httplib {
class Client;
}

namespace specflow {

class Workspace;
class ContextStore;

using ojson = nlohmann::ordered_json;

struct ContextDocEntry {
  std::string path;
  int version = 0;
  std::string content;
};

struct AgentRequest {
  std::string stage;
  CommandSpec command;
  std::vector<ContextDocEntry> context_docs;  // by path
  std::vector<ArtifactRecord> data_refs;      // by path
  std::optional<std::string> feedback;
  int attempt = 1;
  std::vector<std::string> skipped_stages;
};

struct FileWrite {
  std::string path;
  std::string content;
  friend bool operator==(const FileWrite&, const FileWrite&) = default;
};

struct DataNote {
  std::string path;
  std::vector<std::string> sources;
  std::optional<std::string> transformation_ref;
  friend bool operator==(const DataNote&, const DataNote&) = default;
};

struct AgentResponse {
  std::vector<FileWrite> file_writes;
  std::vector<FileWrite> doc_writes;
  std::vector<DataNote> data_notes;
  std::string narration;
  friend bool operator==(const AgentResponse&, const AgentResponse&) = default;
};

ojson to_json(const AgentRequest& request);
ojson to_json(const AgentResponse& response);
/// Throws InvalidResponse.
AgentResponse response_from_json(const ojson& j);

class AgentBackend {
 public:
  virtual ~AgentBackend() = default;
  /// Throws BackendError or TranscriptMismatch.
  virtual AgentResponse execute(const AgentRequest& request) = 0;
  /// Aborts an in-flight execute from another thread, if supported.
  virtual void cancel() {}
};

struct TranscriptEntry {
  std::string command;
  int attempt = 1;
  AgentResponse response;
};

/// Line-delimited `{command, attempt, response}` records. Throws
/// ParseFailure; attempts for a command must run 1, 2, ... contiguously.
std::vector<TranscriptEntry> parse_transcript(std::string_view text);

class ScriptedBackend final : public AgentBackend {
 public:
  explicit ScriptedBackend(std::vector<TranscriptEntry> entries, size_t cursor = 0);

  AgentResponse execute(const AgentRequest& request) override;

  size_t cursor() const { return cursor_; }
  bool exhausted() const { return cursor_ >= entries_.size(); }
  const std::vector<TranscriptEntry>& entries() const { return entries_; }
  /// Serialized requests seen so far, in order.
  const std::vector<std::string>& requests() const { return requests_; }

 private:
  std::vector<TranscriptEntry> entries_;
  size_t cursor_ = 0;
  std::vector<std::string> requests_;
};

struct RemoteSettings {
  std::string endpoint;  // full URL of a chat-completions endpoint
  std::string model;
  std::string token;
  int timeout_seconds = 120;
};

/// The first fenced block (``` or ```json) whose body parses as a JSON
/// object.
std::optional<ojson> extract_fenced_json(std::string_view text);

class RemoteLLMBackend final : public AgentBackend {
 public:
  explicit RemoteLLMBackend(RemoteSettings settings);
  ~RemoteLLMBackend() override;

  AgentResponse execute(const AgentRequest& request) override;
  void cancel() override;

  /// The user message sent for `request`.
  static std::string render_prompt(const AgentRequest& request);

 private:
  RemoteSettings settings_;
  std::mutex mu_;
  httplib::Client* active_ = nullptr;
  std::atomic<bool> cancelled_{false};
};

struct GatewayEnv {
  Workspace& ws;
  ContextStore& context;
  DataStore& data;
};

struct RequestOptions {
  std::optional<std::string> feedback;
  int attempt = 1;
  std::vector<std::string> skipped_stages;
  size_t max_context_bytes = 0;  // 0 = unlimited
};

/// Context docs: heads matched by the command's and stage's input refs,
/// plus docs that link to the context target or to any input ref. Data
/// refs: registered artifacts matched by input refs.
AgentRequest assemble_request(const CommandSpec& command, const StageDecl* stage, const GatewayEnv& env,
                              const RequestOptions& options);

enum class ChangeKind { FileWrite, DocWrite, DataNote };
std::string_view to_string(ChangeKind kind);

struct Change {
  ChangeKind kind = ChangeKind::FileWrite;
  std::string path;
  int version = 0;  // doc version for DocWrite
  friend bool operator==(const Change&, const Change&) = default;
};

using ChangeSet = std::vector<Change>;

/// All or nothing. Throws RawTierViolation, PathOutsideProject,
/// PathOutsideDocs, InvalidResponse, ProvenanceError.
ChangeSet apply_response(const AgentResponse& response, std::string_view stage, GatewayEnv& env);

/// Hooks for recording each attempt.
class RepairObserver {
 public:
  virtual ~RepairObserver() = default;
  virtual void on_attempt(const AgentRequest& request, const AgentResponse& response, const ChangeSet& changes) = 0;
  virtual void on_gate(const AgentRequest& request, const CheckReport& report, const GateResult& result) = 0;
};

struct RepairInput {
  const CommandSpec* command = nullptr;
  const StageDecl* stage = nullptr;
  std::optional<std::string> feedback;
  std::vector<std::string> skipped_stages;
  size_t max_context_bytes = 0;
};

struct RepairOutcome {
  bool converged = false;
  int attempts = 0;
  bool gates_applicable = false;
  std::optional<GateResult> final_gate;
  std::vector<Diagnostic> final_diagnostics;
  ChangeSet changes;  // union over attempts, first occurrence order
  std::string narration;
};

/// Directories the gates run over: top-level dirs of the stage's produced
/// code refs.
std::vector<std::string> gate_targets(const StageDecl* stage);

/// Feedback text for the attempt after one that left `blocking`.
std::string diagnostics_feedback(const std::optional<std::string>& human, const std::vector<Diagnostic>& blocking);

RepairOutcome repair_loop(const RepairInput& input, AgentBackend& backend, const std::vector<CheckConfig>& gates,
                          int max_attempts, GatewayEnv& env, RepairObserver* observer = nullptr);

}  // namespace specflow
