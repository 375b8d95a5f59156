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

// The review loop. Every state change is an event appended to
// .specflow/session/events.jsonl; the in-memory state is the fold of that
// log, and a snapshot of it is rewritten after each operation.
//
// Per invocation the log reads
//
//   invoked, (agent_attempt, gate_run?)+, presented, decision[, advanced]
//
// with staleness_marked events in between invocations.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "specflow/agent_gateway.hpp"
#include "specflow/quality_gates.hpp"
#include "specflow/workflow_graph.hpp"

namespace specflow {

class Clock;

using ojson = nlohmann::ordered_json;

enum class StageState { Pending, Running, InReview, Approved, RevisionRequested, Stale, Skipped };

std::string_view to_string(StageState s);
std::optional<StageState> parse_stage_state(std::string_view text);

struct StageStatus {
  StageState state = StageState::Pending;
  int last_attempt = 0;
  std::optional<GateResult> last_gate;
  bool gates_applicable = false;

  friend bool operator==(const StageStatus&, const StageStatus&) = default;
};

struct ReviewBundle {
  std::string stage;
  int attempt = 0;
  ChangeSet change_set;
  std::string narration;
  std::optional<GateResult> gate_result;
  bool converged = true;
  std::vector<std::string> warnings;

  friend bool operator==(const ReviewBundle&, const ReviewBundle&) = default;
};

enum class EventKind { Invoked, AgentAttempt, GateRun, Presented, Decision, Advanced, StalenessMarked };

std::string_view to_string(EventKind k);
std::optional<EventKind> parse_event_kind(std::string_view text);

struct SessionEvent {
  int64_t seq = 0;
  EventKind kind = EventKind::Invoked;
  ojson payload;
  std::string at;
};

ojson to_json(const SessionEvent& e);
SessionEvent event_from_json(const ojson& j);

struct ReviewDecision {
  enum class Kind { Approve, Revise, Skip };
  Kind kind = Kind::Approve;
  std::string feedback;

  static ReviewDecision approve() { return {Kind::Approve, {}}; }
  static ReviewDecision revise(std::string text) { return {Kind::Revise, std::move(text)}; }
  static ReviewDecision skip() { return {Kind::Skip, {}}; }
};

std::string_view to_string(ReviewDecision::Kind k);

/// One decision per line: `approve`, `skip`, or `revise <feedback>`. Blank
/// lines and `#` comments are ignored. Throws ParseFailure.
std::vector<ReviewDecision> parse_decisions(std::string_view text);

struct SessionState {
  std::map<std::string, StageStatus> stage_status;
  std::optional<ReviewBundle> pending_review;
  std::map<std::string, std::string> pending_feedback;
  std::set<std::string> stale_nodes;
  int64_t last_seq = 0;

  friend bool operator==(const SessionState&, const SessionState&) = default;
};

/// Applies one event. Throws ParseFailure on malformed payloads and
/// Internal on out-of-sequence events.
void apply_event(SessionState& state, const SessionEvent& event);

/// Initial state for `graph` (every stage pending) with `events` applied.
SessionState fold_events(const DependencyGraph& graph, const std::vector<SessionEvent>& events);

ojson to_json(const SessionState& state);
SessionState session_state_from_json(const ojson& j);

struct SessionOptions {
  std::vector<CheckConfig> gates;
  int max_attempts = 3;
  size_t max_context_bytes = 0;
};

class Session final : private RepairObserver {
 public:
  Session(GatewayEnv env, Clock& clock, WorkflowSpec workflow, std::vector<CommandSpec> commands,
          DependencyGraph graph, SessionOptions options);

  /// Re-reads the event log from disk.
  void reload();

  /// Throws ReviewPending, UnknownStage, and whatever the backend, apply or
  /// gates raise (the stage returns to pending first).
  ReviewBundle invoke(std::string_view stage, AgentBackend& backend);

  /// Throws NoPendingReview, EmptyFeedback, GateBlocking.
  void submit_review(const ReviewDecision& decision);

  /// Throws UnknownNode. Returns the stages that produce something in the
  /// stale set and are stale afterwards.
  std::vector<std::string> mark_changed(std::string_view node);

  /// Registers new raw files and records on-disk doc edits as human
  /// versions, marking staleness for edited graph nodes. Returns the edited
  /// doc paths; ingest problems land in `warnings`.
  std::vector<std::string> sync(std::vector<std::string>* warnings = nullptr);

  /// Drives invoke/submit_review from a transcript: each attempt-1 entry
  /// starts an invocation, each invocation consumes one decision. Throws
  /// TranscriptMismatch, DecisionUnderflow, InvalidArgument (leftover
  /// decisions).
  void replay(ScriptedBackend& backend, const std::vector<ReviewDecision>& decisions);

  const SessionState& state() const { return state_; }
  const std::vector<SessionEvent>& events() const { return events_; }
  std::vector<SessionEvent> events_since(int64_t seq) const;
  const DependencyGraph& graph() const { return graph_; }
  const WorkflowSpec& workflow() const { return workflow_; }

  std::vector<std::string> stage_order() const { return order_; }
  std::optional<std::string> recommended_next() const;
  bool complete() const;
  std::vector<std::string> skipped_stages() const;

  Freshness stage_freshness(std::string_view stage) const;
  DependencyGraph observed_graph() const;

  /// Everything a client needs to render the session.
  ojson describe() const;

  /// Called after every appended event.
  void set_listener(std::function<void(const SessionEvent&)> listener) { listener_ = std::move(listener); }

 private:
  void emit(EventKind kind, ojson payload);
  void write_snapshot();
  void on_attempt(const AgentRequest& request, const AgentResponse& response, const ChangeSet& changes) override;
  void on_gate(const AgentRequest& request, const CheckReport& report, const GateResult& result) override;

  GatewayEnv env_;
  Clock& clock_;
  WorkflowSpec workflow_;
  std::vector<CommandSpec> commands_;
  DependencyGraph graph_;
  SessionOptions options_;
  std::vector<std::string> order_;

  SessionState state_;
  std::vector<SessionEvent> events_;
  std::function<void(const SessionEvent&)> listener_;

  int attempts_logged_ = 0;
  int gates_logged_ = 0;
};

}  // namespace specflow
