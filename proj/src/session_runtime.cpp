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

#include "specflow/session_runtime.hpp"

#include <algorithm>

#include "specflow/codec.hpp"
#include "specflow/context_store.hpp"
#include "specflow/data_store.hpp"
#include "specflow/error.hpp"
#include "specflow/text.hpp"
#include "specflow/workspace.hpp"

namespace specflow {

namespace {

const std::string kEvents = std::string(kStateDir) + "/session/events.jsonl";
const std::string kSnapshot = std::string(kStateDir) + "/session/snapshot.json";

constexpr std::pair<StageState, std::string_view> kStateNames[] = {
    {StageState::Pending, "pending"},
    {StageState::Running, "running"},
    {StageState::InReview, "in_review"},
    {StageState::Approved, "approved"},
    {StageState::RevisionRequested, "revision_requested"},
    {StageState::Stale, "stale"},
    {StageState::Skipped, "skipped"},
};

constexpr std::pair<EventKind, std::string_view> kEventNames[] = {
    {EventKind::Invoked, "invoked"},
    {EventKind::AgentAttempt, "agent_attempt"},
    {EventKind::GateRun, "gate_run"},
    {EventKind::Presented, "presented"},
    {EventKind::Decision, "decision"},
    {EventKind::Advanced, "advanced"},
    {EventKind::StalenessMarked, "staleness_marked"},
};

ojson bundle_json(const ReviewBundle& b) {
  ojson j;
  j["stage"] = b.stage;
  j["attempt"] = b.attempt;
  j["narration"] = b.narration;
  j["converged"] = b.converged;
  j["changes"] = to_json(b.change_set);
  j["gate_result"] = b.gate_result ? to_json(*b.gate_result) : ojson(nullptr);
  j["warnings"] = b.warnings;
  return j;
}

ReviewBundle bundle_from_json(const ojson& j) {
  ReviewBundle b;
  b.stage = j.at("stage").get<std::string>();
  b.attempt = j.at("attempt").get<int>();
  b.narration = j.value("narration", "");
  b.converged = j.value("converged", true);
  b.change_set = change_set_from_json(j.value("changes", ojson::array()));
  if (j.contains("gate_result") && !j["gate_result"].is_null()) b.gate_result = gate_result_from_json(j["gate_result"]);
  b.warnings = j.value("warnings", std::vector<std::string>{});
  return b;
}

ojson status_json(const StageStatus& s) {
  ojson j;
  j["state"] = to_string(s.state);
  j["last_attempt"] = s.last_attempt;
  j["last_gate"] = s.last_gate ? to_json(*s.last_gate) : ojson(nullptr);
  j["gates_applicable"] = s.gates_applicable;
  return j;
}

}  // namespace

std::string_view to_string(StageState s) {
  for (const auto& [v, n] : kStateNames) {
    if (v == s) return n;
  }
  return "pending";
}

std::optional<StageState> parse_stage_state(std::string_view text) {
  for (const auto& [v, n] : kStateNames) {
    if (n == text) return v;
  }
  return std::nullopt;
}

std::string_view to_string(EventKind k) {
  for (const auto& [v, n] : kEventNames) {
    if (v == k) return n;
  }
  return "invoked";
}

std::optional<EventKind> parse_event_kind(std::string_view text) {
  for (const auto& [v, n] : kEventNames) {
    if (n == text) return v;
  }
  return std::nullopt;
}

std::string_view to_string(ReviewDecision::Kind k) {
  switch (k) {
    case ReviewDecision::Kind::Approve:
      return "approve";
    case ReviewDecision::Kind::Revise:
      return "revise";
    case ReviewDecision::Kind::Skip:
      return "skip";
  }
  return "approve";
}

ojson to_json(const SessionEvent& e) {
  ojson j;
  j["seq"] = e.seq;
  j["kind"] = to_string(e.kind);
  j["at"] = e.at;
  j["payload"] = e.payload;
  return j;
}

SessionEvent event_from_json(const ojson& j) {
  SessionEvent e;
  try {
    e.seq = j.at("seq").get<int64_t>();
    auto kind = parse_event_kind(j.at("kind").get<std::string>());
    if (!kind) fail(ErrorCode::ParseFailure, "unknown event kind");
    e.kind = *kind;
    e.at = j.value("at", "");
    e.payload = j.value("payload", ojson::object());
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorCode::ParseFailure, std::string("malformed event: ") + ex.what());
  }
  return e;
}

std::vector<ReviewDecision> parse_decisions(std::string_view text) {
  std::vector<ReviewDecision> out;
  for (const auto& ln : text::split_lines(text)) {
    auto line = text::trim(ln.text);
    if (line.empty() || line.front() == '#') continue;
    auto sp = line.find_first_of(" \t");
    auto word = line.substr(0, sp);
    auto rest = sp == std::string_view::npos ? std::string_view{} : text::trim(line.substr(sp));
    if (word == "approve" && rest.empty()) {
      out.push_back(ReviewDecision::approve());
    } else if (word == "skip" && rest.empty()) {
      out.push_back(ReviewDecision::skip());
    } else if (word == "revise" && !rest.empty()) {
      out.push_back(ReviewDecision::revise(std::string(rest)));
    } else {
      fail(ErrorCode::ParseFailure, "decisions line " + std::to_string(ln.number) + ": expected approve, skip or revise <feedback>");
    }
  }
  return out;
}

void apply_event(SessionState& state, const SessionEvent& event) {
  if (event.seq != state.last_seq + 1) {
    fail(ErrorCode::Internal, "event seq " + std::to_string(event.seq) + " does not follow " + std::to_string(state.last_seq));
  }
  const auto& p = event.payload;
  try {
    if (event.kind == EventKind::StalenessMarked) {
      for (const auto& n : p.at("stale_nodes")) state.stale_nodes.insert(n.get<std::string>());
      for (const auto& s : p.at("stages")) {
        auto it = state.stage_status.find(s.get<std::string>());
        if (it != state.stage_status.end()) it->second.state = StageState::Stale;
      }
      state.last_seq = event.seq;
      return;
    }
    auto stage = p.at("stage").get<std::string>();
    auto it = state.stage_status.find(stage);
    if (it == state.stage_status.end()) {
      // The workflow lost this stage since the event was written.
      state.last_seq = event.seq;
      return;
    }
    auto& st = it->second;
    bool aborted = p.value("aborted", false);
    switch (event.kind) {
      case EventKind::Invoked:
        st.state = StageState::Running;
        st.last_gate.reset();
        st.gates_applicable = false;
        state.pending_feedback.clear();
        break;
      case EventKind::AgentAttempt:
        st.last_attempt = p.at("attempt").get<int>();
        if (aborted) st.state = StageState::Pending;
        break;
      case EventKind::GateRun:
        st.gates_applicable = true;
        if (aborted) {
          st.state = StageState::Pending;
        } else {
          st.last_gate = gate_result_from_json(p.at("result"));
        }
        break;
      case EventKind::Presented:
        st.state = StageState::InReview;
        st.gates_applicable = p.at("gates_applicable").get<bool>();
        state.pending_review = bundle_from_json(p.at("bundle"));
        break;
      case EventKind::Decision: {
        auto d = p.at("decision").get<std::string>();
        if (d == "approve") {
          st.state = StageState::Approved;
          for (const auto& n : p.value("cleared_stale", ojson::array())) state.stale_nodes.erase(n.get<std::string>());
        } else if (d == "revise") {
          st.state = StageState::RevisionRequested;
          state.pending_feedback[stage] = p.at("feedback").get<std::string>();
        } else if (d == "skip") {
          st.state = StageState::Skipped;
        } else {
          fail(ErrorCode::ParseFailure, "unknown decision: " + d);
        }
        state.pending_review.reset();
        break;
      }
      case EventKind::Advanced:
      case EventKind::StalenessMarked:
        break;
    }
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorCode::ParseFailure, "event " + std::to_string(event.seq) + ": " + ex.what());
  }
  state.last_seq = event.seq;
}

SessionState fold_events(const DependencyGraph& graph, const std::vector<SessionEvent>& events) {
  SessionState state;
  for (const auto& s : graph.stages()) state.stage_status[s.name] = StageStatus{};
  for (const auto& e : events) apply_event(state, e);
  return state;
}

ojson to_json(const SessionState& state) {
  ojson j;
  j["last_seq"] = state.last_seq;
  j["stages"] = ojson::object();
  for (const auto& [name, st] : state.stage_status) j["stages"][name] = status_json(st);
  j["pending_review"] = state.pending_review ? bundle_json(*state.pending_review) : ojson(nullptr);
  j["pending_feedback"] = state.pending_feedback;
  j["stale_nodes"] = ojson::array();
  for (const auto& n : state.stale_nodes) j["stale_nodes"].push_back(n);
  return j;
}

SessionState session_state_from_json(const ojson& j) {
  SessionState s;
  try {
    s.last_seq = j.at("last_seq").get<int64_t>();
    for (const auto& [name, v] : j.at("stages").items()) {
      StageStatus st;
      auto state = parse_stage_state(v.at("state").get<std::string>());
      if (!state) fail(ErrorCode::ParseFailure, "bad stage state for " + name);
      st.state = *state;
      st.last_attempt = v.at("last_attempt").get<int>();
      if (!v.at("last_gate").is_null()) st.last_gate = gate_result_from_json(v["last_gate"]);
      st.gates_applicable = v.at("gates_applicable").get<bool>();
      s.stage_status[name] = st;
    }
    if (!j.at("pending_review").is_null()) s.pending_review = bundle_from_json(j["pending_review"]);
    s.pending_feedback = j.at("pending_feedback").get<std::map<std::string, std::string>>();
    for (const auto& n : j.at("stale_nodes")) s.stale_nodes.insert(n.get<std::string>());
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorCode::ParseFailure, std::string("malformed session snapshot: ") + ex.what());
  }
  return s;
}

// ---------------------------------------------------------------------------

Session::Session(GatewayEnv env, Clock& clock, WorkflowSpec workflow, std::vector<CommandSpec> commands,
                 DependencyGraph graph, SessionOptions options)
    : env_(env),
      clock_(clock),
      workflow_(std::move(workflow)),
      commands_(std::move(commands)),
      graph_(std::move(graph)),
      options_(std::move(options)) {
  order_ = recommended_order(graph_);
  reload();
}

void Session::reload() {
  events_.clear();
  if (auto log = env_.ws.read(kEvents)) {
    for (const auto& ln : text::split_lines(*log)) {
      if (text::trim(ln.text).empty()) continue;
      try {
        events_.push_back(event_from_json(ojson::parse(ln.text)));
      } catch (const nlohmann::json::exception& ex) {
        fail(ErrorCode::ParseFailure, "event log line " + std::to_string(ln.number) + ": " + ex.what());
      }
    }
  }
  state_ = fold_events(graph_, events_);
}

void Session::emit(EventKind kind, ojson payload) {
  SessionEvent e{state_.last_seq + 1, kind, std::move(payload), clock_.now()};
  auto next = state_;
  apply_event(next, e);
  env_.ws.append(kEvents, to_json(e).dump() + "\n");
  state_ = std::move(next);
  events_.push_back(e);
  if (listener_) listener_(events_.back());
}

void Session::write_snapshot() { env_.ws.write(kSnapshot, to_json(state_).dump(2) + "\n"); }

std::vector<SessionEvent> Session::events_since(int64_t seq) const {
  std::vector<SessionEvent> out;
  for (const auto& e : events_) {
    if (e.seq > seq) out.push_back(e);
  }
  return out;
}

void Session::on_attempt(const AgentRequest& request, const AgentResponse& response, const ChangeSet& changes) {
  ++attempts_logged_;
  ojson p;
  p["stage"] = request.stage;
  p["attempt"] = request.attempt;
  p["feedback"] = request.feedback ? ojson(*request.feedback) : ojson(nullptr);
  p["context_docs"] = ojson::array();
  for (const auto& d : request.context_docs) p["context_docs"].push_back({{"path", d.path}, {"version", d.version}});
  p["data_refs"] = ojson::array();
  for (const auto& r : request.data_refs) p["data_refs"].push_back(r.path);
  p["request_sha256"] = sha256_hex(to_json(request).dump());
  p["response"] = to_json(response);
  p["changes"] = to_json(changes);
  emit(EventKind::AgentAttempt, std::move(p));
}

void Session::on_gate(const AgentRequest& request, const CheckReport& report, const GateResult& result) {
  ++gates_logged_;
  ojson p;
  p["stage"] = request.stage;
  p["attempt"] = request.attempt;
  p["result"] = to_json(result);
  p["diagnostics"] = ojson::array();
  for (const auto& d : report.diagnostics) p["diagnostics"].push_back(to_json(d));
  p["runs"] = ojson::array();
  for (const auto& r : report.runs) p["runs"].push_back(to_json(r));
  emit(EventKind::GateRun, std::move(p));
}

ReviewBundle Session::invoke(std::string_view stage_name, AgentBackend& backend) {
  if (state_.pending_review) {
    fail(ErrorCode::ReviewPending, "stage '" + state_.pending_review->stage + "' is awaiting review");
  }
  const auto* decl = workflow_.find(stage_name);
  if (!decl) fail(ErrorCode::UnknownStage, "no such stage: " + std::string(stage_name));
  auto cmd = std::find_if(commands_.begin(), commands_.end(), [&](const CommandSpec& c) { return c.name == decl->command; });
  if (cmd == commands_.end()) fail(ErrorCode::UnknownCommand, "no command file for stage " + decl->command);
  std::string stage = decl->command;

  std::vector<std::string> warnings;
  sync(&warnings);
  for (const auto& up : graph_.upstream_stages(stage)) {
    auto st = state_.stage_status.at(up).state;
    if (st != StageState::Approved) {
      warnings.push_back("upstream stage '" + up + "' is " + std::string(to_string(st)));
    }
  }
  std::optional<std::string> feedback;
  if (auto it = state_.pending_feedback.find(stage); it != state_.pending_feedback.end() &&
                                                     state_.stage_status.at(stage).state == StageState::RevisionRequested) {
    feedback = it->second;
  }
  auto skipped = skipped_stages();

  ojson p;
  p["stage"] = stage;
  p["feedback"] = feedback ? ojson(*feedback) : ojson(nullptr);
  p["warnings"] = warnings;
  p["skipped_stages"] = skipped;
  emit(EventKind::Invoked, std::move(p));

  attempts_logged_ = gates_logged_ = 0;
  RepairInput input{&*cmd, decl, feedback, skipped, options_.max_context_bytes};
  RepairOutcome outcome;
  auto abort_with = [&](ErrorCode code, const std::string& message) {
    bool in_gate = attempts_logged_ > gates_logged_;
    ojson a;
    a["stage"] = stage;
    a["attempt"] = in_gate ? attempts_logged_ : attempts_logged_ + 1;
    a["aborted"] = true;
    a["error"] = error_json(code, message);
    emit(in_gate ? EventKind::GateRun : EventKind::AgentAttempt, std::move(a));
    write_snapshot();
  };
  try {
    outcome = repair_loop(input, backend, options_.gates, options_.max_attempts, env_, this);
  } catch (const Error& e) {
    abort_with(e.code(), e.what());
    throw;
  } catch (const std::exception& e) {
    abort_with(ErrorCode::Internal, e.what());
    throw;
  }

  ReviewBundle bundle{stage, outcome.attempts, outcome.changes, outcome.narration,
                      outcome.final_gate, outcome.converged, warnings};
  ojson pr;
  pr["stage"] = stage;
  pr["gates_applicable"] = outcome.gates_applicable;
  pr["bundle"] = bundle_json(bundle);
  emit(EventKind::Presented, std::move(pr));
  write_snapshot();
  return bundle;
}

void Session::submit_review(const ReviewDecision& decision) {
  if (!state_.pending_review) fail(ErrorCode::NoPendingReview, "no stage is awaiting review");
  auto stage = state_.pending_review->stage;
  const auto& st = state_.stage_status.at(stage);
  if (decision.kind == ReviewDecision::Kind::Revise && text::trim(decision.feedback).empty()) {
    fail(ErrorCode::EmptyFeedback, "revise needs feedback text");
  }
  if (decision.kind == ReviewDecision::Kind::Approve && st.gates_applicable && (!st.last_gate || !st.last_gate->pass)) {
    fail(ErrorCode::GateBlocking, "stage '" + stage + "' has blocking quality-gate diagnostics; revise or skip instead");
  }

  ojson p;
  p["stage"] = stage;
  p["decision"] = to_string(decision.kind);
  if (decision.kind == ReviewDecision::Kind::Revise) p["feedback"] = std::string(text::trim(decision.feedback));
  if (decision.kind == ReviewDecision::Kind::Skip) {
    const auto* decl = workflow_.find(stage);
    if (decl && !decl->optional) p["warning"] = "skipping non-optional stage '" + stage + "'";
  }
  if (decision.kind == ReviewDecision::Kind::Approve) {
    ojson cleared = ojson::array();
    const auto* entry = graph_.find_stage(stage);
    for (const auto& n : state_.stale_nodes) {
      if (entry && (n == entry->node || std::find(entry->produces.begin(), entry->produces.end(), n) != entry->produces.end())) {
        cleared.push_back(n);
      }
    }
    p["cleared_stale"] = std::move(cleared);
  }
  emit(EventKind::Decision, std::move(p));
  if (decision.kind != ReviewDecision::Kind::Revise) {
    auto next = recommended_next();
    emit(EventKind::Advanced, {{"stage", stage}, {"next", next ? ojson(*next) : ojson(nullptr)}});
  }
  write_snapshot();
}

std::vector<std::string> Session::mark_changed(std::string_view node) {
  auto stale = stale_set(graph_, node);
  auto producers = graph_.producers_of(stale);
  ojson flipped = ojson::array();
  for (const auto& s : order_) {
    if (producers.count(s) && state_.stage_status.at(s).state == StageState::Approved) flipped.push_back(s);
  }
  ojson p;
  p["artifact"] = std::string(node);
  p["stale_nodes"] = ojson::array();
  for (const auto& n : stale) p["stale_nodes"].push_back(n);
  p["stages"] = std::move(flipped);
  emit(EventKind::StalenessMarked, std::move(p));
  write_snapshot();
  std::vector<std::string> now_stale;
  for (const auto& s : order_) {
    if (producers.count(s) && state_.stage_status.at(s).state == StageState::Stale) now_stale.push_back(s);
  }
  return now_stale;
}

std::vector<std::string> Session::sync(std::vector<std::string>* warnings) {
  for (const auto& f : env_.ws.list_files("data/raw")) {
    if (env_.data.find(f)) continue;
    try {
      env_.data.ingest_raw(f);
    } catch (const Error& e) {
      if (warnings) warnings->push_back(std::string("raw ingest: ") + e.what());
    }
  }
  auto before = env_.context.documents();
  auto changed = env_.context.sync_from_disk(Author::human());
  for (const auto& doc : changed) {
    bool tracked = std::binary_search(before.begin(), before.end(), doc);
    if (tracked && graph_.find(doc)) mark_changed(doc);
  }
  return changed;
}

void Session::replay(ScriptedBackend& backend, const std::vector<ReviewDecision>& decisions) {
  size_t next = 0;
  while (!backend.exhausted()) {
    const auto& entry = backend.entries()[backend.cursor()];
    if (entry.attempt != 1) {
      fail(ErrorCode::TranscriptMismatch, "transcript entry " + std::to_string(backend.cursor() + 1) + " (" +
                                              entry.command + " attempt " + std::to_string(entry.attempt) +
                                              ") was not requested");
    }
    invoke(entry.command, backend);
    if (next >= decisions.size()) {
      fail(ErrorCode::DecisionUnderflow, "no review decision left for stage '" + entry.command + "'");
    }
    submit_review(decisions[next++]);
  }
  if (next < decisions.size()) {
    fail(ErrorCode::InvalidArgument, std::to_string(decisions.size() - next) + " review decision(s) left unused");
  }
}

std::optional<std::string> Session::recommended_next() const {
  for (const auto& s : order_) {
    auto st = state_.stage_status.at(s).state;
    if (st != StageState::Approved && st != StageState::Skipped) return s;
  }
  return std::nullopt;
}

bool Session::complete() const { return !recommended_next() && !state_.pending_review; }

std::vector<std::string> Session::skipped_stages() const {
  std::vector<std::string> out;
  for (const auto& s : order_) {
    if (state_.stage_status.at(s).state == StageState::Skipped) out.push_back(s);
  }
  return out;
}

DependencyGraph Session::observed_graph() const {
  return observe_freshness(graph_, env_.ws.list_files(), state_.stale_nodes);
}

namespace {

Freshness freshness_in(const DependencyGraph& observed, const StageEntry& entry, StageState state) {
  if (state == StageState::Stale) return Freshness::Stale;
  Freshness f = Freshness::Fresh;
  for (const auto& n : entry.produces) {
    const auto* node = observed.find(n);
    if (!node) continue;
    if (node->freshness == Freshness::Stale) return Freshness::Stale;
    if (node->freshness == Freshness::Missing) f = Freshness::Missing;
  }
  return f;
}

}  // namespace

Freshness Session::stage_freshness(std::string_view stage) const {
  const auto* entry = graph_.find_stage(stage);
  if (!entry) fail(ErrorCode::UnknownStage, "no such stage: " + std::string(stage));
  return freshness_in(observed_graph(), *entry, state_.stage_status.at(entry->name).state);
}

ojson Session::describe() const {
  auto observed = observed_graph();
  ojson j;
  j["stages"] = ojson::array();
  for (const auto& s : order_) {
    const auto& st = state_.stage_status.at(s);
    const auto* entry = graph_.find_stage(s);
    ojson row;
    row["name"] = s;
    row["state"] = to_string(st.state);
    row["freshness"] = to_string(freshness_in(observed, *entry, st.state));
    row["optional"] = entry->optional;
    row["last_attempt"] = st.last_attempt;
    row["gates_applicable"] = st.gates_applicable;
    row["last_gate"] = st.last_gate ? to_json(*st.last_gate) : ojson(nullptr);
    j["stages"].push_back(std::move(row));
  }
  j["pending_review"] = state_.pending_review ? bundle_json(*state_.pending_review) : ojson(nullptr);
  auto next = recommended_next();
  j["recommended_next"] = next ? ojson(*next) : ojson(nullptr);
  j["complete"] = complete();
  j["skipped_stages"] = skipped_stages();
  j["stale_nodes"] = ojson::array();
  for (const auto& n : state_.stale_nodes) j["stale_nodes"].push_back(n);
  j["last_seq"] = state_.last_seq;
  return j;
}

}  // namespace specflow
