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

#include "specflow/agent_gateway.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "httplib.h"
#include "specflow/context_store.hpp"
#include "specflow/error.hpp"
#include "specflow/paths.hpp"
#include "specflow/text.hpp"
#include "specflow/workspace.hpp"

namespace specflow {

namespace {

ojson opt_json(const std::optional<std::string>& v) { return v ? ojson(*v) : ojson(nullptr); }

ojson command_json(const CommandSpec& c) {
  ojson j;
  j["name"] = c.name;
  j["category"] = to_string(c.category);
  j["description"] = c.description;
  j["inputs"] = ojson::array();
  for (const auto& r : c.inputs) j["inputs"].push_back(r.pattern);
  j["outputs"] = ojson::array();
  for (const auto& r : c.outputs) j["outputs"].push_back(r.pattern);
  j["context_target"] = c.context_target ? ojson(c.context_target->pattern) : ojson(nullptr);
  j["body"] = c.body;
  return j;
}

ojson record_json(const ArtifactRecord& r) {
  ojson j;
  j["path"] = r.path;
  j["tier"] = to_string(r.tier);
  j["hash"] = r.content_hash;
  j["produced_by"] = opt_json(r.produced_by);
  j["sources"] = r.sources;
  j["transformation_ref"] = opt_json(r.transformation_ref);
  return j;
}

std::string get_string(const ojson& j, const char* key, const char* where) {
  if (!j.contains(key) || !j[key].is_string()) {
    fail(ErrorCode::InvalidResponse, std::string(where) + ": missing string field '" + key + "'");
  }
  return j[key].get<std::string>();
}

std::vector<FileWrite> writes_from_json(const ojson& j, const char* key) {
  std::vector<FileWrite> out;
  if (!j.contains(key) || j[key].is_null()) return out;
  if (!j[key].is_array()) fail(ErrorCode::InvalidResponse, std::string("'") + key + "' must be an array");
  for (const auto& w : j[key]) {
    if (!w.is_object()) fail(ErrorCode::InvalidResponse, std::string("entries of '") + key + "' must be objects");
    out.push_back({get_string(w, "path", key), get_string(w, "content", key)});
  }
  return out;
}

}  // namespace

ojson to_json(const AgentRequest& request) {
  ojson j;
  j["stage"] = request.stage;
  j["attempt"] = request.attempt;
  j["command"] = command_json(request.command);
  j["context_docs"] = ojson::array();
  for (const auto& d : request.context_docs) {
    j["context_docs"].push_back({{"path", d.path}, {"version", d.version}, {"content", d.content}});
  }
  j["data_refs"] = ojson::array();
  for (const auto& r : request.data_refs) j["data_refs"].push_back(record_json(r));
  j["feedback"] = opt_json(request.feedback);
  j["skipped_stages"] = request.skipped_stages;
  return j;
}

ojson to_json(const AgentResponse& response) {
  ojson j;
  auto writes = [](const std::vector<FileWrite>& ws) {
    ojson a = ojson::array();
    for (const auto& w : ws) a.push_back({{"path", w.path}, {"content", w.content}});
    return a;
  };
  j["file_writes"] = writes(response.file_writes);
  j["doc_writes"] = writes(response.doc_writes);
  j["data_notes"] = ojson::array();
  for (const auto& n : response.data_notes) {
    j["data_notes"].push_back(
        {{"path", n.path}, {"sources", n.sources}, {"transformation_ref", opt_json(n.transformation_ref)}});
  }
  j["narration"] = response.narration;
  return j;
}

AgentResponse response_from_json(const ojson& j) {
  if (!j.is_object()) fail(ErrorCode::InvalidResponse, "agent response must be a JSON object");
  AgentResponse r;
  r.file_writes = writes_from_json(j, "file_writes");
  r.doc_writes = writes_from_json(j, "doc_writes");
  if (j.contains("data_notes") && !j["data_notes"].is_null()) {
    if (!j["data_notes"].is_array()) fail(ErrorCode::InvalidResponse, "'data_notes' must be an array");
    for (const auto& n : j["data_notes"]) {
      if (!n.is_object()) fail(ErrorCode::InvalidResponse, "entries of 'data_notes' must be objects");
      DataNote note;
      note.path = get_string(n, "path", "data_notes");
      if (n.contains("sources")) {
        if (!n["sources"].is_array()) fail(ErrorCode::InvalidResponse, "data_notes: 'sources' must be an array");
        for (const auto& s : n["sources"]) {
          if (!s.is_string()) fail(ErrorCode::InvalidResponse, "data_notes: sources must be strings");
          note.sources.push_back(s.get<std::string>());
        }
      }
      if (n.contains("transformation_ref") && !n["transformation_ref"].is_null()) {
        note.transformation_ref = get_string(n, "transformation_ref", "data_notes");
      }
      r.data_notes.push_back(std::move(note));
    }
  }
  if (j.contains("narration") && !j["narration"].is_null()) r.narration = get_string(j, "narration", "response");
  return r;
}

// ---------------------------------------------------------------------------
// Scripted backend

std::vector<TranscriptEntry> parse_transcript(std::string_view text) {
  std::vector<TranscriptEntry> entries;
  for (const auto& ln : text::split_lines(text)) {
    auto line = text::trim(ln.text);
    if (line.empty() || line.front() == '#') continue;
    auto where = "transcript line " + std::to_string(ln.number);
    try {
      auto j = ojson::parse(line);
      TranscriptEntry e;
      e.command = j.at("command").get<std::string>();
      e.attempt = j.at("attempt").get<int>();
      e.response = response_from_json(j.at("response"));
      if (e.attempt < 1) fail(ErrorCode::ParseFailure, where + ": attempt must be >= 1");
      bool continues = !entries.empty() && entries.back().command == e.command;
      if (e.attempt != 1 && !(continues && e.attempt == entries.back().attempt + 1)) {
        fail(ErrorCode::ParseFailure, where + ": attempts for '" + e.command + "' must run 1, 2, ... contiguously");
      }
      entries.push_back(std::move(e));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ParseFailure) throw;
      fail(ErrorCode::ParseFailure, where + ": " + e.what());
    } catch (const std::exception& e) {
      fail(ErrorCode::ParseFailure, where + ": " + e.what());
    }
  }
  return entries;
}

ScriptedBackend::ScriptedBackend(std::vector<TranscriptEntry> entries, size_t cursor)
    : entries_(std::move(entries)), cursor_(std::min(cursor, entries_.size())) {}

AgentResponse ScriptedBackend::execute(const AgentRequest& request) {
  requests_.push_back(to_json(request).dump());
  if (exhausted()) {
    fail(ErrorCode::TranscriptMismatch, "transcript exhausted before " + request.command.name + " attempt " +
                                            std::to_string(request.attempt));
  }
  const auto& e = entries_[cursor_];
  if (e.command != request.command.name || e.attempt != request.attempt) {
    fail(ErrorCode::TranscriptMismatch, "transcript expects " + e.command + " attempt " + std::to_string(e.attempt) +
                                            ", got " + request.command.name + " attempt " +
                                            std::to_string(request.attempt));
  }
  ++cursor_;
  return e.response;
}

// ---------------------------------------------------------------------------
// Remote backend

std::optional<ojson> extract_fenced_json(std::string_view text) {
  size_t pos = 0;
  while ((pos = text.find("```", pos)) != std::string_view::npos) {
    auto header_end = text.find('\n', pos);
    if (header_end == std::string_view::npos) return std::nullopt;
    auto close = text.find("```", header_end + 1);
    if (close == std::string_view::npos) return std::nullopt;
    auto body = text.substr(header_end + 1, close - header_end - 1);
    try {
      auto j = ojson::parse(body);
      if (j.is_object()) return j;
    } catch (const std::exception&) {
    }
    pos = close + 3;
  }
  return std::nullopt;
}

RemoteLLMBackend::RemoteLLMBackend(RemoteSettings settings) : settings_(std::move(settings)) {}
RemoteLLMBackend::~RemoteLLMBackend() = default;

std::string RemoteLLMBackend::render_prompt(const AgentRequest& request) {
  std::string out = request.command.body;
  if (!out.empty() && out.back() != '\n') out += '\n';
  out += "\n## Context bundle\n\n```json\n";
  out += to_json(request).dump(2);
  out += "\n```\n\n";
  out +=
      "Reply with exactly one fenced ```json block holding an object with keys "
      "file_writes [{path, content}], doc_writes [{path, content}], "
      "data_notes [{path, sources, transformation_ref}] and narration.\n";
  return out;
}

AgentResponse RemoteLLMBackend::execute(const AgentRequest& request) {
  cancelled_ = false;
  auto& url = settings_.endpoint;
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) fail(ErrorCode::BackendError, "remote endpoint must be an absolute URL: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  std::string base = path_start == std::string::npos ? url : url.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

  httplib::Client client(base);
  client.set_connection_timeout(settings_.timeout_seconds, 0);
  client.set_read_timeout(settings_.timeout_seconds, 0);
  client.set_write_timeout(settings_.timeout_seconds, 0);
  httplib::Headers headers;
  if (!settings_.token.empty()) headers.emplace("Authorization", "Bearer " + settings_.token);

  ojson body;
  body["model"] = settings_.model;
  body["temperature"] = 0;
  body["messages"] = ojson::array();
  body["messages"].push_back({{"role", "system"},
                              {"content", "You carry out one research workflow stage. Answer only with the requested "
                                          "JSON block."}});
  body["messages"].push_back({{"role", "user"}, {"content", render_prompt(request)}});

  {
    std::lock_guard lock(mu_);
    if (cancelled_) fail(ErrorCode::BackendError, "request cancelled");
    active_ = &client;
  }
  auto result = client.Post(path, headers, body.dump(), "application/json");
  {
    std::lock_guard lock(mu_);
    active_ = nullptr;
  }
  if (cancelled_) fail(ErrorCode::BackendError, "request cancelled");
  if (!result) fail(ErrorCode::BackendError, "remote call failed: " + httplib::to_string(result.error()));
  if (result->status != 200) {
    fail(ErrorCode::BackendError, "remote endpoint returned HTTP " + std::to_string(result->status));
  }
  std::string content;
  try {
    auto reply = ojson::parse(result->body);
    content = reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const std::exception& e) {
    fail(ErrorCode::BackendError, std::string("malformed chat completion: ") + e.what());
  }
  auto block = extract_fenced_json(content);
  if (!block) fail(ErrorCode::BackendError, "reply has no fenced JSON block");
  try {
    return response_from_json(*block);
  } catch (const Error& e) {
    fail(ErrorCode::BackendError, std::string("reply block is not a valid response: ") + e.what());
  }
}

void RemoteLLMBackend::cancel() {
  std::lock_guard lock(mu_);
  cancelled_ = true;
  if (active_) active_->stop();
}

// ---------------------------------------------------------------------------
// Request assembly

AgentRequest assemble_request(const CommandSpec& command, const StageDecl* stage, const GatewayEnv& env,
                              const RequestOptions& options) {
  AgentRequest req;
  req.stage = stage ? stage->command : command.name;
  req.command = command;
  req.feedback = options.feedback;
  req.attempt = options.attempt;
  req.skipped_stages = options.skipped_stages;

  std::vector<ResourceRef> inputs = command.inputs;
  if (stage) {
    for (const auto& r : stage->consumes) {
      if (std::find(inputs.begin(), inputs.end(), r) == inputs.end()) inputs.push_back(r);
    }
  }

  std::set<std::string> doc_paths;
  auto docs = env.context.documents();
  for (const auto& ref : inputs) {
    for (const auto& d : docs) {
      if (d == ref.pattern || ref.matches(d)) doc_paths.insert(d);
    }
    for (const auto& b : env.context.backlinks_matching(ref.pattern)) doc_paths.insert(b.doc_path);
  }
  std::optional<std::string> target;
  if (command.context_target) target = command.context_target->pattern;
  if (stage && stage->context_artifact) target = stage->context_artifact;
  if (target) {
    for (const auto& b : env.context.backlinks(*target)) doc_paths.insert(b.doc_path);
    doc_paths.erase(*target);
  }

  struct Candidate {
    std::string path;
    int version;
    std::string created_at;
    std::string content;
  };
  std::vector<Candidate> cands;
  for (const auto& p : doc_paths) {
    auto doc = env.context.find(p);
    if (!doc) continue;
    cands.push_back({p, doc->head().version, doc->head().created_at, env.context.read_document(p)});
  }
  if (options.max_context_bytes > 0) {
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
      if (a.created_at != b.created_at) return a.created_at > b.created_at;
      return a.path < b.path;
    });
    size_t used = 0;
    std::vector<Candidate> kept;
    for (auto& c : cands) {
      if (used + c.content.size() > options.max_context_bytes) continue;
      used += c.content.size();
      kept.push_back(std::move(c));
    }
    cands = std::move(kept);
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.path < b.path; });
  }
  for (auto& c : cands) req.context_docs.push_back({c.path, c.version, std::move(c.content)});

  std::map<std::string, ArtifactRecord> records;
  for (const auto& ref : inputs) {
    if (ref.kind != RefKind::DataPath) continue;
    for (auto& r : env.data.matching(ref.pattern)) records.emplace(r.path, std::move(r));
  }
  for (auto& [_, r] : records) req.data_refs.push_back(std::move(r));
  return req;
}

// ---------------------------------------------------------------------------
// Applying responses

std::string_view to_string(ChangeKind kind) {
  switch (kind) {
    case ChangeKind::FileWrite:
      return "file_write";
    case ChangeKind::DocWrite:
      return "doc_write";
    case ChangeKind::DataNote:
      return "data_note";
  }
  return "file_write";
}

namespace {

std::string checked_target(std::string_view path) {
  auto norm = normalize_relative(path);
  if (!norm) fail(ErrorCode::PathOutsideProject, "path is outside the project root: " + std::string(path));
  if (is_under(*norm, "data/raw") || *norm == "data/raw/") {
    fail(ErrorCode::RawTierViolation, "raw data is read-only: " + *norm);
  }
  return *norm;
}

}  // namespace

ChangeSet apply_response(const AgentResponse& response, std::string_view stage, GatewayEnv& env) {
  // Validate everything up front so obviously bad responses never touch
  // the tree.
  std::vector<std::string> file_paths, doc_paths;
  for (const auto& w : response.file_writes) {
    auto p = checked_target(w.path);
    if (is_under(p, std::string(kStateDir)) || p == "specflow.json") {
      fail(ErrorCode::InvalidResponse, "engine-owned path in file_writes: " + p);
    }
    if (is_under(p, "docs")) fail(ErrorCode::InvalidResponse, "documents go in doc_writes, not file_writes: " + p);
    if (p.back() == '/') fail(ErrorCode::InvalidResponse, "file_writes entry names a directory: " + p);
    file_paths.push_back(p);
  }
  for (const auto& w : response.doc_writes) {
    auto p = checked_target(w.path);
    if (!is_under(p, "docs") || p.back() == '/') fail(ErrorCode::PathOutsideDocs, "doc_writes must target docs/: " + p);
    doc_paths.push_back(p);
  }
  for (const auto& n : response.data_notes) checked_target(n.path);

  ChangeSet changes;
  Workspace::Transaction tx(env.ws);
  try {
    for (size_t i = 0; i < response.file_writes.size(); ++i) {
      env.ws.write(file_paths[i], response.file_writes[i].content);
      changes.push_back({ChangeKind::FileWrite, file_paths[i], 0});
    }
    for (size_t i = 0; i < response.doc_writes.size(); ++i) {
      auto head = env.context.find(doc_paths[i]);
      if (head && head->head().content_hash == sha256_hex(response.doc_writes[i].content)) continue;
      auto v = env.context.write_document(doc_paths[i], response.doc_writes[i].content, Author::agent(std::string(stage)));
      changes.push_back({ChangeKind::DocWrite, doc_paths[i], v.version});
    }
    for (const auto& n : response.data_notes) {
      try {
        auto rec = env.data.register_derived(n.path, n.sources, stage, n.transformation_ref);
        changes.push_back({ChangeKind::DataNote, rec.path, 0});
      } catch (const Error& e) {
        if (e.code() == ErrorCode::RawTierWrite) fail(ErrorCode::RawTierViolation, e.what());
        fail(ErrorCode::ProvenanceError, std::string("data note ") + n.path + ": " + e.what());
      }
    }
    tx.commit();
  } catch (...) {
    tx.rollback();
    env.context.reload();
    env.data.reload();
    throw;
  }
  return changes;
}

// ---------------------------------------------------------------------------
// Repair loop

std::vector<std::string> gate_targets(const StageDecl* stage) {
  std::vector<std::string> dirs;
  if (!stage) return dirs;
  for (const auto& r : stage->produces) {
    if (layer_of(r.pattern) != Layer::Code) continue;
    auto top = r.pattern.substr(0, r.pattern.find('/'));
    if (std::find(dirs.begin(), dirs.end(), top) == dirs.end()) dirs.push_back(top);
  }
  return dirs;
}

std::string diagnostics_feedback(const std::optional<std::string>& human, const std::vector<Diagnostic>& blocking) {
  std::string out;
  if (human && !human->empty()) out = *human + "\n\n";
  out += "Quality gate failed. Fix these diagnostics:\n";
  for (const auto& d : blocking) {
    out += d.file + ":" + std::to_string(d.line);
    if (d.column) out += ":" + std::to_string(*d.column);
    out += ": " + std::string(to_string(d.severity)) + ": " + d.message + " [" + d.tool + "]\n";
  }
  return out;
}

RepairOutcome repair_loop(const RepairInput& input, AgentBackend& backend, const std::vector<CheckConfig>& gates,
                          int max_attempts, GatewayEnv& env, RepairObserver* observer) {
  if (!input.command) fail(ErrorCode::InvalidArgument, "repair_loop needs a command");
  if (max_attempts < 1) fail(ErrorCode::InvalidArgument, "max_attempts must be >= 1");
  auto targets = gate_targets(input.stage);
  RepairOutcome outcome;
  outcome.gates_applicable = !gates.empty() && !targets.empty();

  std::optional<std::string> feedback = input.feedback;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    RequestOptions opts{feedback, attempt, input.skipped_stages, input.max_context_bytes};
    auto request = assemble_request(*input.command, input.stage, env, opts);
    auto response = backend.execute(request);
    auto changes = apply_response(response, request.stage, env);
    outcome.attempts = attempt;
    outcome.narration = response.narration;
    for (const auto& c : changes) {
      auto same = [&](const Change& o) { return o.kind == c.kind && o.path == c.path; };
      auto it = std::find_if(outcome.changes.begin(), outcome.changes.end(), same);
      if (it == outcome.changes.end()) {
        outcome.changes.push_back(c);
      } else {
        it->version = c.version;
      }
    }
    if (observer) observer->on_attempt(request, response, changes);

    if (!outcome.gates_applicable) {
      outcome.converged = true;
      return outcome;
    }
    std::vector<std::string> existing;
    for (const auto& t : targets) {
      if (env.ws.is_directory(t)) existing.push_back(t);
    }
    CheckReport report;
    if (existing.empty()) {
      Diagnostic d;
      d.file = targets.front();
      d.message = "no code directory to check";
      d.tool = gates.front().name;
      d.spelled_severity = "error";
      report.diagnostics.push_back(d);
    } else {
      report = run_checks(gates, env.ws.root(), existing);
    }
    auto gate = gate_status(report.diagnostics, gates);
    if (observer) observer->on_gate(request, report, gate);
    outcome.final_gate = gate;
    outcome.final_diagnostics = report.diagnostics;
    if (gate.pass) {
      outcome.converged = true;
      return outcome;
    }
    feedback = diagnostics_feedback(input.feedback, gate.blocking);
  }
  return outcome;
}

}  // namespace specflow
