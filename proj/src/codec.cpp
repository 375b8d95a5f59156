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

#include "specflow/codec.hpp"

#include "specflow/error.hpp"

namespace specflow {

namespace {
ojson opt(const std::optional<std::string>& v) { return v ? ojson(*v) : ojson(nullptr); }
}  // namespace

ojson to_json(const Diagnostic& d) {
  ojson j;
  j["file"] = d.file;
  j["line"] = d.line;
  j["column"] = d.column ? ojson(*d.column) : ojson(nullptr);
  j["severity"] = to_string(d.severity);
  j["message"] = d.message;
  j["tool"] = d.tool;
  if (!d.spelled_severity.empty() && d.spelled_severity != to_string(d.severity)) j["spelled_severity"] = d.spelled_severity;
  return j;
}

Diagnostic diagnostic_from_json(const ojson& j) {
  Diagnostic d;
  d.file = j.at("file").get<std::string>();
  d.line = j.at("line").get<int>();
  if (j.contains("column") && !j["column"].is_null()) d.column = j["column"].get<int>();
  auto sev = parse_severity(j.at("severity").get<std::string>());
  if (!sev) fail(ErrorCode::ParseFailure, "bad severity in diagnostic");
  d.severity = *sev;
  d.message = j.at("message").get<std::string>();
  d.tool = j.value("tool", "");
  d.spelled_severity = j.value("spelled_severity", std::string(to_string(d.severity)));
  return d;
}

ojson to_json(const GateResult& g) {
  ojson j;
  j["pass"] = g.pass;
  j["blocking"] = ojson::array();
  for (const auto& d : g.blocking) j["blocking"].push_back(to_json(d));
  return j;
}

GateResult gate_result_from_json(const ojson& j) {
  GateResult g;
  g.pass = j.at("pass").get<bool>();
  for (const auto& d : j.value("blocking", ojson::array())) g.blocking.push_back(diagnostic_from_json(d));
  return g;
}

ojson to_json(const Change& c) {
  ojson j;
  j["kind"] = to_string(c.kind);
  j["path"] = c.path;
  if (c.kind == ChangeKind::DocWrite) j["version"] = c.version;
  return j;
}

Change change_from_json(const ojson& j) {
  Change c;
  auto kind = j.at("kind").get<std::string>();
  if (kind == "file_write") {
    c.kind = ChangeKind::FileWrite;
  } else if (kind == "doc_write") {
    c.kind = ChangeKind::DocWrite;
  } else if (kind == "data_note") {
    c.kind = ChangeKind::DataNote;
  } else {
    fail(ErrorCode::ParseFailure, "bad change kind: " + kind);
  }
  c.path = j.at("path").get<std::string>();
  c.version = j.value("version", 0);
  return c;
}

ojson to_json(const ChangeSet& changes) {
  ojson a = ojson::array();
  for (const auto& c : changes) a.push_back(to_json(c));
  return a;
}

ChangeSet change_set_from_json(const ojson& j) {
  ChangeSet out;
  for (const auto& c : j) out.push_back(change_from_json(c));
  return out;
}

ojson to_json(const ArtifactRecord& r) {
  ojson j;
  j["path"] = r.path;
  j["tier"] = to_string(r.tier);
  j["hash"] = r.content_hash;
  j["registered_at"] = r.registered_at;
  j["produced_by"] = opt(r.produced_by);
  j["sources"] = r.sources;
  j["transformation_ref"] = opt(r.transformation_ref);
  return j;
}

ojson to_json(const LineageTrace& t) {
  ojson j;
  j["root"] = t.root;
  j["edges"] = ojson::array();
  for (const auto& e : t.edges) {
    j["edges"].push_back({{"child", e.child}, {"parent", e.parent}, {"transformation_ref", opt(e.transformation_ref)}});
  }
  j["nodes"] = ojson::array();
  for (const auto& n : t.nodes) j["nodes"].push_back(n);
  return j;
}

ojson to_json(const IntegrityReport& r) {
  ojson j;
  j["ok"] = r.ok();
  j["critical"] = r.critical_count();
  j["findings"] = ojson::array();
  for (const auto& f : r.findings) {
    ojson x;
    x["path"] = f.path;
    x["tier"] = to_string(f.tier);
    x["status"] = to_string(f.status);
    x["severity"] = f.critical ? "critical" : (f.status == IntegrityStatus::Ok ? "none" : "warning");
    x["expected_hash"] = f.expected_hash;
    x["actual_hash"] = f.actual_hash.empty() ? ojson(nullptr) : ojson(f.actual_hash);
    j["findings"].push_back(std::move(x));
  }
  return j;
}

ojson to_json(const SearchHit& h) {
  ojson j;
  j["path"] = h.doc_path;
  j["version"] = h.version;
  j["lines"] = ojson::array();
  for (const auto& l : h.lines) {
    j["lines"].push_back({{"line", l.line}, {"column", l.column}, {"length", l.length}, {"text", l.text}});
  }
  return j;
}

ojson to_json(const CheckRun& r) {
  return {{"tool", r.tool}, {"exit_code", r.exit_code}, {"diagnostics", r.diagnostics}, {"ignored_lines", r.ignored_lines}};
}

ojson error_json(ErrorCode code, std::string_view message) {
  return {{"code", static_cast<int>(code)}, {"name", error_code_name(code)}, {"message", message}};
}

std::string dump_json(const ojson& j, int indent) {
  return j.dump(indent, ' ', false, ojson::error_handler_t::replace);
}

}  // namespace specflow
