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


#include "specflow/specflow.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "specflow/api_server.hpp"
#include "specflow/codec.hpp"
#include "specflow/project.hpp"

struct sf_project {
  std::unique_ptr<specflow::Project> impl;
};

struct sf_server {
  std::unique_ptr<specflow::ApiServer> impl;
};

namespace {

using specflow::ErrorCode;
using specflow::ojson;

thread_local std::string last_error;

sf_status set_error(ErrorCode code, const std::string& message) {
  last_error = message;
  return static_cast<sf_status>(code);
}

char* dup(const std::string& s) {
  auto* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

// Runs fn, translating exceptions. fn returns the text for *out; the
// nullptr form is for calls without a string result.
template <typename F>
sf_status call(char** out, F&& fn, bool want_out = true) {
  if (want_out && !out) return set_error(ErrorCode::InvalidArgument, "out is null");
  if (out) *out = nullptr;
  try {
    auto text = fn();
    if (out) *out = dup(text);
    last_error.clear();
    return SF_OK;
  } catch (const specflow::Error& e) {
    return set_error(e.code(), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(ErrorCode::Internal, "out of memory");
  } catch (const std::exception& e) {
    return set_error(ErrorCode::Internal, e.what());
  }
}

template <typename F>
sf_status call(std::nullptr_t, F&& fn) {
  return call(static_cast<char**>(nullptr), std::forward<F>(fn), false);
}

#define SF_REQUIRE(cond, what)                                   \
  do {                                                           \
    if (!(cond)) return set_error(ErrorCode::InvalidArgument, what); \
  } while (0)

std::string dumped(const ojson& j) { return specflow::dump_json(j, 2); }

}  // namespace

extern "C" {

const char* sf_version(void) { return "0.1.0"; }

const char* sf_error_name(int code) {
  if (code < 0 || code > static_cast<int>(ErrorCode::Internal)) return "Unknown";
  // error_code_name returns views into static literals.
  return specflow::error_code_name(static_cast<ErrorCode>(code)).data();
}

const char* sf_last_error_message(void) { return last_error.c_str(); }

void sf_free(char* p) { std::free(p); }

sf_status sf_init(const char* dir, char** out) {
  SF_REQUIRE(dir, "dir is null");
  return call(out, [&] {
    ojson j;
    j["schema_version"] = specflow::kSchemaVersion;
    j["created"] = specflow::scaffold(dir);
    return dumped(j);
  });
}

sf_status sf_open(const char* dir, sf_project** out) {
  SF_REQUIRE(dir && out, "null argument");
  *out = nullptr;
  return call(nullptr, [&] {
    auto p = std::make_unique<sf_project>();
    p->impl = specflow::Project::open(dir);
    *out = p.release();
    return std::string();
  });
}

void sf_close(sf_project* p) { delete p; }

#define SF_PROJECT(p) SF_REQUIRE((p) && (p)->impl, "project handle is null")

sf_status sf_run(sf_project* p, const char* stage, char** out) {
  SF_PROJECT(p);
  SF_REQUIRE(stage, "stage is null");
  return call(out, [&] { return dumped(p->impl->run(stage)); });
}

sf_status sf_review(sf_project* p, const char* decision, const char* feedback, char** out) {
  SF_PROJECT(p);
  SF_REQUIRE(decision, "decision is null");
  std::string d = decision;
  specflow::ReviewDecision rd;
  if (d == "approve") {
    rd = specflow::ReviewDecision::approve();
  } else if (d == "skip") {
    rd = specflow::ReviewDecision::skip();
  } else if (d == "revise") {
    rd = specflow::ReviewDecision::revise(feedback ? feedback : "");
  } else {
    return set_error(ErrorCode::InvalidArgument, "decision must be approve, revise or skip");
  }
  return call(out, [&] { return dumped(p->impl->review(rd)); });
}

sf_status sf_status_json(sf_project* p, char** out) {
  SF_PROJECT(p);
  return call(out, [&] { return dumped(p->impl->status()); });
}

sf_status sf_graph(sf_project* p, const char* format, char** out) {
  SF_PROJECT(p);
  std::string f = format ? format : "json";
  if (f != "json" && f != "dot") return set_error(ErrorCode::InvalidArgument, "format must be json or dot");
  return call(out, [&] {
    return p->impl->graph(f == "dot" ? specflow::GraphFormat::Dot : specflow::GraphFormat::Json);
  });
}

sf_status sf_lineage(sf_project* p, const char* path, char** out) {
  SF_PROJECT(p);
  SF_REQUIRE(path, "path is null");
  return call(out, [&] { return dumped(p->impl->lineage(path)); });
}

sf_status sf_verify(sf_project* p, char** out) {
  SF_PROJECT(p);
  return call(out, [&] { return dumped(p->impl->verify()); });
}

sf_status sf_search(sf_project* p, const char* query, char** out) {
  SF_PROJECT(p);
  return call(out, [&] { return dumped(p->impl->search(query ? query : "")); });
}

sf_status sf_doc(sf_project* p, const char* path, int version, char** out) {
  SF_PROJECT(p);
  SF_REQUIRE(path, "path is null");
  std::optional<int> v;
  if (version > 0) v = version;
  return call(out, [&] { return dumped(p->impl->doc(path, v)); });
}

sf_status sf_events(sf_project* p, int64_t since, char** out) {
  SF_PROJECT(p);
  return call(out, [&] { return dumped(p->impl->events(since)); });
}

sf_status sf_mark_changed(sf_project* p, const char* node, char** out) {
  SF_PROJECT(p);
  SF_REQUIRE(node, "node is null");
  return call(out, [&] { return dumped(p->impl->mark_changed(node)); });
}

sf_status sf_sync(sf_project* p, char** out) {
  SF_PROJECT(p);
  return call(out, [&] { return dumped(p->impl->sync()); });
}

sf_status sf_ingest(sf_project* p, const char* path, char** out) {
  SF_PROJECT(p);
  std::optional<std::string> target;
  if (path) target = path;
  return call(out, [&] { return dumped(p->impl->ingest(target)); });
}

sf_status sf_gate(sf_project* p, char** out) {
  SF_PROJECT(p);
  return call(out, [&] { return dumped(p->impl->gate()); });
}

sf_status sf_replay(sf_project* p, const char* transcript, const char* decisions, char** out) {
  SF_PROJECT(p);
  SF_REQUIRE(transcript && decisions, "transcript and decisions are required");
  return call(out, [&] { return dumped(p->impl->replay(transcript, decisions)); });
}

sf_status sf_cancel(sf_project* p) {
  SF_PROJECT(p);
  return call(nullptr, [&] {
    p->impl->cancel();
    return std::string();
  });
}

sf_status sf_serve_start(sf_project* p, const char* host, int port, const char* static_dir, sf_server** out) {
  SF_PROJECT(p);
  SF_REQUIRE(out, "out is null");
  *out = nullptr;
  return call(nullptr, [&] {
    auto s = std::make_unique<sf_server>();
    s->impl = std::make_unique<specflow::ApiServer>(*p->impl, static_dir ? static_dir : "");
    s->impl->start(host ? host : "127.0.0.1", port);
    *out = s.release();
    return std::string();
  });
}

int sf_server_port(const sf_server* s) { return s && s->impl ? s->impl->port() : -1; }

void sf_server_wait(sf_server* s) {
  if (s && s->impl) s->impl->wait();
}

void sf_server_stop(sf_server* s) {
  if (s && s->impl) s->impl->stop();
}

void sf_server_free(sf_server* s) { delete s; }

}  // extern "C"
