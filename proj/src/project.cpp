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

#include "specflow/project.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>

#include "specflow/codec.hpp"
#include "specflow/context_store.hpp"
#include "specflow/data_store.hpp"
#include "specflow/error.hpp"
#include "specflow/paths.hpp"
#include "specflow/workspace.hpp"

namespace specflow {

namespace fs = std::filesystem;

namespace {

const std::string kCursorFile = std::string(kStateDir) + "/session/scripted_cursor.json";

std::string config_path(const ojson& j, const char* key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_string()) fail(ErrorCode::InvalidConfig, std::string("'") + key + "' must be a string");
  auto norm = normalize_relative(j[key].get<std::string>());
  if (!norm) fail(ErrorCode::InvalidConfig, std::string("'") + key + "' must be a path inside the project");
  return *norm;
}

ErrorCode code_from_name(std::string_view name) {
  for (int i = 1; i <= static_cast<int>(ErrorCode::Internal); ++i) {
    if (error_code_name(static_cast<ErrorCode>(i)) == name) return static_cast<ErrorCode>(i);
  }
  return ErrorCode::InvalidArgument;
}

class DirLock {
 public:
  DirLock(const fs::path& dir, bool exclusive) {
    fd_ = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
    if (fd_ < 0) fail(ErrorCode::IoError, "cannot open " + dir.string() + ": " + std::strerror(errno));
    while (::flock(fd_, exclusive ? LOCK_EX : LOCK_SH) != 0) {
      if (errno != EINTR) {
        ::close(fd_);
        fail(ErrorCode::IoError, "cannot lock " + dir.string());
      }
    }
  }
  ~DirLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  DirLock(const DirLock&) = delete;
  DirLock& operator=(const DirLock&) = delete;

 private:
  int fd_ = -1;
};

ojson with_schema(ojson body) {
  ojson out;
  out["schema_version"] = kSchemaVersion;
  for (auto& [k, v] : body.items()) out[k] = v;
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

ProjectConfig ProjectConfig::defaults() {
  ProjectConfig c;
  c.gates.push_back({"mypy", {"mypy", "--no-color-output", "--no-error-summary", "--show-column-numbers"},
                     DiagnosticFormat::GccStyle, Severity::Error});
  c.remote.endpoint = "http://127.0.0.1:8000/v1/chat/completions";
  c.remote.model = "default";
  return c;
}

ProjectConfig ProjectConfig::from_json(const ojson& j) {
  if (!j.is_object()) fail(ErrorCode::InvalidConfig, "config must be a JSON object");
  ProjectConfig c;
  c.workflow_doc = config_path(j, "workflow_doc", c.workflow_doc);
  c.commands_dir = config_path(j, "commands_dir", c.commands_dir);
  try {
    if (j.contains("gates")) {
      for (const auto& g : j.at("gates")) {
        CheckConfig cc;
        cc.name = g.at("name").get<std::string>();
        cc.command = g.at("command").get<std::vector<std::string>>();
        auto fmt = parse_diagnostic_format(g.value("format", "gcc_style"));
        if (!fmt) fail(ErrorCode::InvalidConfig, "gate '" + cc.name + "': format must be gcc_style or json_lines");
        cc.format = *fmt;
        auto th = parse_severity(g.value("threshold", "error"));
        if (!th) fail(ErrorCode::InvalidConfig, "gate '" + cc.name + "': threshold must be error or warning");
        cc.threshold = *th;
        cc.validate();
        c.gates.push_back(std::move(cc));
      }
    }
    if (j.contains("backend")) {
      const auto& b = j.at("backend");
      auto kind = b.value("kind", "remote");
      if (kind == "remote") {
        c.backend = BackendKind::Remote;
      } else if (kind == "scripted") {
        c.backend = BackendKind::Scripted;
        c.transcript = config_path(b, "transcript", "");
        if (c.transcript.empty()) fail(ErrorCode::InvalidConfig, "scripted backend needs a transcript path");
      } else {
        fail(ErrorCode::InvalidConfig, "backend kind must be remote or scripted");
      }
      c.remote.endpoint = b.value("endpoint", c.remote.endpoint);
      c.remote.model = b.value("model", c.remote.model);
      c.remote.token = b.value("token", "");
      c.remote.timeout_seconds = b.value("timeout_seconds", c.remote.timeout_seconds);
      if (c.remote.timeout_seconds < 1) fail(ErrorCode::InvalidConfig, "timeout_seconds must be positive");
    }
    c.max_attempts = j.value("max_attempts", c.max_attempts);
    if (c.max_attempts < 1) fail(ErrorCode::InvalidConfig, "max_attempts must be >= 1");
    auto mcb = j.value("max_context_bytes", static_cast<long long>(0));
    if (mcb < 0) fail(ErrorCode::InvalidConfig, "max_context_bytes must be >= 0");
    c.max_context_bytes = static_cast<size_t>(mcb);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidConfig, std::string("config: ") + e.what());
  }
  return c;
}

ojson ProjectConfig::to_json() const {
  ojson j;
  j["workflow_doc"] = workflow_doc;
  j["commands_dir"] = commands_dir;
  j["gates"] = ojson::array();
  for (const auto& g : gates) {
    j["gates"].push_back({{"name", g.name},
                          {"command", g.command},
                          {"format", to_string(g.format)},
                          {"threshold", to_string(g.threshold)}});
  }
  ojson b;
  b["kind"] = backend == BackendKind::Scripted ? "scripted" : "remote";
  if (backend == BackendKind::Scripted) b["transcript"] = transcript;
  b["endpoint"] = remote.endpoint;
  b["model"] = remote.model;
  b["timeout_seconds"] = remote.timeout_seconds;
  j["backend"] = std::move(b);
  j["max_attempts"] = max_attempts;
  j["max_context_bytes"] = max_context_bytes;
  return j;
}

// ---------------------------------------------------------------------------
// Project

struct Project::View {
  ProjectConfig config;
  std::unique_ptr<Workspace> ws;
  std::unique_ptr<ContextStore> context;
  std::unique_ptr<DataStore> data;
  std::unique_ptr<Session> session;
};

std::unique_ptr<Project::View> Project::load_view(const fs::path& root, Clock& clock) {
  auto v = std::make_unique<Project::View>();
  v->ws = std::make_unique<Workspace>(root);
  auto cfg_text = v->ws->read(kConfigFile);
  if (!cfg_text) fail(ErrorCode::NotAProject, root.string() + " has no " + std::string(kConfigFile));
  try {
    v->config = ProjectConfig::from_json(ojson::parse(*cfg_text));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidConfig, std::string(kConfigFile) + ": " + e.what());
  }
  auto listing = list_commands(*v->ws, v->config.commands_dir);
  if (!listing.failures.empty()) {
    const auto& f = listing.failures.front();
    fail(code_from_name(f.code), f.path + ": " + f.message);
  }
  auto doc = v->ws->read(v->config.workflow_doc);
  if (!doc) fail(ErrorCode::NotFound, "workflow document missing: " + v->config.workflow_doc);
  auto workflow = parse_workflow_doc(*doc, v->config.workflow_doc);
  auto graph = compile_graph(workflow, listing.specs);
  v->context = std::make_unique<ContextStore>(*v->ws, clock);
  v->data = std::make_unique<DataStore>(*v->ws, clock);
  SessionOptions opts{v->config.gates, v->config.max_attempts, v->config.max_context_bytes};
  v->session = std::make_unique<Session>(GatewayEnv{*v->ws, *v->context, *v->data}, clock, std::move(workflow),
                                         std::move(listing.specs), std::move(graph), std::move(opts));
  return v;
}

template <typename F>
auto Project::with_view(Access access, F&& fn) {
  std::lock_guard lock(op_mu_);
  DirLock dir_lock(root_, access == Access::Exclusive);
  auto view = load_view(root_, *clock_);
  view->session->set_listener([this, &view](const SessionEvent&) { publish(*view); });
  struct Publisher {
    Project* p;
    View* v;
    ~Publisher() {
      try {
        p->publish(*v);
      } catch (...) {
      }
    }
  } publisher{this, view.get()};
  return fn(*view);
}

Project::Project(fs::path root, std::shared_ptr<Clock> clock) : root_(std::move(root)), clock_(std::move(clock)) {}
Project::~Project() = default;

std::unique_ptr<Project> Project::open(const fs::path& root, std::shared_ptr<Clock> clock) {
  std::error_code ec;
  auto abs = fs::absolute(root, ec);
  if (ec || !fs::is_regular_file(abs / kConfigFile)) {
    fail(ErrorCode::NotAProject, root.string() + " has no " + std::string(kConfigFile));
  }
  if (!clock) clock = std::make_shared<SystemClock>();
  std::unique_ptr<Project> p(new Project(fs::weakly_canonical(abs), std::move(clock)));
  // Validate eagerly so a broken project fails at open.
  p->with_view(Access::Shared, [](View&) { return 0; });
  return p;
}

ProjectConfig Project::config() const {
  auto text = read_text_file(root_ / kConfigFile);
  try {
    return ProjectConfig::from_json(ojson::parse(text));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidConfig, std::string(kConfigFile) + ": " + e.what());
  }
}

void Project::set_backend_factory(std::function<std::unique_ptr<AgentBackend>(const ProjectConfig&)> factory) {
  std::lock_guard lock(op_mu_);
  backend_factory_ = std::move(factory);
}

void Project::publish(const View& view) {
  auto status = with_schema(view.session->describe());
  std::lock_guard lock(pub_mu_);
  published_status_ = std::move(status);
  published_events_ = view.session->events();
  has_published_ = true;
}

std::unique_ptr<AgentBackend> Project::make_backend(const ProjectConfig& config, View& view) {
  if (backend_factory_) return backend_factory_(config);
  if (config.backend == BackendKind::Scripted) {
    auto text = view.ws->read(config.transcript);
    if (!text) fail(ErrorCode::NotFound, "transcript not found: " + config.transcript);
    size_t cursor = 0;
    if (auto saved = view.ws->read(kCursorFile)) {
      auto j = ojson::parse(*saved, nullptr, false);
      if (j.is_object() && j.value("sha256", "") == sha256_hex(*text)) cursor = j.value("cursor", static_cast<size_t>(0));
    }
    return std::make_unique<ScriptedBackend>(parse_transcript(*text), cursor);
  }
  auto settings = config.remote;
  if (const char* token = std::getenv(kTokenEnv); token && *token) settings.token = token;
  return std::make_unique<RemoteLLMBackend>(settings);
}

ojson Project::run(std::string_view stage) {
  return with_view(Access::Exclusive, [&](View& v) {
    auto backend = make_backend(v.config, v);
    {
      std::lock_guard lock(inflight_mu_);
      inflight_ = backend.get();
    }
    auto save_cursor = [&] {
      {
        std::lock_guard lock(inflight_mu_);
        inflight_ = nullptr;
      }
      auto* scripted = dynamic_cast<ScriptedBackend*>(backend.get());
      if (!scripted || backend_factory_ || v.config.backend != BackendKind::Scripted) return;
      auto text = v.ws->read(v.config.transcript).value_or("");
      ojson j{{"transcript", v.config.transcript}, {"sha256", sha256_hex(text)}, {"cursor", scripted->cursor()}};
      v.ws->write(kCursorFile, j.dump() + "\n");
    };
    try {
      v.session->invoke(stage, *backend);
    } catch (...) {
      save_cursor();
      throw;
    }
    save_cursor();
    auto session = v.session->describe();
    ojson out;
    out["bundle"] = session["pending_review"];
    out["session"] = session;
    return with_schema(std::move(out));
  });
}

ojson Project::review(const ReviewDecision& decision) {
  return with_view(Access::Exclusive, [&](View& v) {
    v.session->submit_review(decision);
    return with_schema({{"session", v.session->describe()}});
  });
}

ojson Project::status() {
  std::unique_lock lock(op_mu_, std::try_to_lock);
  if (!lock.owns_lock()) {
    std::lock_guard pub(pub_mu_);
    if (has_published_) return published_status_;
  } else {
    lock.unlock();
  }
  return with_view(Access::Shared, [&](View& v) { return with_schema(v.session->describe()); });
}

std::string Project::graph(GraphFormat format) {
  return with_view(Access::Shared, [&](View& v) { return export_graph(v.session->observed_graph(), format); });
}

ojson Project::lineage(std::string_view path) {
  return with_view(Access::Shared, [&](View& v) { return with_schema(to_json(v.data->lineage(path))); });
}

ojson Project::verify() {
  return with_view(Access::Shared, [&](View& v) { return with_schema(to_json(v.data->verify_integrity())); });
}

ojson Project::search(std::string_view query) {
  return with_view(Access::Shared, [&](View& v) {
    ojson hits = ojson::array();
    for (const auto& h : v.context->search(query)) hits.push_back(to_json(h));
    return with_schema({{"query", std::string(query)}, {"hits", std::move(hits)}});
  });
}

ojson Project::doc(std::string_view path, std::optional<int> version) {
  return with_view(Access::Shared, [&](View& v) {
    auto content = v.context->read_document(path, version);
    auto doc = v.context->find(*normalize_relative(path));
    ojson versions = ojson::array();
    for (const auto& dv : doc->versions) {
      versions.push_back({{"version", dv.version},
                          {"hash", dv.content_hash},
                          {"created_at", dv.created_at},
                          {"author", to_string(dv.author.kind)},
                          {"stage", dv.author.stage}});
    }
    int shown = version.value_or(doc->head().version);
    ojson refs = ojson::array();
    for (const auto& r : doc->versions[static_cast<size_t>(shown - 1)].refs) {
      refs.push_back({{"target", r.target}, {"anchor", r.anchor}});
    }
    return with_schema({{"path", doc->doc_path},
                        {"version", shown},
                        {"content", content},
                        {"refs", std::move(refs)},
                        {"versions", std::move(versions)}});
  });
}

ojson Project::events(int64_t since) {
  auto render = [since](const std::vector<SessionEvent>& events, int64_t last) {
    ojson list = ojson::array();
    for (const auto& e : events) {
      if (e.seq > since) list.push_back(to_json(e));
    }
    return with_schema({{"events", std::move(list)}, {"last_seq", last}});
  };
  std::unique_lock lock(op_mu_, std::try_to_lock);
  if (!lock.owns_lock()) {
    std::lock_guard pub(pub_mu_);
    if (has_published_) {
      int64_t last = published_events_.empty() ? 0 : published_events_.back().seq;
      return render(published_events_, last);
    }
  } else {
    lock.unlock();
  }
  return with_view(Access::Shared,
                   [&](View& v) { return render(v.session->events(), v.session->state().last_seq); });
}

ojson Project::mark_changed(std::string_view node) {
  return with_view(Access::Exclusive, [&](View& v) {
    auto nodes = stale_set(v.session->graph(), node);
    auto stages = v.session->mark_changed(node);
    return with_schema({{"artifact", std::string(node)},
                        {"stale_nodes", nodes},
                        {"stale_stages", stages},
                        {"session", v.session->describe()}});
  });
}

ojson Project::sync() {
  return with_view(Access::Exclusive, [&](View& v) {
    std::vector<std::string> warnings;
    auto changed = v.session->sync(&warnings);
    return with_schema({{"changed_docs", changed}, {"warnings", warnings}, {"session", v.session->describe()}});
  });
}

ojson Project::ingest(std::optional<std::string> path) {
  return with_view(Access::Exclusive, [&](View& v) {
    ojson records = ojson::array();
    if (path) {
      records.push_back(to_json(v.data->ingest_raw(*path)));
    } else {
      for (const auto& r : v.data->ingest_new_raw()) records.push_back(to_json(r));
    }
    return with_schema({{"records", std::move(records)}});
  });
}

ojson Project::gate() {
  return with_view(Access::Shared, [&](View& v) {
    std::vector<std::string> targets;
    for (const char* dir : {"src", "scripts"}) {
      if (v.ws->is_directory(dir)) targets.push_back(dir);
    }
    CheckReport report;
    if (!v.config.gates.empty() && !targets.empty()) report = run_checks(v.config.gates, v.ws->root(), targets);
    auto result = gate_status(report.diagnostics, v.config.gates);
    ojson diags = ojson::array(), runs = ojson::array();
    for (const auto& d : report.diagnostics) diags.push_back(to_json(d));
    for (const auto& r : report.runs) runs.push_back(to_json(r));
    return with_schema({{"targets", targets},
                        {"pass", result.pass},
                        {"blocking", to_json(result)["blocking"]},
                        {"diagnostics", std::move(diags)},
                        {"runs", std::move(runs)}});
  });
}

ojson Project::replay(std::string_view transcript_text, std::string_view decisions_text) {
  auto entries = parse_transcript(transcript_text);
  auto decisions = parse_decisions(decisions_text);
  return with_view(Access::Exclusive, [&](View& v) {
    ScriptedBackend backend(std::move(entries));
    {
      std::lock_guard lock(inflight_mu_);
      inflight_ = &backend;
    }
    struct Clear {
      Project* p;
      ~Clear() {
        std::lock_guard lock(p->inflight_mu_);
        p->inflight_ = nullptr;
      }
    } clear{this};
    v.session->replay(backend, decisions);
    return with_schema(v.session->describe());
  });
}

void Project::cancel() {
  std::lock_guard lock(inflight_mu_);
  if (inflight_) inflight_->cancel();
}

}  // namespace specflow
