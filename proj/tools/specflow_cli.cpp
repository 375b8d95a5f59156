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


// Command-line front end. Links only the C API.

#include <pthread.h>
#include <signal.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "specflow/specflow.h"

namespace {

constexpr int kUsageExit = 64;

using ojson = nlohmann::ordered_json;

struct Owned {
  char* p = nullptr;
  ~Owned() { sf_free(p); }
  std::string str() const { return p ? p : ""; }
};

int report(sf_status rc) {
  std::cerr << "specflow: " << sf_error_name(rc) << ": " << sf_last_error_message() << "\n";
  return static_cast<int>(rc);
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

std::string exit_code_help() {
  std::string text = "Exit status:\n  0 success, 64 usage error, otherwise one of:\n";
  for (int c = 1; c <= SF_INTERNAL; ++c) {
    text += "  " + std::to_string(c) + " " + sf_error_name(c) + "\n";
  }
  return text;
}

void print_status(const std::string& json) {
  auto j = ojson::parse(json);
  std::printf("%-22s %-19s %-8s %s\n", "STAGE", "STATE", "OUTPUTS", "GATE");
  for (const auto& s : j["stages"]) {
    std::string gate = "-";
    if (s.value("gates_applicable", false) && s.contains("last_gate") && !s["last_gate"].is_null()) {
      gate = s["last_gate"].value("pass", false) ? "pass" : "fail";
    }
    std::string name = s.value("name", "");
    if (s.value("optional", false)) name += " (opt)";
    std::printf("%-22s %-19s %-8s %s\n", name.c_str(), s.value("state", "").c_str(), s.value("freshness", "").c_str(),
                gate.c_str());
  }
  if (j.contains("pending_review") && !j["pending_review"].is_null()) {
    std::printf("\nawaiting review: %s\n", j["pending_review"].value("stage", "").c_str());
  }
  if (j.value("complete", false)) {
    std::printf("\nworkflow complete\n");
  } else if (j.contains("recommended_next") && j["recommended_next"].is_string()) {
    std::printf("\nnext: %s\n", j["recommended_next"].get<std::string>().c_str());
  }
}

void print_bundle(const std::string& json) {
  auto j = ojson::parse(json);
  const auto& b = j["bundle"];
  if (b.is_null()) return;
  std::printf("%s (attempt %d)\n", b.value("stage", "").c_str(), b.value("attempt", 0));
  if (!b.value("narration", "").empty()) std::printf("\n%s\n", b.value("narration", "").c_str());
  if (!b["changes"].empty()) std::printf("\nchanges:\n");
  for (const auto& c : b["changes"]) {
    std::printf("  %-10s %s\n", c.value("kind", "").c_str(), c.value("path", "").c_str());
  }
  if (!b["gate_result"].is_null()) {
    std::printf("\ngate: %s\n", b["gate_result"].value("pass", false) ? "pass" : "fail");
    for (const auto& d : b["gate_result"]["blocking"]) {
      std::printf("  %s:%d: %s\n", d.value("file", "").c_str(), d.value("line", 0), d.value("message", "").c_str());
    }
  }
  if (!b.value("converged", true)) std::printf("\nrepair attempts exhausted\n");
  for (const auto& w : b["warnings"]) std::printf("warning: %s\n", w.get<std::string>().c_str());
  std::printf("\nawaiting review: approve, revise -m <feedback> or skip\n");
}

class ProjectHandle {
 public:
  ~ProjectHandle() { sf_close(p_); }
  sf_status open(const std::string& dir) { return sf_open(dir.c_str(), &p_); }
  sf_project* get() const { return p_; }

 private:
  sf_project* p_ = nullptr;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"specflow: staged, reviewable research workflows"};
  app.footer(exit_code_help());
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(sf_version()));

  std::string dir = ".";
  app.add_option("-C,--project", dir, "Project directory")->capture_default_str();

  std::string stage, feedback, format = "text", path, query, host = "127.0.0.1", static_dir, transcript,
                      decisions_file, node;
  int port = 8765, version = 0;
  int64_t since = 0;
  bool as_json = false;

  auto* init = app.add_subcommand("init", "Scaffold a new project");
  std::string init_dir;
  init->add_option("dir", init_dir, "Target directory (empty or absent)")->required();

  auto* run = app.add_subcommand("run", "Invoke a stage");
  run->add_option("stage", stage, "Stage name")->required();
  run->add_flag("--json", as_json, "Print JSON");

  auto* review = app.add_subcommand("review", "Decide on the pending review");
  review->require_subcommand(1);
  auto* approve = review->add_subcommand("approve", "Accept the stage outputs");
  auto* revise = review->add_subcommand("revise", "Request another pass");
  revise->add_option("-m,--message", feedback, "Feedback for the agent")->required();
  auto* skip = review->add_subcommand("skip", "Skip the stage");
  review->add_flag("--json", as_json, "Print JSON");
  for (auto* sub : {approve, revise, skip}) sub->add_flag("--json", as_json, "Print JSON");

  auto* status = app.add_subcommand("status", "Show stage states");
  status->add_flag("--json", as_json, "Print JSON");

  auto* graph = app.add_subcommand("graph", "Export the dependency graph");
  std::string graph_format = "dot";
  graph->add_option("--format", graph_format, "dot or json")
      ->check(CLI::IsMember({"dot", "json"}))
      ->capture_default_str();

  auto* lineage = app.add_subcommand("lineage", "Trace an artifact back to raw data");
  lineage->add_option("path", path, "Artifact path")->required();

  auto* verify = app.add_subcommand("verify", "Check registered data hashes");

  auto* search = app.add_subcommand("search", "Search context documents");
  search->add_option("query", query, "Case-insensitive text")->required();

  auto* doc = app.add_subcommand("doc", "Print a context document version");
  doc->add_option("path", path, "Document path under docs/")->required();
  doc->add_option("--version", version, "Version (default head)");
  bool doc_raw = false;
  doc->add_flag("--raw", doc_raw, "Print only the content");

  auto* events = app.add_subcommand("events", "Print session events");
  events->add_option("--since", since, "Only events after this sequence number");

  auto* mark = app.add_subcommand("mark-changed", "Treat an artifact as changed");
  mark->add_option("artifact", node, "Graph node id")->required();

  auto* sync = app.add_subcommand("sync", "Record edits made to docs/ on disk");

  auto* ingest = app.add_subcommand("ingest", "Register raw data files");
  ingest->add_option("path", path, "File under data/raw/ (default: all new files)");

  auto* gate = app.add_subcommand("gate", "Run the quality gates on code directories");

  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port, "0 picks a free port")->capture_default_str();
  serve->add_option("--static", static_dir, "Directory served at /ui");

  auto* replay = app.add_subcommand("replay", "Re-run a recorded session");
  replay->add_option("--transcript", transcript, "Transcript file (JSON lines)")->required();
  replay->add_option("--decisions", decisions_file, "Decisions file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageExit;
  }

  Owned out;
  auto print_out = [&] {
    std::cout << out.str();
    if (!out.str().empty() && out.str().back() != '\n') std::cout << "\n";
    return 0;
  };

  if (init->parsed()) {
    if (auto rc = sf_init(init_dir.c_str(), &out.p)) return report(rc);
    return print_out();
  }

  ProjectHandle project;
  if (auto rc = project.open(dir)) return report(rc);
  sf_project* p = project.get();

  sf_status rc = SF_OK;
  if (run->parsed()) {
    rc = sf_run(p, stage.c_str(), &out.p);
    if (rc == SF_OK && !as_json) {
      print_bundle(out.str());
      return 0;
    }
  } else if (approve->parsed()) {
    rc = sf_review(p, "approve", nullptr, &out.p);
  } else if (revise->parsed()) {
    rc = sf_review(p, "revise", feedback.c_str(), &out.p);
  } else if (skip->parsed()) {
    rc = sf_review(p, "skip", nullptr, &out.p);
  }
  if ((approve->parsed() || revise->parsed() || skip->parsed()) && rc == SF_OK && !as_json) {
    print_status(ojson::parse(out.str())["session"].dump());
    return 0;
  }
  if (status->parsed()) {
    rc = sf_status_json(p, &out.p);
    if (rc == SF_OK && !as_json) {
      print_status(out.str());
      return 0;
    }
  } else if (graph->parsed()) {
    rc = sf_graph(p, graph_format.c_str(), &out.p);
  } else if (lineage->parsed()) {
    rc = sf_lineage(p, path.c_str(), &out.p);
  } else if (verify->parsed()) {
    // Findings are data, not failure: exit 0 and let the caller read "ok".
    rc = sf_verify(p, &out.p);
  } else if (search->parsed()) {
    rc = sf_search(p, query.c_str(), &out.p);
  } else if (doc->parsed()) {
    rc = sf_doc(p, path.c_str(), version, &out.p);
    if (rc == SF_OK && doc_raw) {
      std::cout << ojson::parse(out.str())["content"].get<std::string>();
      return 0;
    }
  } else if (events->parsed()) {
    rc = sf_events(p, since, &out.p);
  } else if (mark->parsed()) {
    rc = sf_mark_changed(p, node.c_str(), &out.p);
  } else if (sync->parsed()) {
    rc = sf_sync(p, &out.p);
  } else if (ingest->parsed()) {
    rc = sf_ingest(p, path.empty() ? nullptr : path.c_str(), &out.p);
  } else if (gate->parsed()) {
    rc = sf_gate(p, &out.p);
  } else if (replay->parsed()) {
    std::string t, d;
    if (!read_file(transcript, t)) {
      std::cerr << "specflow: cannot read " << transcript << "\n";
      return SF_NOT_FOUND;
    }
    if (!read_file(decisions_file, d)) {
      std::cerr << "specflow: cannot read " << decisions_file << "\n";
      return SF_NOT_FOUND;
    }
    rc = sf_replay(p, t.c_str(), d.c_str(), &out.p);
  } else if (serve->parsed()) {
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);
    sf_server* server = nullptr;
    rc = sf_serve_start(p, host.c_str(), port, static_dir.empty() ? nullptr : static_dir.c_str(), &server);
    if (rc) return report(rc);
    std::cout << "listening on http://" << host << ":" << sf_server_port(server) << std::endl;
    std::thread waiter([&] {
      int sig = 0;
      sigwait(&set, &sig);
      sf_server_stop(server);
    });
    sf_server_wait(server);
    waiter.join();
    sf_server_free(server);
    return 0;
  }
  if (rc) return report(rc);
  return print_out();
}
