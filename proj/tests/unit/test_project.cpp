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


#include <atomic>
#include <chrono>
#include <condition_variable>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "specflow/error.hpp"
#include "specflow/project.hpp"
#include "specflow/workspace.hpp"
#include "test_support.hpp"

using namespace specflow;
using testsupport::slurp;
using testsupport::spit;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Ok;
}

ojson cfg_with(const char* key, ojson value) {
  auto j = ProjectConfig::defaults().to_json();
  j[key] = std::move(value);
  return j;
}

// Blocks in execute until released; lets a test observe a long run.
class GateBackend final : public AgentBackend {
 public:
  GateBackend(std::mutex& mu, std::condition_variable& cv, bool& entered, bool& release)
      : mu_(mu), cv_(cv), entered_(entered), release_(release) {}
  AgentResponse execute(const AgentRequest&) override {
    std::unique_lock lock(mu_);
    entered_ = true;
    cv_.notify_all();
    cv_.wait(lock, [&] { return release_; });
    AgentResponse r;
    r.doc_writes = {{"docs/02-raw-data-analysis.md", "slow\n"}};
    return r;
  }

 private:
  std::mutex& mu_;
  std::condition_variable& cv_;
  bool& entered_;
  bool& release_;
};

}  // namespace

TEST_SUITE("project") {
  TEST_CASE("default config round trips") {
    auto d = ProjectConfig::defaults();
    auto back = ProjectConfig::from_json(d.to_json());
    CHECK(back.to_json() == d.to_json());
    CHECK(d.backend == BackendKind::Remote);
    REQUIRE(d.gates.size() == 1);
    CHECK(d.gates[0].command.front() == "mypy");
  }

  TEST_CASE("config validation") {
    CHECK(code_of([] { ProjectConfig::from_json(ojson::array()); }) == ErrorCode::InvalidConfig);
    CHECK(code_of([] { ProjectConfig::from_json(cfg_with("workflow_doc", "../x.md")); }) == ErrorCode::InvalidConfig);
    CHECK(code_of([] { ProjectConfig::from_json(cfg_with("commands_dir", 3)); }) == ErrorCode::InvalidConfig);
    CHECK(code_of([] { ProjectConfig::from_json(cfg_with("max_attempts", 0)); }) == ErrorCode::InvalidConfig);
    CHECK(code_of([] { ProjectConfig::from_json(cfg_with("max_context_bytes", -1)); }) == ErrorCode::InvalidConfig);
    CHECK(code_of([] {
            ProjectConfig::from_json(cfg_with("gates", ojson::array({{{"name", "g"}, {"command", ojson::array()}}})));
          }) == ErrorCode::InvalidConfig);
    CHECK(code_of([] {
            ProjectConfig::from_json(cfg_with(
                "gates", ojson::array({{{"name", "g"}, {"command", {"x"}}, {"format", "xml"}}})));
          }) == ErrorCode::InvalidConfig);
    CHECK(code_of([] { ProjectConfig::from_json(cfg_with("backend", {{"kind", "scripted"}})); }) ==
          ErrorCode::InvalidConfig);
    CHECK(code_of([] { ProjectConfig::from_json(cfg_with("backend", {{"kind", "magic"}})); }) ==
          ErrorCode::InvalidConfig);
    auto ok = ProjectConfig::from_json(cfg_with("backend", {{"kind", "scripted"}, {"transcript", "t.jsonl"}}));
    CHECK(ok.backend == BackendKind::Scripted);
    CHECK(ok.transcript == "t.jsonl");
  }

  TEST_CASE("scaffold layout and refusal") {
    testsupport::TempDir dir;
    auto created = scaffold(dir.path() / "new");
    for (const auto& p : {"data/raw/", "data/processed/", "data/output/", "docs/", "src/", "commands/", "WORKFLOW.md",
                          "docs/01-basic-information.md", "specflow.json"}) {
      CHECK(std::find(created.begin(), created.end(), p) != created.end());
    }
    CHECK(std::filesystem::exists(dir.path() / "new/commands/gradio-app.md"));
    CHECK(code_of([&] { scaffold(dir.path() / "new"); }) == ErrorCode::NonEmptyTarget);
    spit(dir.path() / "file", "x");
    CHECK(code_of([&] { scaffold(dir.path() / "file"); }) == ErrorCode::NonEmptyTarget);
    std::filesystem::create_directories(dir.path() / "empty");
    CHECK_NOTHROW(scaffold(dir.path() / "empty"));
  }

  TEST_CASE("open errors") {
    testsupport::TempDir dir;
    CHECK(code_of([&] { Project::open(dir.path()); }) == ErrorCode::NotAProject);
    auto root = dir.path() / "p";
    scaffold(root);
    spit(root / "specflow.json", "{bad");
    CHECK(code_of([&] { Project::open(root); }) == ErrorCode::InvalidConfig);
    spit(root / "specflow.json", ProjectConfig::defaults().to_json().dump());
    std::filesystem::remove(root / "WORKFLOW.md");
    CHECK(code_of([&] { Project::open(root); }) == ErrorCode::NotFound);
    spit(root / "WORKFLOW.md", "# nothing\n");
    CHECK(code_of([&] { Project::open(root); }) == ErrorCode::NoWorkflowSection);
    spit(root / "WORKFLOW.md", canonical_workflow_doc());
    spit(root / "commands/broken.md", "no front matter\n");
    CHECK(code_of([&] { Project::open(root); }) == ErrorCode::MissingFrontMatter);
  }

  TEST_CASE("every response carries the schema version first") {
    testsupport::TempDir dir;
    auto root = dir.path() / "p";
    testsupport::make_canonical_project(root, true);
    auto p = Project::open(root);
    for (const auto& j : {p->status(), p->verify(), p->events(0), p->sync(), p->gate(), p->ingest(std::nullopt)}) {
      CHECK(j.begin().key() == "schema_version");
      CHECK(j["schema_version"] == kSchemaVersion);
    }
  }

  TEST_CASE("scripted runs resume across opens") {
    testsupport::TempDir dir;
    auto root = dir.path() / "p";
    testsupport::make_canonical_project(root, true);
    {
      auto p = Project::open(root);
      auto out = p->run("raw-data-analysis");
      CHECK(out["bundle"]["stage"] == "raw-data-analysis");
      CHECK(code_of([&] { p->run("preprocess"); }) == ErrorCode::ReviewPending);
      p->review(ReviewDecision::approve());
    }
    {
      auto p = Project::open(root);
      auto out = p->run("preprocess");
      CHECK(out["bundle"]["stage"] == "preprocess");
      p->review(ReviewDecision::approve());
      auto cursor = ojson::parse(slurp(root / ".specflow/session/scripted_cursor.json"));
      CHECK(cursor["cursor"] == 2);
    }
    // Editing the transcript restarts it.
    auto text = slurp(root / "transcript.jsonl");
    spit(root / "transcript.jsonl", text + "\n");
    auto p = Project::open(root);
    CHECK(code_of([&] { p->run("research-plan"); }) == ErrorCode::TranscriptMismatch);
    CHECK(p->status()["recommended_next"] == "research-plan");
  }

  TEST_CASE("docs, search, lineage and verify after replay") {
    testsupport::TempDir dir;
    auto root = dir.path() / "p";
    testsupport::make_canonical_project(root);
    auto p = Project::open(root);
    auto res = testsupport::resource_dir() / "canonical";
    auto out = p->replay(slurp(res / "transcript.jsonl"), slurp(res / "decisions"));
    CHECK(out["complete"] == true);

    auto d = p->doc("docs/06-implementation-log.md", std::nullopt);
    CHECK(d["version"] == 2);
    CHECK(d["versions"].size() == 2);
    CHECK(d["versions"][0]["author"] == "agent");
    CHECK(p->doc("docs/06-implementation-log.md", 1)["content"] != d["content"]);
    CHECK(code_of([&] { p->doc("docs/06-implementation-log.md", 9); }) == ErrorCode::NoSuchVersion);
    CHECK(code_of([&] { p->doc("docs/none.md", std::nullopt); }) == ErrorCode::NotFound);

    auto hits = p->search("boston");
    CHECK_FALSE(hits["hits"].empty());
    CHECK(code_of([&] { p->search(" "); }) == ErrorCode::EmptyQuery);

    auto lin = p->lineage("data/output/results/metrics.json");
    std::set<std::string> nodes;
    for (const auto& n : lin["nodes"]) nodes.insert(n.get<std::string>());
    std::set<std::string> expected = {"data/output/results/metrics.json", "data/processed/train.csv",
                                      "data/raw/boston.csv"};
    CHECK(nodes == expected);
    CHECK(code_of([&] { p->lineage("data/processed/none.csv"); }) == ErrorCode::NotRegistered);

    CHECK(p->verify()["ok"] == true);
    std::filesystem::permissions(root / "data/processed/train.csv", std::filesystem::perms::owner_write,
                                 std::filesystem::perm_options::add);
    spit(root / "data/processed/train.csv", "tampered\n");
    auto v = p->verify();
    CHECK(v["ok"] == false);

    auto g = ojson::parse(p->graph(GraphFormat::Json));
    CHECK(g["nodes"].size() > 0);
    CHECK(p->gate()["pass"] == true);
  }

  TEST_CASE("mark_changed and sync through the project") {
    testsupport::TempDir dir;
    auto root = dir.path() / "p";
    testsupport::make_canonical_project(root);
    auto p = Project::open(root);
    auto res = testsupport::resource_dir() / "canonical";
    p->replay(slurp(res / "transcript.jsonl"), slurp(res / "decisions"));
    auto m = p->mark_changed("docs/09-experiment-report.md");
    CHECK(m["stale_stages"] == ojson::array({"research-report", "gradio-app"}));
    CHECK(code_of([&] { p->mark_changed("nope"); }) == ErrorCode::UnknownNode);
    spit(root / "docs/02-raw-data-analysis.md", "hand edit\n");
    auto s = p->sync();
    CHECK(s["changed_docs"] == ojson::array({"docs/02-raw-data-analysis.md"}));
  }

  TEST_CASE("status stays readable during a long run") {
    testsupport::TempDir dir;
    auto root = dir.path() / "p";
    testsupport::make_canonical_project(root);
    auto p = Project::open(root);
    std::mutex mu;
    std::condition_variable cv;
    bool entered = false, release = false;
    p->set_backend_factory(
        [&](const ProjectConfig&) { return std::make_unique<GateBackend>(mu, cv, entered, release); });
    std::thread runner([&] { p->run("raw-data-analysis"); });
    {
      std::unique_lock lock(mu);
      cv.wait(lock, [&] { return entered; });
    }
    auto start = std::chrono::steady_clock::now();
    auto st = p->status();
    CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(1));
    CHECK(st["stages"][0]["state"] == "running");
    auto ev = p->events(0);
    CHECK(ev["events"].back()["kind"] == "invoked");
    {
      std::lock_guard lock(mu);
      release = true;
    }
    cv.notify_all();
    runner.join();
    CHECK(p->status()["pending_review"]["stage"] == "raw-data-analysis");
  }

  TEST_CASE("cancel aborts a remote call") {
    testsupport::TempDir dir;
    auto root = dir.path() / "p";
    testsupport::make_canonical_project(root);
    httplib::Server svr;
    std::atomic<bool> done{false};
    svr.Post("/slow", [&](const httplib::Request&, httplib::Response& res) {
      for (int i = 0; i < 500 && !done; ++i) std::this_thread::sleep_for(std::chrono::milliseconds(10));
      res.set_content("{}", "application/json");
    });
    int port = svr.bind_to_any_port("127.0.0.1");
    std::thread server([&] { svr.listen_after_bind(); });
    svr.wait_until_ready();

    auto cfg = ojson::parse(slurp(root / "specflow.json"));
    cfg["backend"]["endpoint"] = "http://127.0.0.1:" + std::to_string(port) + "/slow";
    spit(root / "specflow.json", cfg.dump(2));
    auto p = Project::open(root);
    ErrorCode code = ErrorCode::Ok;
    std::thread runner([&] { code = code_of([&] { p->run("raw-data-analysis"); }); });
    std::this_thread::sleep_for(std::chrono::milliseconds(300));
    p->cancel();
    runner.join();
    CHECK(code == ErrorCode::BackendError);
    CHECK(p->status()["stages"][0]["state"] == "pending");
    done = true;
    svr.stop();
    server.join();
  }
}
