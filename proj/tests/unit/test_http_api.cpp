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


#include "doctest.h"
#include "httplib.h"
#include "specflow/api_server.hpp"
#include "specflow/codec.hpp"
#include "specflow/error.hpp"
#include "specflow/project.hpp"
#include "test_support.hpp"

using namespace specflow;
using testsupport::slurp;
using testsupport::spit;

namespace {

struct Served {
  testsupport::TempDir dir;
  std::filesystem::path root = dir.path() / "p";
  std::unique_ptr<Project> project;
  std::unique_ptr<ApiServer> server;
  std::unique_ptr<httplib::Client> client;

  explicit Served(bool scripted = true, std::string static_dir = {}) {
    testsupport::make_canonical_project(root, scripted);
    project = Project::open(root);
    server = std::make_unique<ApiServer>(*project, std::move(static_dir));
    int port = server->start("127.0.0.1", 0);
    client = std::make_unique<httplib::Client>("127.0.0.1", port);
  }
  ~Served() { server->stop(); }

  ojson get(const std::string& path, int expect = 200) {
    auto r = client->Get(path);
    REQUIRE(r);
    CHECK_MESSAGE(r->status == expect, path, " -> ", r->body);
    return ojson::parse(r->body);
  }
  ojson post(const std::string& path, const std::string& body, int expect = 200) {
    auto r = client->Post(path, body, "application/json");
    REQUIRE(r);
    CHECK_MESSAGE(r->status == expect, path, " -> ", r->body);
    return ojson::parse(r->body);
  }
};

void check_error(const ojson& j, ErrorCode code) {
  CHECK(j["schema_version"] == kSchemaVersion);
  CHECK(j["error"]["code"] == static_cast<int>(code));
  CHECK(j["error"]["name"] == std::string(error_code_name(code)));
}

}  // namespace

TEST_SUITE("http_api") {
  TEST_CASE("status code mapping") {
    CHECK(http_status_for(ErrorCode::NotFound) == 404);
    CHECK(http_status_for(ErrorCode::UnknownStage) == 404);
    CHECK(http_status_for(ErrorCode::ReviewPending) == 409);
    CHECK(http_status_for(ErrorCode::GateBlocking) == 409);
    CHECK(http_status_for(ErrorCode::EmptyFeedback) == 422);
    CHECK(http_status_for(ErrorCode::BackendError) == 502);
    CHECK(http_status_for(ErrorCode::Internal) == 500);
  }

  TEST_CASE("session on a fresh project") {
    Served s;
    auto j = s.get("/session");
    CHECK(j.begin().key() == "schema_version");
    REQUIRE(j["stages"].size() == 8);
    for (const auto& st : j["stages"]) CHECK(st["state"] == "pending");
    CHECK(j["recommended_next"] == "raw-data-analysis");
    CHECK(j["pending_review"].is_null());
  }

  TEST_CASE("review with nothing pending is a conflict") {
    Served s;
    check_error(s.post("/review", R"({"decision":"approve"})", 409), ErrorCode::NoPendingReview);
  }

  TEST_CASE("invoke, events and review") {
    Served s;
    auto inv = s.post("/invoke", R"({"stage":"raw-data-analysis"})");
    CHECK(inv["bundle"]["stage"] == "raw-data-analysis");
    check_error(s.post("/invoke", R"({"stage":"preprocess"})", 409), ErrorCode::ReviewPending);
    auto ev = s.get("/events?since=0");
    std::vector<std::string> kinds;
    for (const auto& e : ev["events"]) kinds.push_back(e["kind"]);
    CHECK(kinds.front() == "invoked");
    CHECK(kinds.back() == "presented");
    int64_t last = ev["last_seq"];
    CHECK(s.get("/events?since=" + std::to_string(last))["events"].empty());

    check_error(s.post("/review", R"({"decision":"revise","feedback":" "})", 422), ErrorCode::EmptyFeedback);
    auto rev = s.post("/review", R"({"decision":"approve"})");
    CHECK(rev["session"]["recommended_next"] == "preprocess");

    auto doc = s.get("/docs/02-raw-data-analysis.md");
    CHECK(doc["version"] == 1);
    CHECK(doc["refs"][0]["target"] == "data/raw/boston.csv");
    check_error(s.get("/docs/02-raw-data-analysis.md?version=7", 404), ErrorCode::NoSuchVersion);
    check_error(s.get("/docs/99-none.md", 404), ErrorCode::NotFound);

    auto hits = s.get("/search?q=MEDV");
    CHECK(hits["hits"][0]["path"] == "docs/02-raw-data-analysis.md");
    check_error(s.get("/search?q=", 422), ErrorCode::EmptyQuery);
  }

  TEST_CASE("bad requests") {
    Served s;
    check_error(s.post("/invoke", "not json", 422), ErrorCode::ParseFailure);
    check_error(s.post("/invoke", "[1]", 422), ErrorCode::ParseFailure);
    check_error(s.post("/invoke", "{}", 422), ErrorCode::InvalidArgument);
    check_error(s.post("/invoke", R"({"stage":"bogus"})", 404), ErrorCode::UnknownStage);
    check_error(s.post("/review", R"({"decision":"maybe"})", 422), ErrorCode::InvalidArgument);
    check_error(s.post("/mark-changed", R"({"artifact":"nope"})", 404), ErrorCode::UnknownNode);
    check_error(s.get("/lineage/data/raw/boston.csv", 404), ErrorCode::NotRegistered);
    check_error(s.get("/graph?format=svg", 422), ErrorCode::InvalidArgument);
    check_error(s.get("/events?since=abc", 422), ErrorCode::InvalidArgument);
    auto r = s.client->Get("/no/such/route");
    REQUIRE(r);
    CHECK(r->status == 404);
  }

  TEST_CASE("graph, lineage, verify, mark-changed and sync") {
    Served s;
    auto res = testsupport::resource_dir() / "canonical";
    s.project->replay(slurp(res / "transcript.jsonl"), slurp(res / "decisions"));

    auto g = s.get("/graph");
    CHECK(g["schema_version"] == kSchemaVersion);
    auto round = graph_from_json(dump_json(g));
    CHECK(round.nodes().size() == g["nodes"].size());
    auto dot = s.client->Get("/graph?format=dot");
    REQUIRE(dot);
    CHECK(dot->get_header_value("Content-Type").find("graphviz") != std::string::npos);
    CHECK(dot->body.rfind("digraph", 0) == 0);

    auto lin = s.get("/lineage/data/output/results/metrics.json");
    CHECK(lin["nodes"].size() == 3);
    CHECK(s.get("/verify")["ok"] == true);

    auto m = s.post("/mark-changed", R"({"artifact":"docs/05-research-plan.md"})");
    CHECK(m["stale_stages"][0] == "code-implementation");
    spit(s.root / "docs/10-research-report.md", "edited\n");
    auto sy = s.post("/sync", "");
    CHECK(sy["changed_docs"] == ojson::array({"docs/10-research-report.md"}));
    CHECK(s.post("/cancel", "")["cancelled"] == true);
  }

  TEST_CASE("CORS and preflight") {
    Served s;
    auto r = s.client->Options("/invoke");
    REQUIRE(r);
    CHECK(r->status == 204);
    CHECK(r->get_header_value("Access-Control-Allow-Origin") == "*");
    auto g = s.client->Get("/session");
    CHECK(g->get_header_value("Access-Control-Allow-Origin") == "*");
  }

  TEST_CASE("static files") {
    testsupport::TempDir ui;
    spit(ui.path() / "index.html", "<html>ok</html>");
    Served s(true, ui.path().string());
    auto r = s.client->Get("/ui/index.html");
    REQUIRE(r);
    CHECK(r->status == 200);
    CHECK(r->body == "<html>ok</html>");
  }

  TEST_CASE("backend failures map to 502") {
    Served s(false);  // remote backend with nothing listening
    auto cfg = ojson::parse(slurp(s.root / "specflow.json"));
    cfg["backend"]["endpoint"] = "http://127.0.0.1:1/v1/chat/completions";
    cfg["backend"]["timeout_seconds"] = 2;
    spit(s.root / "specflow.json", cfg.dump(2));
    check_error(s.post("/invoke", R"({"stage":"raw-data-analysis"})", 502), ErrorCode::BackendError);
    CHECK(s.get("/session")["stages"][0]["state"] == "pending");
  }
}
