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


#include <functional>
#include <map>
#include <set>

#include "doctest.h"
#include "specflow/data_store.hpp"
#include "specflow/error.hpp"
#include "specflow/workspace.hpp"
#include "test_support.hpp"

using namespace specflow;
using testsupport::spit;

namespace {

struct Fixture {
  testsupport::TempDir dir;
  Workspace ws{dir.path()};
  FixedClock clock;
  DataStore store{ws, clock};

  void put(const std::string& rel, const std::string& content) { spit(dir.path() / rel, content); }

  // boston.csv -> train.csv -> metrics.json
  void chain() {
    put("data/raw/boston.csv", "CRIM,MEDV\n0.006,24\n");
    store.ingest_raw("data/raw/boston.csv");
    put("data/processed/train.csv", "CRIM,MEDV\n0.006,24\n");
    store.register_derived("data/processed/train.csv", {"data/raw/boston.csv"}, "preprocess",
                           "docs/03-preprocess-plan.md");
    put("data/output/results/metrics.json", "{}");
    store.register_derived("data/output/results/metrics.json", {"data/processed/train.csv"}, "run-experiments",
                           "docs/05-research-plan.md");
  }
};

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Ok;
}

}  // namespace

TEST_SUITE("data_store") {
  TEST_CASE("raw ingest") {
    Fixture f;
    f.put("data/raw/boston.csv", "a,b\n1,2\n");
    auto r = f.store.ingest_raw("data/raw/boston.csv");
    CHECK(r.tier == Tier::Raw);
    CHECK(r.sources.empty());
    CHECK_FALSE(r.produced_by);
    CHECK(r.content_hash == sha256_hex("a,b\n1,2\n"));
    CHECK(f.store.ingest_raw("data/raw/boston.csv") == r);
    CHECK(f.store.records().size() == 1);
  }

  TEST_CASE("raw ingest errors") {
    Fixture f;
    f.put("data/processed/x.csv", "x");
    CHECK(code_of([&] { f.store.ingest_raw("data/processed/x.csv"); }) == ErrorCode::WrongTierPath);
    CHECK(code_of([&] { f.store.ingest_raw("data/raw/missing.csv"); }) == ErrorCode::NotFound);
    f.put("data/raw/a.csv", "one");
    f.store.ingest_raw("data/raw/a.csv");
    std::filesystem::permissions(f.dir.path() / "data/raw/a.csv", std::filesystem::perms::owner_write,
                                 std::filesystem::perm_options::add);
    f.put("data/raw/a.csv", "two");
    CHECK(code_of([&] { f.store.ingest_raw("data/raw/a.csv"); }) == ErrorCode::AlreadyRegistered);
  }

  TEST_CASE("derived registration and errors") {
    Fixture f;
    f.chain();
    auto train = f.store.find("data/processed/train.csv");
    REQUIRE(train);
    CHECK(train->produced_by == std::optional<std::string>("preprocess"));
    CHECK(train->transformation_ref == std::optional<std::string>("docs/03-preprocess-plan.md"));

    f.put("data/processed/y.csv", "y");
    CHECK(code_of([&] { f.store.register_derived("data/processed/y.csv", {"data/raw/ghost.csv"}, "s", std::nullopt); }) ==
          ErrorCode::UnknownSource);
    CHECK(code_of([&] { f.store.register_derived("data/raw/z.csv", {}, "s", std::nullopt); }) == ErrorCode::RawTierWrite);
    CHECK(code_of([&] { f.store.register_derived("docs/y.csv", {}, "s", std::nullopt); }) == ErrorCode::WrongTierPath);
    CHECK(code_of([&] { f.store.register_derived("data/processed/none.csv", {}, "s", std::nullopt); }) ==
          ErrorCode::NotFound);
    CHECK(code_of([&] {
            f.store.register_derived("data/processed/y.csv", {"data/output/results/metrics.json"}, "s", std::nullopt);
          }) == ErrorCode::TierViolation);
    CHECK(code_of([&] { f.store.register_derived("data/processed/y.csv", {"data/processed/y.csv"}, "s", std::nullopt); }) ==
          ErrorCode::CycleDetected);
    CHECK(code_of([&] { f.store.register_derived("data/processed/y.csv", {}, "s", std::string("src/a.py")); }) ==
          ErrorCode::InvalidRef);
  }

  TEST_CASE("re-registration cannot introduce a cycle") {
    Fixture f;
    f.put("data/processed/a.csv", "a");
    f.put("data/processed/b.csv", "b");
    f.store.register_derived("data/processed/a.csv", {}, "s", std::nullopt);
    f.store.register_derived("data/processed/b.csv", {"data/processed/a.csv"}, "s", std::nullopt);
    CHECK(code_of([&] { f.store.register_derived("data/processed/a.csv", {"data/processed/b.csv"}, "s", std::nullopt); }) ==
          ErrorCode::CycleDetected);
  }

  TEST_CASE("lineage of the fixture chain") {
    Fixture f;
    f.chain();
    auto t = f.store.lineage("data/output/results/metrics.json");
    REQUIRE(t.edges.size() == 2);
    CHECK(t.edges[0] == LineageEdge{"data/output/results/metrics.json", "data/processed/train.csv",
                                    std::string("docs/05-research-plan.md")});
    CHECK(t.edges[1] == LineageEdge{"data/processed/train.csv", "data/raw/boston.csv",
                                    std::string("docs/03-preprocess-plan.md")});
    CHECK(f.store.lineage("data/raw/boston.csv").edges.empty());
    CHECK(code_of([&] { f.store.lineage("data/output/nope.bin"); }) == ErrorCode::NotRegistered);
  }

  TEST_CASE("diamond lineage lists the raw node once") {
    Fixture f;
    f.put("data/raw/r.csv", "r");
    f.store.ingest_raw("data/raw/r.csv");
    for (const char* p : {"data/processed/p1.csv", "data/processed/p2.csv"}) {
      f.put(p, p);
      f.store.register_derived(p, {"data/raw/r.csv"}, "pre", std::nullopt);
    }
    f.put("data/output/o.bin", "o");
    f.store.register_derived("data/output/o.bin", {"data/processed/p1.csv", "data/processed/p2.csv"}, "run", std::nullopt);
    auto t = f.store.lineage("data/output/o.bin");
    CHECK(t.nodes.size() == 4);
    CHECK(t.edges.size() == 4);
    CHECK(t.nodes.count("data/raw/r.csv") == 1);
  }

  TEST_CASE("integrity findings") {
    Fixture f;
    f.chain();
    auto before = testsupport::tree_snapshot(f.dir.path());
    auto clean = f.store.verify_integrity();
    CHECK(testsupport::tree_snapshot(f.dir.path()) == before);
    CHECK(clean.ok());
    CHECK(clean.findings.size() == 3);

    auto raw = f.dir.path() / "data/raw/boston.csv";
    std::filesystem::permissions(raw, std::filesystem::perms::owner_write, std::filesystem::perm_options::add);
    std::filesystem::resize_file(raw, 3);
    std::filesystem::remove(f.dir.path() / "data/processed/train.csv");
    auto report = f.store.verify_integrity();
    CHECK_FALSE(report.ok());
    CHECK(report.critical_count() == 1);
    std::map<std::string, IntegrityStatus> by_path;
    for (const auto& x : report.findings) by_path[x.path] = x.status;
    CHECK(by_path["data/raw/boston.csv"] == IntegrityStatus::HashMismatch);
    CHECK(by_path["data/processed/train.csv"] == IntegrityStatus::Missing);
    CHECK(by_path["data/output/results/metrics.json"] == IntegrityStatus::Ok);
  }

  TEST_CASE("raw files are write protected after ingest") {
    Fixture f;
    f.put("data/raw/a.csv", "a");
    f.store.ingest_raw("data/raw/a.csv");
    auto perms = std::filesystem::status(f.dir.path() / "data/raw/a.csv").permissions();
    CHECK((perms & std::filesystem::perms::owner_write) == std::filesystem::perms::none);
    CHECK(code_of([] { DataStore::check_writable("data/raw/a.csv"); }) == ErrorCode::RawTierViolation);
    CHECK(code_of([] { DataStore::check_writable("data/processed/a.csv"); }) == ErrorCode::Ok);
  }

  TEST_CASE("index survives a restart and stays sorted") {
    Fixture f;
    f.chain();
    DataStore reopened(f.ws, f.clock);
    CHECK(reopened.records() == f.store.records());
    auto index = testsupport::slurp(f.dir.path() / ".specflow/data/index.jsonl");
    CHECK(index.find("data/output") < index.find("data/processed"));
    CHECK(index.find("data/processed") < index.find("data/raw"));
  }

  TEST_CASE("ingest_new_raw registers each unregistered file once") {
    Fixture f;
    f.put("data/raw/a.csv", "a");
    f.put("data/raw/sub/b.csv", "b");
    CHECK(f.store.ingest_new_raw().size() == 2);
    CHECK(f.store.ingest_new_raw().empty());
  }
}
