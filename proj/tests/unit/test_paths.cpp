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
#include "specflow/error.hpp"
#include "specflow/paths.hpp"
#include "specflow/workspace.hpp"
#include "test_support.hpp"

using namespace specflow;

TEST_SUITE("paths") {
  TEST_CASE("layer by top-level directory") {
    CHECK(layer_of("docs/02-raw-data-analysis.md") == Layer::Context);
    CHECK(layer_of("src/model.py") == Layer::Code);
    CHECK(layer_of("scripts/run_experiment.py") == Layer::Code);
    CHECK(layer_of("data/raw/") == Layer::Data);
    CHECK(layer_of("commands/preprocess.md") == Layer::Command);
    CHECK_FALSE(layer_of("notes/x.md"));
  }

  TEST_CASE("normalize rejects escapes") {
    CHECK(normalize_relative("docs/./a.md") == std::optional<std::string>("docs/a.md"));
    CHECK(normalize_relative("docs/x/../a.md") == std::optional<std::string>("docs/a.md"));
    CHECK_FALSE(normalize_relative("../etc/passwd"));
    CHECK_FALSE(normalize_relative("docs/../../x"));
    CHECK_FALSE(normalize_relative("/etc/passwd"));
    CHECK_FALSE(normalize_relative(""));
  }

  TEST_CASE("is_under needs a separator boundary") {
    CHECK(is_under("data/raw/x.csv", "data/raw"));
    CHECK(is_under("data/raw", "data/raw"));
    CHECK_FALSE(is_under("data/rawish/x.csv", "data/raw"));
  }

  TEST_CASE("glob matching") {
    CHECK(glob_match("docs/02-*.md", "docs/02-raw-data-analysis.md"));
    CHECK_FALSE(glob_match("docs/02-*.md", "docs/03-preprocess-plan.md"));
    CHECK(glob_match("data/raw/**", "data/raw/a/b.csv"));
    CHECK(glob_match("src/*.py", "src/model.py"));
    CHECK_FALSE(glob_match("src/*.py", "src/pkg/model.py"));
  }

  TEST_CASE("resource refs classify and guard") {
    CHECK(ResourceRef::parse("data/raw/**").kind == RefKind::DataPath);
    CHECK(ResourceRef::parse("docs/05-research-plan.md").kind == RefKind::ContextDoc);
    CHECK(ResourceRef::parse("scripts/preprocess.py").kind == RefKind::CodePath);
    CHECK_THROWS_AS(ResourceRef::parse("../../etc/passwd"), Error);
    CHECK_THROWS_AS(ResourceRef::parse("etc/passwd"), Error);
  }

  TEST_CASE("sha256 matches known vectors") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  }

  TEST_CASE("transaction rollback restores files") {
    testsupport::TempDir dir;
    testsupport::spit(dir.path() / "docs/a.md", "one");
    Workspace ws(dir.path());
    auto before = testsupport::tree_snapshot(dir.path());
    {
      Workspace::Transaction tx(ws);
      ws.write("docs/a.md", "two");
      ws.write("src/new/b.py", "x");
      ws.remove("docs/a.md");
      tx.rollback();
    }
    CHECK(testsupport::tree_snapshot(dir.path()) == before);
  }

  TEST_CASE("workspace refuses paths outside the root") {
    testsupport::TempDir dir;
    Workspace ws(dir.path());
    CHECK_THROWS_AS(ws.write("../outside", "x"), Error);
  }
}
