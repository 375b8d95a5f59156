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


#include <algorithm>
#include <functional>
#include <random>

#include "doctest.h"
#include "specflow/context_store.hpp"
#include "specflow/error.hpp"
#include "specflow/workspace.hpp"
#include "test_support.hpp"

using namespace specflow;

namespace {

struct Fixture {
  testsupport::TempDir dir;
  Workspace ws{dir.path()};
  FixedClock clock;
  ContextStore store{ws, clock};
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

TEST_SUITE("context_store") {
  TEST_CASE("versions append and stay retrievable") {
    Fixture f;
    auto v1 = f.store.write_document("docs/02-raw-data-analysis.md", "first\n", Author::agent("raw-data-analysis"));
    CHECK(v1.version == 1);
    auto v2 = f.store.write_document("docs/02-raw-data-analysis.md", "second\n", Author::human());
    CHECK(v2.version == 2);
    CHECK(f.store.read_document("docs/02-raw-data-analysis.md", 1) == "first\n");
    CHECK(f.store.read_document("docs/02-raw-data-analysis.md") == "second\n");
    CHECK(testsupport::slurp(f.dir.path() / "docs/02-raw-data-analysis.md") == "second\n");
    auto doc = f.store.find("docs/02-raw-data-analysis.md");
    REQUIRE(doc);
    CHECK(doc->sequence_label == "02");
    CHECK(doc->versions[0].author.kind == AuthorKind::Agent);
    CHECK(doc->versions[1].author.kind == AuthorKind::Human);
  }

  TEST_CASE("errors") {
    Fixture f;
    CHECK(code_of([&] { f.store.write_document("src/a.md", "x", Author::human()); }) == ErrorCode::PathOutsideDocs);
    CHECK(code_of([&] { f.store.write_document("docs/../x.md", "x", Author::human()); }) == ErrorCode::PathOutsideDocs);
    f.store.write_document("docs/a.md", "x", Author::human());
    CHECK(code_of([&] { f.store.write_document("docs/a.md", "x", Author::human()); }) == ErrorCode::IdenticalContent);
    CHECK(code_of([&] { f.store.read_document("docs/none.md"); }) == ErrorCode::NotFound);
    CHECK(code_of([&] { f.store.read_document("docs/a.md", 2); }) == ErrorCode::NoSuchVersion);
    CHECK(code_of([&] { f.store.read_document("docs/a.md", 0); }) == ErrorCode::NoSuchVersion);
  }

  TEST_CASE("cross references from links and command mentions") {
    auto refs = extract_refs("See [plan](docs/03-preprocess-plan.md#encoding) and run @preprocess.md.\n"
                             "External [site](https://example.com) is ignored, so is [x](notes/a.md).\n");
    REQUIRE(refs.size() == 2);
    CHECK(refs[0].target == "docs/03-preprocess-plan.md");
    CHECK(refs[0].anchor == "encoding");
    CHECK(refs[1].target == "@preprocess.md");
    CHECK(extract_refs("[a](docs/x.md) [b](docs/x.md)").size() == 1);
  }

  TEST_CASE("backlinks") {
    Fixture f;
    f.store.write_document("docs/09-experiment-report.md", "[r](data/output/results/)\n", Author::human());
    auto links = f.store.backlinks("data/output/results/");
    REQUIRE(links.size() == 1);
    CHECK(links[0] == DocRef{"docs/09-experiment-report.md", 1});
    CHECK(f.store.backlinks("docs/never.md").empty());

    for (const char* p : {"docs/c.md", "docs/a.md", "docs/b.md"}) {
      f.store.write_document(p, "[t](docs/target.md)\n", Author::human());
    }
    auto three = f.store.backlinks("docs/target.md");
    REQUIRE(three.size() == 3);
    CHECK(three[0].doc_path == "docs/a.md");
    CHECK(three[1].doc_path == "docs/b.md");
    CHECK(three[2].doc_path == "docs/c.md");

    // Only head versions count.
    f.store.write_document("docs/a.md", "no link now\n", Author::human());
    CHECK(f.store.backlinks("docs/target.md").size() == 2);
  }

  TEST_CASE("backlinks is the inverse of head refs") {
    Fixture f;
    std::mt19937 rng(11);
    std::vector<std::string> targets = {"docs/t0.md", "docs/t1.md", "data/raw/x.csv", "src/a.py", "@preprocess.md"};
    for (int d = 0; d < 12; ++d) {
      std::string content = "doc " + std::to_string(d) + "\n";
      for (const auto& t : targets) {
        if (rng() % 3 == 0) content += t[0] == '@' ? t + "\n" : "[l](" + t + ")\n";
      }
      f.store.write_document("docs/d" + std::to_string(d) + ".md", content, Author::human());
    }
    for (const auto& t : targets) {
      for (const auto& path : f.store.documents()) {
        auto head = f.store.find(path)->head();
        bool in_refs = std::any_of(head.refs.begin(), head.refs.end(), [&](const CrossRef& r) { return r.target == t; });
        auto links = f.store.backlinks(t);
        bool in_links = std::any_of(links.begin(), links.end(), [&](const DocRef& r) { return r.doc_path == path; });
        CHECK(in_refs == in_links);
      }
    }
  }

  TEST_CASE("search over head versions") {
    Fixture f;
    f.store.write_document("docs/03-preprocess-plan.md", "# Plan\nUse median Imputation for LSTAT.\nok\n",
                           Author::human());
    f.store.write_document("docs/02-raw.md", "imputation v1\n", Author::human());
    f.store.write_document("docs/02-raw.md", "header\nimputation v2\n", Author::human());
    auto hits = f.store.search("imputation");
    REQUIRE(hits.size() == 2);
    CHECK(hits[0].doc_path == "docs/02-raw.md");
    CHECK(hits[0].version == 2);
    REQUIRE(hits[0].lines.size() == 1);
    CHECK(hits[0].lines[0].line == 2);
    CHECK(hits[1].doc_path == "docs/03-preprocess-plan.md");
    CHECK(hits[1].lines[0].column == 11);
    CHECK(hits[1].lines[0].length == 10);
    CHECK(f.store.search("zebra").empty());
    CHECK(code_of([&] { f.store.search("  "); }) == ErrorCode::EmptyQuery);
  }

  TEST_CASE("content addressing and round trip of odd content") {
    Fixture f;
    std::vector<std::string> contents = {"", "\n", "\n\n\n", "no newline", "caf\xC3\xA9\r\nline\n", std::string(5000, 'x')};
    int expected_version = 0;
    for (const auto& c : contents) {
      auto v = f.store.write_document("docs/odd.md", c, Author::human());
      CHECK(v.version == ++expected_version);
      CHECK(v.content_hash == sha256_hex(c));
    }
    for (int v = 1; v <= expected_version; ++v) {
      auto text = f.store.read_document("docs/odd.md", v);
      CHECK(text == contents[static_cast<size_t>(v - 1)]);
      CHECK(sha256_hex(text) == f.store.find("docs/odd.md")->versions[static_cast<size_t>(v - 1)].content_hash);
    }
  }

  TEST_CASE("history survives a restart") {
    Fixture f;
    f.store.write_document("docs/a.md", "1", Author::human());
    f.store.write_document("docs/a.md", "2", Author::agent("s"));
    ContextStore reopened(f.ws, f.clock);
    CHECK(reopened.total_versions() == 2);
    CHECK(reopened.read_document("docs/a.md", 1) == "1");
    CHECK(reopened.find("docs/a.md")->versions[1].author == Author::agent("s"));
  }

  TEST_CASE("corrupted history blob is detected") {
    Fixture f;
    auto v = f.store.write_document("docs/a.md", "content", Author::human());
    testsupport::spit(f.dir.path() / ".specflow/context/objects" / v.content_hash, "tampered");
    CHECK(code_of([&] { f.store.read_document("docs/a.md", 1); }) == ErrorCode::IoError);
  }

  TEST_CASE("sync picks up on-disk edits as human versions") {
    Fixture f;
    f.store.write_document("docs/a.md", "agent text\n", Author::agent("s"));
    testsupport::spit(f.dir.path() / "docs/a.md", "human text\n");
    testsupport::spit(f.dir.path() / "docs/new.md", "fresh\n");
    auto changed = f.store.sync_from_disk(Author::human());
    CHECK(changed == std::vector<std::string>{"docs/a.md", "docs/new.md"});
    CHECK(f.store.find("docs/a.md")->head().author.kind == AuthorKind::Human);
    CHECK(f.store.sync_from_disk(Author::human()).empty());
  }
}
