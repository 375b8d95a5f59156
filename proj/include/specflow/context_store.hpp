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

#pragma once

// Append-only versioned documents under docs/. Head versions are the plain
// files on disk; every version's bytes live content-addressed in the state
// directory alongside a line-per-version index.

#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace specflow {

class Workspace;
class Clock;

enum class AuthorKind { Human, Agent };

struct Author {
  AuthorKind kind = AuthorKind::Human;
  std::string stage;

  static Author human(std::string stage = {}) { return {AuthorKind::Human, std::move(stage)}; }
  static Author agent(std::string stage) { return {AuthorKind::Agent, std::move(stage)}; }
  friend bool operator==(const Author&, const Author&) = default;
};

std::string_view to_string(AuthorKind kind);

struct CrossRef {
  std::string target;  // "docs/03-preprocess-plan.md" or "@preprocess.md"
  std::string anchor;  // heading fragment, may be empty

  friend bool operator==(const CrossRef&, const CrossRef&) = default;
};

/// Markdown inline links into docs/ data/ src/ scripts/, plus bare
/// `@name.md` mentions; first occurrence order, deduplicated.
std::vector<CrossRef> extract_refs(std::string_view content);

/// Leading digits of the file name ("02" for docs/02-raw-data-analysis.md).
std::string sequence_label_of(std::string_view doc_path);

struct DocVersion {
  int version = 0;
  std::string content_hash;
  std::string created_at;
  Author author;
  std::vector<CrossRef> refs;
};

struct ContextDocument {
  std::string doc_path;
  std::vector<DocVersion> versions;
  std::string sequence_label;

  const DocVersion& head() const { return versions.back(); }
};

struct DocRef {
  std::string doc_path;
  int version = 0;
  friend bool operator==(const DocRef&, const DocRef&) = default;
};

struct LineMatch {
  size_t line = 0;    // 1-based
  size_t column = 0;  // 0-based byte offset of the first hit on the line
  size_t length = 0;
  std::string text;
};

struct SearchHit {
  std::string doc_path;
  int version = 0;
  std::vector<LineMatch> lines;
};

class ContextStore {
 public:
  ContextStore(Workspace& ws, Clock& clock);

  /// Re-reads the history index; used after restarts and rollbacks.
  void reload();

  /// Throws PathOutsideDocs, IdenticalContent.
  DocVersion write_document(std::string_view doc_path, std::string_view content, const Author& author);

  /// Head when `version` is empty. Throws NotFound, NoSuchVersion.
  std::string read_document(std::string_view doc_path, std::optional<int> version = std::nullopt) const;

  /// Head versions whose refs name `target`, sorted by path.
  std::vector<DocRef> backlinks(std::string_view target) const;

  /// Head versions with a ref whose target matches the glob `pattern`.
  std::vector<DocRef> backlinks_matching(std::string_view pattern) const;

  /// Case-insensitive keyword search over head versions. Throws EmptyQuery.
  std::vector<SearchHit> search(std::string_view query) const;

  std::optional<ContextDocument> find(std::string_view doc_path) const;
  std::vector<std::string> documents() const;
  size_t total_versions() const;

  /// Ingests head files under docs/ that differ from the recorded head (or
  /// were never recorded) as new human-authored versions. Returns their
  /// paths.
  std::vector<std::string> sync_from_disk(const Author& author);

 private:
  std::string checked_doc_path(std::string_view doc_path) const;

  Workspace& ws_;
  Clock& clock_;
  mutable std::shared_mutex mu_;
  std::map<std::string, ContextDocument> docs_;
};

}  // namespace specflow
