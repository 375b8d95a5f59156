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

#include "specflow/context_store.hpp"

#include <algorithm>
#include <cctype>
#include <mutex>

#include "json.hpp"
#include "specflow/error.hpp"
#include "specflow/paths.hpp"
#include "specflow/text.hpp"
#include "specflow/workspace.hpp"

namespace specflow {

using ojson = nlohmann::ordered_json;

namespace {

const std::string kIndex = std::string(kStateDir) + "/context/versions.jsonl";
const std::string kObjects = std::string(kStateDir) + "/context/objects/";

bool is_ref_root(std::string_view target) {
  for (std::string_view dir : {"docs/", "data/", "src/", "scripts/"}) {
    if (text::starts_with(target, dir)) return true;
  }
  return false;
}

bool is_name_char(char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-'; }

}  // namespace

std::string_view to_string(AuthorKind kind) { return kind == AuthorKind::Agent ? "agent" : "human"; }

std::vector<CrossRef> extract_refs(std::string_view content) {
  std::vector<std::pair<size_t, CrossRef>> found;

  // [text](target "title")
  for (size_t pos = content.find("]("); pos != std::string_view::npos; pos = content.find("](", pos + 2)) {
    auto close = content.find(')', pos + 2);
    if (close == std::string_view::npos) break;
    auto target = text::trim(content.substr(pos + 2, close - pos - 2));
    if (auto sp = target.find_first_of(" \t"); sp != std::string_view::npos) target = target.substr(0, sp);
    if (target.size() >= 2 && target.front() == '<' && target.back() == '>') target = target.substr(1, target.size() - 2);
    if (text::starts_with(target, "./")) target.remove_prefix(2);
    if (!is_ref_root(target)) continue;
    std::string anchor;
    if (auto hash = target.find('#'); hash != std::string_view::npos) {
      anchor = std::string(target.substr(hash + 1));
      target = target.substr(0, hash);
    }
    auto norm = normalize_relative(target);
    if (!norm) continue;
    found.push_back({pos, {*norm, anchor}});
  }

  // @name.md
  for (size_t pos = content.find('@'); pos != std::string_view::npos; pos = content.find('@', pos + 1)) {
    if (pos > 0) {
      unsigned char prev = static_cast<unsigned char>(content[pos - 1]);
      if (std::isalnum(prev) || prev == '_' || prev == '.' || prev == '-') continue;
    }
    size_t end = pos + 1;
    while (end < content.size() && is_name_char(content[end])) ++end;
    if (end == pos + 1 || content.substr(end, 3) != ".md") continue;
    auto name = content.substr(pos + 1, end - pos - 1);
    if (name.front() == '-' || name.back() == '-') continue;
    if (end + 3 < content.size() && is_name_char(content[end + 3])) continue;
    found.push_back({pos, {"@" + std::string(name) + ".md", ""}});
  }

  std::stable_sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<CrossRef> refs;
  for (auto& [_, ref] : found) {
    if (std::find(refs.begin(), refs.end(), ref) == refs.end()) refs.push_back(std::move(ref));
  }
  return refs;
}

std::string sequence_label_of(std::string_view doc_path) {
  auto slash = doc_path.rfind('/');
  auto name = slash == std::string_view::npos ? doc_path : doc_path.substr(slash + 1);
  size_t n = 0;
  while (n < name.size() && std::isdigit(static_cast<unsigned char>(name[n]))) ++n;
  return std::string(name.substr(0, n));
}

ContextStore::ContextStore(Workspace& ws, Clock& clock) : ws_(ws), clock_(clock) { reload(); }

void ContextStore::reload() {
  std::unique_lock lock(mu_);
  docs_.clear();
  auto index = ws_.read(kIndex);
  if (!index) return;
  for (const auto& ln : text::split_lines(*index)) {
    if (text::trim(ln.text).empty()) continue;
    auto rec = ojson::parse(ln.text);
    DocVersion v;
    v.version = rec.at("version").get<int>();
    v.content_hash = rec.at("hash").get<std::string>();
    v.created_at = rec.value("created_at", "");
    v.author.kind = rec.value("author", "human") == "agent" ? AuthorKind::Agent : AuthorKind::Human;
    v.author.stage = rec.value("stage", "");
    for (const auto& r : rec.value("refs", ojson::array())) {
      v.refs.push_back({r.at("target").get<std::string>(), r.value("anchor", "")});
    }
    auto path = rec.at("doc").get<std::string>();
    auto& doc = docs_[path];
    doc.doc_path = path;
    doc.sequence_label = sequence_label_of(path);
    doc.versions.push_back(std::move(v));
  }
}

std::string ContextStore::checked_doc_path(std::string_view doc_path) const {
  auto norm = normalize_relative(doc_path);
  if (!norm || !is_under(*norm, "docs") || norm->back() == '/' || *norm == "docs") {
    fail(ErrorCode::PathOutsideDocs, "context documents must be files under docs/: " + std::string(doc_path));
  }
  return *norm;
}

DocVersion ContextStore::write_document(std::string_view doc_path, std::string_view content, const Author& author) {
  auto path = checked_doc_path(doc_path);
  std::unique_lock lock(mu_);
  auto hash = sha256_hex(content);
  auto it = docs_.find(path);
  if (it != docs_.end() && it->second.head().content_hash == hash) {
    fail(ErrorCode::IdenticalContent, path + ": content is identical to version " +
                                          std::to_string(it->second.head().version));
  }

  DocVersion v;
  v.version = it == docs_.end() ? 1 : it->second.head().version + 1;
  v.content_hash = hash;
  v.created_at = clock_.now();
  v.author = author;
  v.refs = extract_refs(content);

  if (!ws_.exists(kObjects + hash)) ws_.write(kObjects + hash, content);
  ojson rec;
  rec["doc"] = path;
  rec["version"] = v.version;
  rec["hash"] = hash;
  rec["created_at"] = v.created_at;
  rec["author"] = to_string(author.kind);
  rec["stage"] = author.stage;
  rec["refs"] = ojson::array();
  for (const auto& r : v.refs) rec["refs"].push_back({{"target", r.target}, {"anchor", r.anchor}});
  ws_.append(kIndex, rec.dump() + "\n");
  ws_.write(path, content);

  auto& doc = docs_[path];
  doc.doc_path = path;
  doc.sequence_label = sequence_label_of(path);
  doc.versions.push_back(v);
  return v;
}

std::string ContextStore::read_document(std::string_view doc_path, std::optional<int> version) const {
  auto path = checked_doc_path(doc_path);
  std::shared_lock lock(mu_);
  auto it = docs_.find(path);
  if (it == docs_.end()) fail(ErrorCode::NotFound, "no such document: " + path);
  const auto& versions = it->second.versions;
  const DocVersion* v = &versions.back();
  if (version) {
    if (*version < 1 || *version > static_cast<int>(versions.size())) {
      fail(ErrorCode::NoSuchVersion, path + " has no version " + std::to_string(*version));
    }
    v = &versions[static_cast<size_t>(*version - 1)];
  }
  auto bytes = ws_.read(kObjects + v->content_hash);
  if (!bytes || sha256_hex(*bytes) != v->content_hash) {
    fail(ErrorCode::IoError, path + " version " + std::to_string(v->version) + " is missing or corrupted in the history store");
  }
  return *bytes;
}

std::vector<DocRef> ContextStore::backlinks(std::string_view target) const {
  std::shared_lock lock(mu_);
  std::vector<DocRef> out;
  for (const auto& [path, doc] : docs_) {
    const auto& refs = doc.head().refs;
    if (std::any_of(refs.begin(), refs.end(), [&](const CrossRef& r) { return r.target == target; })) {
      out.push_back({path, doc.head().version});
    }
  }
  return out;
}

std::vector<DocRef> ContextStore::backlinks_matching(std::string_view pattern) const {
  std::shared_lock lock(mu_);
  std::vector<DocRef> out;
  for (const auto& [path, doc] : docs_) {
    const auto& refs = doc.head().refs;
    if (std::any_of(refs.begin(), refs.end(),
                    [&](const CrossRef& r) { return r.target == pattern || glob_match(pattern, r.target); })) {
      out.push_back({path, doc.head().version});
    }
  }
  return out;
}

std::vector<SearchHit> ContextStore::search(std::string_view query) const {
  auto needle = text::to_lower(text::trim(query));
  if (needle.empty()) fail(ErrorCode::EmptyQuery, "search query is empty");
  std::vector<std::pair<std::string, int>> heads;
  {
    std::shared_lock lock(mu_);
    for (const auto& [path, doc] : docs_) heads.emplace_back(path, doc.head().version);
  }
  std::vector<SearchHit> hits;
  for (const auto& [path, version] : heads) {
    auto content = read_document(path, version);
    SearchHit hit{path, version, {}};
    for (const auto& ln : text::split_lines(content)) {
      auto line = text::strip_cr(ln.text);
      auto pos = text::to_lower(line).find(needle);
      if (pos != std::string::npos) hit.lines.push_back({ln.number, pos, needle.size(), std::string(line)});
    }
    if (!hit.lines.empty()) hits.push_back(std::move(hit));
  }
  return hits;
}

std::optional<ContextDocument> ContextStore::find(std::string_view doc_path) const {
  std::shared_lock lock(mu_);
  auto it = docs_.find(std::string(doc_path));
  if (it == docs_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> ContextStore::documents() const {
  std::shared_lock lock(mu_);
  std::vector<std::string> out;
  for (const auto& [path, _] : docs_) out.push_back(path);
  return out;
}

size_t ContextStore::total_versions() const {
  std::shared_lock lock(mu_);
  size_t n = 0;
  for (const auto& [_, doc] : docs_) n += doc.versions.size();
  return n;
}

std::vector<std::string> ContextStore::sync_from_disk(const Author& author) {
  std::vector<std::string> changed;
  for (const auto& path : ws_.list_files("docs")) {
    auto bytes = ws_.read(path);
    if (!bytes) continue;
    auto doc = find(path);
    if (doc && doc->head().content_hash == sha256_hex(*bytes)) continue;
    write_document(path, *bytes, author);
    changed.push_back(path);
  }
  return changed;
}

}  // namespace specflow
