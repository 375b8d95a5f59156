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

#include "specflow/data_store.hpp"

#include <sys/stat.h>

#include <algorithm>
#include <mutex>
#include <tuple>

#include "json.hpp"
#include "specflow/error.hpp"
#include "specflow/paths.hpp"
#include "specflow/text.hpp"
#include "specflow/workspace.hpp"

namespace specflow {

using ojson = nlohmann::ordered_json;

namespace {

const std::string kIndex = std::string(kStateDir) + "/data/index.jsonl";

ojson to_json(const ArtifactRecord& r) {
  ojson j;
  j["path"] = r.path;
  j["tier"] = to_string(r.tier);
  j["hash"] = r.content_hash;
  j["registered_at"] = r.registered_at;
  j["produced_by"] = r.produced_by ? ojson(*r.produced_by) : ojson(nullptr);
  j["sources"] = r.sources;
  j["transformation_ref"] = r.transformation_ref ? ojson(*r.transformation_ref) : ojson(nullptr);
  return j;
}

ArtifactRecord from_json(const ojson& j) {
  ArtifactRecord r;
  r.path = j.at("path").get<std::string>();
  auto tier = parse_tier(j.at("tier").get<std::string>());
  if (!tier) fail(ErrorCode::ParseFailure, "bad tier in data index for " + r.path);
  r.tier = *tier;
  r.content_hash = j.at("hash").get<std::string>();
  r.registered_at = j.value("registered_at", "");
  if (j.contains("produced_by") && !j["produced_by"].is_null()) r.produced_by = j["produced_by"].get<std::string>();
  r.sources = j.value("sources", std::vector<std::string>{});
  if (j.contains("transformation_ref") && !j["transformation_ref"].is_null()) {
    r.transformation_ref = j["transformation_ref"].get<std::string>();
  }
  return r;
}

bool source_tier_allowed(Tier child, Tier parent) {
  if (child == Tier::Processed) return parent != Tier::Output;
  return child == Tier::Output;
}

}  // namespace

std::string_view to_string(Tier tier) {
  switch (tier) {
    case Tier::Raw:
      return "raw";
    case Tier::Processed:
      return "processed";
    case Tier::Output:
      return "output";
  }
  return "raw";
}

std::optional<Tier> parse_tier(std::string_view text) {
  if (text == "raw") return Tier::Raw;
  if (text == "processed") return Tier::Processed;
  if (text == "output") return Tier::Output;
  return std::nullopt;
}

std::optional<Tier> tier_of(std::string_view path) {
  if (is_under(path, "data/raw")) return Tier::Raw;
  if (is_under(path, "data/processed")) return Tier::Processed;
  if (is_under(path, "data/output")) return Tier::Output;
  return std::nullopt;
}

std::string_view to_string(IntegrityStatus status) {
  switch (status) {
    case IntegrityStatus::Ok:
      return "ok";
    case IntegrityStatus::HashMismatch:
      return "hash_mismatch";
    case IntegrityStatus::Missing:
      return "missing";
  }
  return "ok";
}

bool IntegrityReport::ok() const {
  return std::all_of(findings.begin(), findings.end(),
                     [](const IntegrityFinding& f) { return f.status == IntegrityStatus::Ok; });
}

size_t IntegrityReport::critical_count() const {
  return static_cast<size_t>(
      std::count_if(findings.begin(), findings.end(), [](const IntegrityFinding& f) { return f.critical; }));
}

DataStore::DataStore(Workspace& ws, Clock& clock) : ws_(ws), clock_(clock) { reload(); }

void DataStore::reload() {
  std::unique_lock lock(mu_);
  records_.clear();
  auto index = ws_.read(kIndex);
  if (!index) return;
  for (const auto& ln : text::split_lines(*index)) {
    if (text::trim(ln.text).empty()) continue;
    auto rec = from_json(ojson::parse(ln.text));
    auto path = rec.path;
    records_[path] = std::move(rec);
  }
}

void DataStore::persist() {
  std::string out;
  for (const auto& [_, rec] : records_) out += to_json(rec).dump() + "\n";
  ws_.write(kIndex, out);
}

std::string DataStore::checked(std::string_view path) const {
  auto norm = normalize_relative(path);
  if (!norm || norm->back() == '/' || !tier_of(*norm)) {
    fail(ErrorCode::WrongTierPath, "not a file under data/raw, data/processed or data/output: " + std::string(path));
  }
  return *norm;
}

ArtifactRecord DataStore::ingest_raw(std::string_view path) {
  auto norm = checked(path);
  if (tier_of(norm) != Tier::Raw) fail(ErrorCode::WrongTierPath, norm + " is not under data/raw/");
  auto bytes = ws_.read(norm);
  if (!bytes) fail(ErrorCode::NotFound, "no such file: " + norm);
  auto hash = sha256_hex(*bytes);

  std::unique_lock lock(mu_);
  if (auto it = records_.find(norm); it != records_.end()) {
    if (it->second.content_hash == hash) return it->second;
    fail(ErrorCode::AlreadyRegistered, norm + " is registered with hash " + it->second.content_hash +
                                           " but the file now hashes to " + hash);
  }
  ArtifactRecord rec;
  rec.path = norm;
  rec.tier = Tier::Raw;
  rec.content_hash = hash;
  rec.registered_at = clock_.now();
  records_[norm] = rec;
  try {
    persist();
  } catch (...) {
    records_.erase(norm);
    throw;
  }
  // Best effort; the hash check is what actually guards raw bytes.
  struct stat st {};
  auto abs = ws_.abs(norm).string();
  if (::stat(abs.c_str(), &st) == 0) ::chmod(abs.c_str(), st.st_mode & ~(S_IWUSR | S_IWGRP | S_IWOTH));
  return rec;
}

std::vector<ArtifactRecord> DataStore::ingest_new_raw() {
  std::vector<ArtifactRecord> added;
  for (const auto& path : ws_.list_files("data/raw")) {
    if (find(path)) continue;
    added.push_back(ingest_raw(path));
  }
  return added;
}

ArtifactRecord DataStore::register_derived(std::string_view path, const std::vector<std::string>& sources,
                                           std::string_view produced_by,
                                           std::optional<std::string> transformation_ref) {
  auto norm_opt = normalize_relative(path);
  if (norm_opt && tier_of(*norm_opt) == Tier::Raw) {
    fail(ErrorCode::RawTierWrite, "derived artifacts cannot be registered under data/raw/: " + *norm_opt);
  }
  auto norm = checked(path);
  auto tier = *tier_of(norm);
  auto bytes = ws_.read(norm);
  if (!bytes) fail(ErrorCode::NotFound, "no such file: " + norm);

  std::vector<std::string> srcs;
  for (const auto& s : sources) {
    auto n = normalize_relative(s);
    if (!n) fail(ErrorCode::UnknownSource, "invalid source path: " + s);
    if (std::find(srcs.begin(), srcs.end(), *n) == srcs.end()) srcs.push_back(*n);
  }
  if (transformation_ref) {
    auto t = normalize_relative(*transformation_ref);
    if (!t || !is_under(*t, "docs")) fail(ErrorCode::InvalidRef, "transformation_ref must be a docs/ path: " + *transformation_ref);
    transformation_ref = *t;
  }

  std::unique_lock lock(mu_);
  for (const auto& s : srcs) {
    if (s == norm) fail(ErrorCode::CycleDetected, norm + " cannot be its own source");
    auto it = records_.find(s);
    if (it == records_.end()) fail(ErrorCode::UnknownSource, "source is not registered: " + s);
    if (!source_tier_allowed(tier, it->second.tier)) {
      fail(ErrorCode::TierViolation, std::string(to_string(tier)) + " artifact " + norm + " cannot derive from " +
                                         std::string(to_string(it->second.tier)) + " artifact " + s);
    }
  }
  // Re-registration may rewire sources; refuse any that already descend
  // from this artifact.
  if (records_.count(norm)) {
    std::vector<std::string> stack(srcs.begin(), srcs.end());
    std::set<std::string> seen;
    while (!stack.empty()) {
      auto cur = stack.back();
      stack.pop_back();
      if (cur == norm) fail(ErrorCode::CycleDetected, "registering " + norm + " with these sources would form a cycle");
      if (!seen.insert(cur).second) continue;
      if (auto it = records_.find(cur); it != records_.end()) {
        for (const auto& p : it->second.sources) stack.push_back(p);
      }
    }
  }

  ArtifactRecord rec;
  rec.path = norm;
  rec.tier = tier;
  rec.content_hash = sha256_hex(*bytes);
  rec.registered_at = clock_.now();
  rec.produced_by = std::string(produced_by);
  rec.sources = srcs;
  rec.transformation_ref = transformation_ref;

  std::optional<ArtifactRecord> previous;
  if (auto it = records_.find(norm); it != records_.end()) previous = it->second;
  records_[norm] = rec;
  try {
    persist();
  } catch (...) {
    if (previous) records_[norm] = *previous; else records_.erase(norm);
    throw;
  }
  return rec;
}

LineageTrace DataStore::lineage(std::string_view path) const {
  auto norm = normalize_relative(path).value_or(std::string(path));
  std::shared_lock lock(mu_);
  if (!records_.count(norm)) fail(ErrorCode::NotRegistered, "not registered: " + norm);
  LineageTrace trace;
  trace.root = norm;
  std::vector<std::string> stack{norm};
  while (!stack.empty()) {
    auto cur = stack.back();
    stack.pop_back();
    if (!trace.nodes.insert(cur).second) continue;
    auto it = records_.find(cur);
    if (it == records_.end()) continue;
    for (const auto& parent : it->second.sources) {
      trace.edges.push_back({cur, parent, it->second.transformation_ref});
      stack.push_back(parent);
    }
  }
  std::sort(trace.edges.begin(), trace.edges.end(), [](const LineageEdge& a, const LineageEdge& b) {
    return std::tie(a.child, a.parent) < std::tie(b.child, b.parent);
  });
  return trace;
}

IntegrityReport DataStore::verify_integrity() const {
  std::shared_lock lock(mu_);
  IntegrityReport report;
  for (const auto& [path, rec] : records_) {
    IntegrityFinding f;
    f.path = path;
    f.tier = rec.tier;
    f.expected_hash = rec.content_hash;
    auto bytes = ws_.read(path);
    if (!bytes) {
      f.status = IntegrityStatus::Missing;
    } else {
      f.actual_hash = sha256_hex(*bytes);
      if (f.actual_hash != rec.content_hash) f.status = IntegrityStatus::HashMismatch;
    }
    f.critical = f.status != IntegrityStatus::Ok && rec.tier == Tier::Raw;
    report.findings.push_back(std::move(f));
  }
  return report;
}

std::optional<ArtifactRecord> DataStore::find(std::string_view path) const {
  std::shared_lock lock(mu_);
  auto it = records_.find(std::string(path));
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

std::vector<ArtifactRecord> DataStore::records() const {
  std::shared_lock lock(mu_);
  std::vector<ArtifactRecord> out;
  for (const auto& [_, rec] : records_) out.push_back(rec);
  return out;
}

std::vector<ArtifactRecord> DataStore::matching(std::string_view pattern) const {
  std::shared_lock lock(mu_);
  std::vector<ArtifactRecord> out;
  for (const auto& [path, rec] : records_) {
    if (path == pattern || glob_match(pattern, path)) out.push_back(rec);
  }
  return out;
}

void DataStore::check_writable(std::string_view path) {
  auto norm = normalize_relative(path);
  if (norm && (is_under(*norm, "data/raw") || *norm == "data/raw" || *norm == "data/raw/")) {
    fail(ErrorCode::RawTierViolation, "raw data is read-only: " + *norm);
  }
}

}  // namespace specflow
