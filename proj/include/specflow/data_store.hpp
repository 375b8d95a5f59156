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

// Three-tier artifact registry over data/raw, data/processed and
// data/output. Records live in one index file inside the state directory;
// data/ itself holds only what stages wrote.

#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

namespace specflow {

class Workspace;
class Clock;

enum class Tier { Raw, Processed, Output };

std::string_view to_string(Tier tier);
std::optional<Tier> parse_tier(std::string_view text);

/// Tier implied by the path prefix; nullopt outside the three tier dirs.
std::optional<Tier> tier_of(std::string_view path);

struct ArtifactRecord {
  std::string path;
  Tier tier = Tier::Raw;
  std::string content_hash;
  std::string registered_at;
  std::optional<std::string> produced_by;
  std::vector<std::string> sources;
  std::optional<std::string> transformation_ref;

  friend bool operator==(const ArtifactRecord&, const ArtifactRecord&) = default;
};

struct LineageEdge {
  std::string child;
  std::string parent;
  std::optional<std::string> transformation_ref;

  friend bool operator==(const LineageEdge&, const LineageEdge&) = default;
};

struct LineageTrace {
  std::string root;
  std::vector<LineageEdge> edges;  // sorted (child, parent)
  std::set<std::string> nodes;     // includes root
};

enum class IntegrityStatus { Ok, HashMismatch, Missing };

std::string_view to_string(IntegrityStatus status);

struct IntegrityFinding {
  std::string path;
  Tier tier = Tier::Raw;
  IntegrityStatus status = IntegrityStatus::Ok;
  bool critical = false;
  std::string expected_hash;
  std::string actual_hash;  // empty when missing
};

struct IntegrityReport {
  std::vector<IntegrityFinding> findings;  // one per record, by path

  bool ok() const;
  size_t critical_count() const;
};

class DataStore {
 public:
  DataStore(Workspace& ws, Clock& clock);

  void reload();

  /// Throws WrongTierPath, NotFound, AlreadyRegistered.
  ArtifactRecord ingest_raw(std::string_view path);

  /// Registers every unregistered file under data/raw/; returns the new
  /// records. Files whose bytes changed since registration are left for
  /// verify_integrity to report.
  std::vector<ArtifactRecord> ingest_new_raw();

  /// Throws RawTierWrite, WrongTierPath, NotFound, UnknownSource,
  /// TierViolation, CycleDetected.
  ArtifactRecord register_derived(std::string_view path, const std::vector<std::string>& sources,
                                  std::string_view produced_by,
                                  std::optional<std::string> transformation_ref);

  /// Throws NotRegistered.
  LineageTrace lineage(std::string_view path) const;

  /// Never writes.
  IntegrityReport verify_integrity() const;

  std::optional<ArtifactRecord> find(std::string_view path) const;
  std::vector<ArtifactRecord> records() const;
  std::vector<ArtifactRecord> matching(std::string_view pattern) const;

  /// Throws RawTierViolation for registered or unregistered raw-tier paths.
  static void check_writable(std::string_view path);

 private:
  void persist();
  std::string checked(std::string_view path) const;

  Workspace& ws_;
  Clock& clock_;
  mutable std::shared_mutex mu_;
  std::map<std::string, ArtifactRecord> records_;
};

}  // namespace specflow
