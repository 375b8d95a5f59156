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

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace specflow {

/// Engine-managed state lives here, relative to the project root.
inline constexpr std::string_view kStateDir = ".specflow";

/// Hex-encoded SHA-256 of `bytes`.
std::string sha256_hex(std::string_view bytes);

/// Source of timestamps. Swappable so replays can be compared.
class Clock {
 public:
  virtual ~Clock() = default;
  /// ISO-8601 UTC, second resolution.
  virtual std::string now() = 0;
};

class SystemClock final : public Clock {
 public:
  std::string now() override;
};

/// Always returns the same instant.
class FixedClock final : public Clock {
 public:
  explicit FixedClock(std::string instant = "2000-01-01T00:00:00Z")
      : instant_(std::move(instant)) {}
  std::string now() override { return instant_; }

 private:
  std::string instant_;
};

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view bytes);

/// Records the pre-image of every file touched while active so the tree can
/// be put back exactly, including directories it had to create.
class FileJournal {
 public:
  explicit FileJournal(std::filesystem::path root) : root_(std::move(root)) {}

  void track_file(const std::string& rel);
  void track_dirs_for(const std::string& rel);
  void rollback();

 private:
  std::filesystem::path root_;
  std::map<std::string, std::optional<std::string>> originals_;
  std::vector<std::string> created_dirs_;
};

/// File access rooted at a project directory. All paths are project-relative
/// and normalized; writes go through the active journal when one is open.
class Workspace {
 public:
  explicit Workspace(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path abs(std::string_view rel) const;

  bool exists(std::string_view rel) const;
  bool is_directory(std::string_view rel) const;
  std::optional<std::string> read(std::string_view rel) const;
  void write(std::string_view rel, std::string_view bytes);
  void append(std::string_view rel, std::string_view bytes);
  void remove(std::string_view rel);

  /// Regular files under `dir` ("" for the whole project), sorted, relative
  /// to the root. The engine state directory is never listed.
  std::vector<std::string> list_files(std::string_view dir = "") const;

  class Transaction {
   public:
    explicit Transaction(Workspace& ws);
    ~Transaction();
    Transaction(const Transaction&) = delete;
    Transaction& operator=(const Transaction&) = delete;

    void commit();
    void rollback();

   private:
    Workspace& ws_;
    bool done_ = false;
  };

 private:
  std::string checked(std::string_view rel) const;
  void before_write(const std::string& rel);

  std::filesystem::path root_;
  std::unique_ptr<FileJournal> journal_;
  std::recursive_mutex mu_;
};

}  // namespace specflow
