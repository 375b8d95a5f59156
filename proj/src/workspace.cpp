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

#include "specflow/workspace.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include "specflow/error.hpp"
#include "specflow/paths.hpp"

namespace fs = std::filesystem;

namespace specflow {

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    fail(ErrorCode::Internal, "sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

std::string SystemClock::now() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::NotFound, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, std::string_view bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp-write";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorCode::IoError, "short write to " + path.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorCode::IoError, "cannot replace " + path.string());
  }
}

void FileJournal::track_file(const std::string& rel) {
  if (originals_.count(rel)) return;
  auto p = root_ / rel;
  std::error_code ec;
  if (fs::is_regular_file(p, ec)) {
    originals_.emplace(rel, read_text_file(p));
  } else {
    originals_.emplace(rel, std::nullopt);
  }
}

void FileJournal::track_dirs_for(const std::string& rel) {
  fs::path parent = fs::path(rel).parent_path();
  std::vector<std::string> missing;
  while (!parent.empty()) {
    std::error_code ec;
    if (fs::exists(root_ / parent, ec)) break;
    missing.push_back(parent.generic_string());
    parent = parent.parent_path();
  }
  created_dirs_.insert(created_dirs_.end(), missing.begin(), missing.end());
}

void FileJournal::rollback() {
  for (const auto& [rel, original] : originals_) {
    auto p = root_ / rel;
    std::error_code ec;
    if (original) {
      write_text_file(p, *original);
    } else {
      fs::remove(p, ec);
    }
  }
  // Deepest first so parents empty out before we try them.
  std::sort(created_dirs_.begin(), created_dirs_.end(),
            [](const std::string& a, const std::string& b) { return a.size() > b.size(); });
  for (const auto& dir : created_dirs_) {
    std::error_code ec;
    if (fs::is_directory(root_ / dir, ec) && fs::is_empty(root_ / dir, ec)) fs::remove(root_ / dir, ec);
  }
  originals_.clear();
  created_dirs_.clear();
}

Workspace::Workspace(fs::path root) : root_(fs::absolute(std::move(root)).lexically_normal()) {
  auto s = root_.generic_string();
  if (s.size() > 1 && s.back() == '/') root_ = fs::path(s.substr(0, s.size() - 1));
}

std::string Workspace::checked(std::string_view rel) const {
  auto norm = normalize_relative(rel);
  if (!norm) fail(ErrorCode::PathOutsideProject, "path escapes project root: " + std::string(rel));
  return *norm;
}

fs::path Workspace::abs(std::string_view rel) const { return root_ / checked(rel); }

bool Workspace::exists(std::string_view rel) const {
  std::error_code ec;
  return fs::exists(abs(rel), ec);
}

bool Workspace::is_directory(std::string_view rel) const {
  std::error_code ec;
  return fs::is_directory(abs(rel), ec);
}

std::optional<std::string> Workspace::read(std::string_view rel) const {
  auto p = abs(rel);
  std::error_code ec;
  if (!fs::is_regular_file(p, ec)) return std::nullopt;
  return read_text_file(p);
}

void Workspace::before_write(const std::string& rel) {
  if (journal_) {
    journal_->track_dirs_for(rel);
    journal_->track_file(rel);
  }
}

void Workspace::write(std::string_view rel, std::string_view bytes) {
  std::lock_guard lock(mu_);
  auto norm = checked(rel);
  before_write(norm);
  write_text_file(root_ / norm, bytes);
}

void Workspace::append(std::string_view rel, std::string_view bytes) {
  std::lock_guard lock(mu_);
  auto norm = checked(rel);
  before_write(norm);
  auto p = root_ / norm;
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::app);
  if (!out) fail(ErrorCode::IoError, "cannot append to " + p.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
}

void Workspace::remove(std::string_view rel) {
  std::lock_guard lock(mu_);
  auto norm = checked(rel);
  before_write(norm);
  std::error_code ec;
  fs::remove(root_ / norm, ec);
}

std::vector<std::string> Workspace::list_files(std::string_view dir) const {
  std::vector<std::string> out;
  fs::path base = dir.empty() ? root_ : abs(dir);
  std::error_code ec;
  if (!fs::is_directory(base, ec)) return out;
  for (auto it = fs::recursive_directory_iterator(base, ec); it != fs::recursive_directory_iterator();
       it.increment(ec)) {
    if (ec) break;
    auto rel = it->path().lexically_relative(root_).generic_string();
    if (it->is_directory() && rel == kStateDir) {
      it.disable_recursion_pending();
      continue;
    }
    if (it->is_regular_file()) out.push_back(rel);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Workspace::Transaction::Transaction(Workspace& ws) : ws_(ws) {
  std::lock_guard lock(ws_.mu_);
  if (ws_.journal_) fail(ErrorCode::Internal, "nested workspace transaction");
  ws_.journal_ = std::make_unique<FileJournal>(ws_.root_);
}

Workspace::Transaction::~Transaction() {
  if (!done_) {
    try {
      rollback();
    } catch (...) {
    }
  }
}

void Workspace::Transaction::commit() {
  std::lock_guard lock(ws_.mu_);
  ws_.journal_.reset();
  done_ = true;
}

void Workspace::Transaction::rollback() {
  std::lock_guard lock(ws_.mu_);
  if (ws_.journal_) {
    auto journal = std::move(ws_.journal_);
    journal->rollback();
  }
  done_ = true;
}

}  // namespace specflow
