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

#include "specflow/paths.hpp"

#include <vector>

#include "specflow/error.hpp"

namespace specflow {

std::string_view to_string(Layer layer) {
  switch (layer) {
    case Layer::Command: return "command";
    case Layer::Context: return "context";
    case Layer::Code: return "code";
    case Layer::Data: return "data";
  }
  return "unknown";
}

std::optional<Layer> parse_layer(std::string_view text) {
  if (text == "command") return Layer::Command;
  if (text == "context") return Layer::Context;
  if (text == "code") return Layer::Code;
  if (text == "data") return Layer::Data;
  return std::nullopt;
}

std::optional<Layer> layer_of(std::string_view path) {
  auto slash = path.find('/');
  if (slash == std::string_view::npos) return std::nullopt;
  auto top = path.substr(0, slash);
  if (top == "commands") return Layer::Command;
  if (top == "docs") return Layer::Context;
  if (top == "src" || top == "scripts") return Layer::Code;
  if (top == "data") return Layer::Data;
  return std::nullopt;
}

std::optional<std::string> normalize_relative(std::string_view path) {
  if (path.empty() || path.front() == '/') return std::nullopt;
  if (path.find('\\') != std::string_view::npos) return std::nullopt;
  if (path.find('\0') != std::string_view::npos) return std::nullopt;
  const bool trailing = path.back() == '/';

  std::vector<std::string_view> kept;
  size_t start = 0;
  while (start <= path.size()) {
    auto end = path.find('/', start);
    if (end == std::string_view::npos) end = path.size();
    auto seg = path.substr(start, end - start);
    if (seg == "..") {
      if (kept.empty()) return std::nullopt;
      kept.pop_back();
    } else if (!seg.empty() && seg != ".") {
      kept.push_back(seg);
    }
    start = end + 1;
  }
  if (kept.empty()) return std::nullopt;

  std::string out;
  for (size_t i = 0; i < kept.size(); ++i) {
    if (i) out += '/';
    out += kept[i];
  }
  if (trailing) out += '/';
  return out;
}

bool is_under(std::string_view path, std::string_view dir) {
  if (!dir.empty() && dir.back() == '/') dir.remove_suffix(1);
  if (path.size() < dir.size() || path.substr(0, dir.size()) != dir) return false;
  return path.size() == dir.size() || path[dir.size()] == '/';
}

bool has_glob_chars(std::string_view pattern) {
  return pattern.find_first_of("*?") != std::string_view::npos;
}

namespace {

bool match_segment(std::string_view pat, std::string_view text) {
  size_t p = 0, t = 0, star = std::string_view::npos, mark = 0;
  while (t < text.size()) {
    if (p < pat.size() && (pat[p] == '?' || pat[p] == text[t])) {
      ++p;
      ++t;
    } else if (p < pat.size() && pat[p] == '*') {
      star = p++;
      mark = t;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      t = ++mark;
    } else {
      return false;
    }
  }
  while (p < pat.size() && pat[p] == '*') ++p;
  return p == pat.size();
}

std::vector<std::string_view> split(std::string_view s) {
  std::vector<std::string_view> parts;
  size_t start = 0;
  while (start <= s.size()) {
    auto end = s.find('/', start);
    if (end == std::string_view::npos) end = s.size();
    parts.push_back(s.substr(start, end - start));
    start = end + 1;
  }
  return parts;
}

bool match_parts(const std::vector<std::string_view>& pat, size_t pi,
                 const std::vector<std::string_view>& text, size_t ti) {
  if (pi == pat.size()) return ti == text.size();
  if (pat[pi] == "**") {
    for (size_t k = ti; k <= text.size(); ++k) {
      if (match_parts(pat, pi + 1, text, k)) return true;
    }
    return false;
  }
  if (ti == text.size()) return false;
  return match_segment(pat[pi], text[ti]) && match_parts(pat, pi + 1, text, ti + 1);
}

}  // namespace

bool glob_match(std::string_view pattern, std::string_view path) {
  if (pattern.empty()) return false;
  if (pattern.back() == '/') {
    pattern.remove_suffix(1);
    if (!has_glob_chars(pattern)) return is_under(path, pattern) && path.size() > pattern.size();
    // Directory pattern with wildcards: match any prefix of the path.
    auto pat = split(pattern);
    auto text = split(path);
    for (size_t n = 1; n < text.size(); ++n) {
      std::vector<std::string_view> head(text.begin(), text.begin() + n);
      if (match_parts(pat, 0, head, 0)) return true;
    }
    return false;
  }
  if (!has_glob_chars(pattern)) return pattern == path;
  return match_parts(split(pattern), 0, split(path), 0);
}

std::string_view to_string(RefKind kind) {
  switch (kind) {
    case RefKind::DataPath: return "data_path";
    case RefKind::ContextDoc: return "context_doc";
    case RefKind::CodePath: return "code_path";
  }
  return "unknown";
}

ResourceRef ResourceRef::parse(std::string_view text) {
  auto norm = normalize_relative(text);
  if (!norm) {
    fail(ErrorCode::InvalidRef,
         "invalid resource reference '" + std::string(text) +
             "': must be a non-empty relative path inside the project root");
  }
  auto layer = layer_of(*norm);
  if (!layer || *layer == Layer::Command) {
    fail(ErrorCode::InvalidRef, "invalid resource reference '" + std::string(text) +
                                    "': top-level directory must be docs/, data/, src/ or scripts/");
  }
  ResourceRef ref;
  ref.pattern = *norm;
  switch (*layer) {
    case Layer::Context: ref.kind = RefKind::ContextDoc; break;
    case Layer::Code: ref.kind = RefKind::CodePath; break;
    default: ref.kind = RefKind::DataPath; break;
  }
  return ref;
}

}  // namespace specflow
