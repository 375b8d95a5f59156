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

// Project-relative path handling shared by every layer: normalization with
// a traversal guard, the top-level-directory layer convention, and the glob
// dialect used by resource references.

#include <optional>
#include <string>
#include <string_view>

namespace specflow {

enum class Layer { Command, Context, Code, Data };

std::string_view to_string(Layer layer);
std::optional<Layer> parse_layer(std::string_view text);

/// Classifies by top-level directory: commands/, docs/, src/ or scripts/,
/// data/. Anything else has no layer.
std::optional<Layer> layer_of(std::string_view relative_path);

/// Lexically normalizes a project-relative path: strips "./" segments,
/// folds "a/../", keeps a trailing slash. Returns nullopt for empty,
/// absolute, backslashed, or root-escaping input.
std::optional<std::string> normalize_relative(std::string_view path);

/// True when `path` equals `dir` or lies beneath it. `dir` may omit the
/// trailing slash.
bool is_under(std::string_view path, std::string_view dir);

/// Glob match over '/'-separated paths. `*` and `?` stay within a segment,
/// `**` spans any number of segments, and a pattern ending in '/' matches
/// everything below that directory.
bool glob_match(std::string_view pattern, std::string_view path);

bool has_glob_chars(std::string_view pattern);

enum class RefKind { DataPath, ContextDoc, CodePath };

std::string_view to_string(RefKind kind);

struct ResourceRef {
  RefKind kind = RefKind::DataPath;
  std::string pattern;

  /// Validates and classifies; throws Error(InvalidRef) on traversal, empty
  /// or absolute input, or a top-level directory outside docs/ data/ src/
  /// scripts/.
  static ResourceRef parse(std::string_view text);

  bool matches(std::string_view path) const { return glob_match(pattern, path); }

  friend bool operator==(const ResourceRef&, const ResourceRef&) = default;
};

}  // namespace specflow
