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

#include <string>
#include <string_view>
#include <vector>

namespace specflow::text {

struct Line {
  std::string_view text;  // without the '\n'
  size_t number = 0;      // 1-based
  size_t end_offset = 0;  // offset just past the '\n' (or end of input)
};

std::vector<Line> split_lines(std::string_view s);

inline std::string_view strip_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);

inline bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}
inline bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

/// `[a, b, "c"]` -> {a, b, c}; a bare scalar is a one-item list; `[]` and
/// the empty string are empty lists.
std::vector<std::string> parse_inline_list(std::string_view value);

}  // namespace specflow::text
