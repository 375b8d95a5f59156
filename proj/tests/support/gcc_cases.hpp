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

// Grammar table for "<file>:<line>[:<col>]: <severity>: <message>" lines.
// Expected fields are written out by hand from the grammar.

#include <optional>
#include <string>
#include <vector>

#include "specflow/quality_gates.hpp"

namespace testsupport {

struct GccCase {
  std::string input;
  bool matches;
  std::string file;
  int line = 0;
  std::optional<int> column;
  specflow::Severity severity = specflow::Severity::Warning;
  std::string spelled;
  std::string message;
};

inline std::vector<GccCase> gcc_cases() {
  using specflow::Severity;
  return {
      {"a.py:1: error: x", true, "a.py", 1, std::nullopt, Severity::Error, "error", "x"},
      {"a.py:3:7: warning: y", true, "a.py", 3, 7, Severity::Warning, "warning", "y"},
      {"src/models.py:12:5: error: bad type", true, "src/models.py", 12, 5, Severity::Error, "error", "bad type"},
      {"src/m.py:10:2: note: see here", true, "src/m.py", 10, 2, Severity::Info, "note", "see here"},
      {"src/m.py:4: ERROR: shout", true, "src/m.py", 4, std::nullopt, Severity::Error, "ERROR", "shout"},
      {"src/m.py:4:1: fatal error: boom", true, "src/m.py", 4, 1, Severity::Error, "fatal error", "boom"},
      {"src/m.py:8:3: Warning: cap", true, "src/m.py", 8, 3, Severity::Warning, "Warning", "cap"},
      {"src/m.py:9: hint: try this", true, "src/m.py", 9, std::nullopt, Severity::Info, "hint", "try this"},
      {"src/m.py:2:1: weird: unknown", true, "src/m.py", 2, 1, Severity::Warning, "weird", "unknown"},
      {"C:/x.py:1: error: drive letter", true, "C:/x.py", 1, std::nullopt, Severity::Error, "error", "drive letter"},
      {"src/a b.py:5:6: error: space in name", true, "src/a b.py", 5, 6, Severity::Error, "error", "space in name"},
      {"src/m.py:7:9: error: msg: with: colons", true, "src/m.py", 7, 9, Severity::Error, "error", "msg: with: colons"},
      {"src/m.py:5: error:", true, "src/m.py", 5, std::nullopt, Severity::Error, "error", ""},
      {"src/m.py:123456:78: warn: big [code]", true, "src/m.py", 123456, 78, Severity::Warning, "warn", "big [code]"},
      {"src/m.py:0: error: zero line", false, "", 0, std::nullopt, Severity::Warning, "", ""},
      {"src/m.py:3:0: error: zero column", false, "", 0, std::nullopt, Severity::Warning, "", ""},
      {"random banner text", false, "", 0, std::nullopt, Severity::Warning, "", ""},
      {"src/m.py:abc: error: not a number", false, "", 0, std::nullopt, Severity::Warning, "", ""},
      {"src/m.py:5:error: no space", false, "", 0, std::nullopt, Severity::Warning, "", ""},
      {":5: error: no file", false, "", 0, std::nullopt, Severity::Warning, "", ""},
  };
}

}  // namespace testsupport
