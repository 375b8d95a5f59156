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

// External static checks. Each configured tool runs as a subprocess with
// the target directory appended to its argv; its output is parsed into
// Diagnostics, and the gate fails when any diagnostic meets its tool's
// threshold.
//
// gcc-style grammar, one diagnostic per line:
//
//   <file>:<line>[:<col>]: <severity>: <message>
//
// json_lines: one object per line with file, line, column, severity, message.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace specflow {

enum class Severity { Error, Warning, Info };
enum class DiagnosticFormat { GccStyle, JsonLines };

std::string_view to_string(Severity s);
std::optional<Severity> parse_severity(std::string_view text);
std::string_view to_string(DiagnosticFormat f);
std::optional<DiagnosticFormat> parse_diagnostic_format(std::string_view text);

/// Case-insensitive; unknown spellings map to warning.
Severity map_tool_severity(std::string_view spelled);

struct CheckConfig {
  std::string name;
  std::vector<std::string> command;
  DiagnosticFormat format = DiagnosticFormat::GccStyle;
  Severity threshold = Severity::Error;  // error or warning

  /// Throws InvalidConfig.
  void validate() const;
};

struct Diagnostic {
  std::string file;
  int line = 1;
  std::optional<int> column;
  Severity severity = Severity::Error;
  std::string message;
  std::string tool;
  std::string spelled_severity;  // as printed by the tool

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

struct ParsedOutput {
  std::vector<Diagnostic> diagnostics;
  size_t ignored_lines = 0;
};

/// Total over arbitrary input.
ParsedOutput parse_gcc_style(std::string_view output, std::string_view tool);

/// Throws ParseFailure carrying the raw output.
std::vector<Diagnostic> parse_json_lines(std::string_view output, std::string_view tool);

/// (file, line, column) with a missing column first; tool and message
/// break the remaining ties.
void sort_diagnostics(std::vector<Diagnostic>& diagnostics);

struct CheckRun {
  std::string tool;
  int exit_code = 0;
  size_t diagnostics = 0;
  size_t ignored_lines = 0;
};

struct CheckReport {
  std::vector<Diagnostic> diagnostics;
  std::vector<CheckRun> runs;
};

/// Runs every check with cwd = `project_root` and `target_dir` (relative to
/// the root) appended. Checks run concurrently. Throws ToolNotFound,
/// ParseFailure, NotFound (target missing).
CheckReport run_checks(const std::vector<CheckConfig>& configs, const std::filesystem::path& project_root,
                       const std::vector<std::string>& target_dirs);

struct GateResult {
  bool pass = true;
  std::vector<Diagnostic> blocking;

  friend bool operator==(const GateResult&, const GateResult&) = default;
};

GateResult gate_status(const std::vector<Diagnostic>& diagnostics, const std::vector<CheckConfig>& configs);

}  // namespace specflow
