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

#include "specflow/quality_gates.hpp"

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <future>
#include <map>
#include <tuple>

#include "json.hpp"
#include "specflow/error.hpp"
#include "specflow/text.hpp"

namespace specflow {

namespace fs = std::filesystem;

std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::Error:
      return "error";
    case Severity::Warning:
      return "warning";
    case Severity::Info:
      return "info";
  }
  return "error";
}

std::optional<Severity> parse_severity(std::string_view text) {
  if (text == "error") return Severity::Error;
  if (text == "warning") return Severity::Warning;
  if (text == "info") return Severity::Info;
  return std::nullopt;
}

std::string_view to_string(DiagnosticFormat f) {
  return f == DiagnosticFormat::JsonLines ? "json_lines" : "gcc_style";
}

std::optional<DiagnosticFormat> parse_diagnostic_format(std::string_view text) {
  if (text == "gcc_style") return DiagnosticFormat::GccStyle;
  if (text == "json_lines") return DiagnosticFormat::JsonLines;
  return std::nullopt;
}

Severity map_tool_severity(std::string_view spelled) {
  auto s = text::to_lower(text::trim(spelled));
  if (s == "error" || s == "fatal" || s == "fatal error" || s == "fatal_error") return Severity::Error;
  if (s == "warning" || s == "warn") return Severity::Warning;
  if (s == "info" || s == "note" || s == "information" || s == "hint") return Severity::Info;
  return Severity::Warning;
}

void CheckConfig::validate() const {
  if (name.empty()) fail(ErrorCode::InvalidConfig, "check has no name");
  if (command.empty() || command.front().empty()) fail(ErrorCode::InvalidConfig, "check '" + name + "' has an empty command");
  if (threshold == Severity::Info) fail(ErrorCode::InvalidConfig, "check '" + name + "' threshold must be error or warning");
}

namespace {

bool parse_positive(std::string_view s, size_t& pos, int& out) {
  size_t start = pos;
  long long v = 0;
  while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
    v = v * 10 + (s[pos] - '0');
    if (v > 1000000000) return false;
    ++pos;
  }
  if (pos == start || v < 1) return false;
  out = static_cast<int>(v);
  return true;
}

bool is_severity_char(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '-' || c == '_'; }

// Tries to read "<line>[:<col>]: <severity>: <message>" starting just after
// the colon that ends the file name.
std::optional<Diagnostic> parse_tail(std::string_view line, size_t pos) {
  Diagnostic d;
  if (!parse_positive(line, pos, d.line)) return std::nullopt;
  if (pos < line.size() && line[pos] == ':' && pos + 1 < line.size() && line[pos + 1] >= '0' && line[pos + 1] <= '9') {
    ++pos;
    int col = 0;
    if (!parse_positive(line, pos, col)) return std::nullopt;
    d.column = col;
  }
  if (line.substr(pos, 2) != ": ") return std::nullopt;
  pos += 2;
  size_t sev_start = pos;
  if (line.substr(pos, 12) == "fatal error:") {
    pos += 11;
  } else {
    while (pos < line.size() && is_severity_char(line[pos])) ++pos;
  }
  if (pos == sev_start || pos >= line.size() || line[pos] != ':') return std::nullopt;
  d.spelled_severity = std::string(line.substr(sev_start, pos - sev_start));
  ++pos;
  if (pos < line.size()) {
    if (line[pos] != ' ') return std::nullopt;
    ++pos;
  }
  d.message = std::string(line.substr(pos));
  d.severity = map_tool_severity(d.spelled_severity);
  return d;
}

}  // namespace

ParsedOutput parse_gcc_style(std::string_view output, std::string_view tool) {
  ParsedOutput out;
  for (const auto& ln : text::split_lines(output)) {
    auto line = text::strip_cr(ln.text);
    if (text::trim(line).empty()) continue;
    std::optional<Diagnostic> d;
    // Leftmost colon that yields a valid tail wins.
    for (size_t colon = line.find(':'); colon != std::string_view::npos && !d; colon = line.find(':', colon + 1)) {
      if (colon == 0) continue;
      d = parse_tail(line, colon + 1);
      if (d) d->file = std::string(line.substr(0, colon));
    }
    if (!d) {
      ++out.ignored_lines;
      continue;
    }
    d->tool = std::string(tool);
    out.diagnostics.push_back(std::move(*d));
  }
  return out;
}

std::vector<Diagnostic> parse_json_lines(std::string_view output, std::string_view tool) {
  std::vector<Diagnostic> out;
  auto bad = [&](size_t number, const std::string& why) {
    fail(ErrorCode::ParseFailure, std::string(tool) + ": line " + std::to_string(number) + ": " + why +
                                      "\n--- raw output ---\n" + std::string(output));
  };
  for (const auto& ln : text::split_lines(output)) {
    auto line = text::trim(ln.text);
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
      bad(ln.number, e.what());
    }
    if (!j.is_object()) bad(ln.number, "not a JSON object");
    Diagnostic d;
    if (!j.contains("file") || !j["file"].is_string()) bad(ln.number, "missing string 'file'");
    if (!j.contains("line") || !j["line"].is_number_integer() || j["line"].get<long long>() < 1) {
      bad(ln.number, "'line' must be a positive integer");
    }
    if (!j.contains("severity") || !j["severity"].is_string()) bad(ln.number, "missing string 'severity'");
    if (!j.contains("message") || !j["message"].is_string()) bad(ln.number, "missing string 'message'");
    d.file = j["file"].get<std::string>();
    d.line = static_cast<int>(j["line"].get<long long>());
    if (j.contains("column") && !j["column"].is_null()) {
      if (!j["column"].is_number_integer() || j["column"].get<long long>() < 1) bad(ln.number, "'column' must be a positive integer");
      d.column = static_cast<int>(j["column"].get<long long>());
    }
    d.spelled_severity = j["severity"].get<std::string>();
    d.severity = map_tool_severity(d.spelled_severity);
    d.message = j["message"].get<std::string>();
    d.tool = std::string(tool);
    out.push_back(std::move(d));
  }
  return out;
}

void sort_diagnostics(std::vector<Diagnostic>& diagnostics) {
  std::stable_sort(diagnostics.begin(), diagnostics.end(), [](const Diagnostic& a, const Diagnostic& b) {
    int ca = a.column.value_or(0), cb = b.column.value_or(0);
    return std::tie(a.file, a.line, ca, a.tool, a.message) < std::tie(b.file, b.line, cb, b.tool, b.message);
  });
}

namespace {

std::optional<std::string> resolve_executable(const std::string& program, const fs::path& root) {
  if (program.find('/') != std::string::npos) {
    fs::path p(program);
    if (p.is_relative()) p = root / p;
    if (::access(p.c_str(), X_OK) == 0 && !fs::is_directory(p)) return p.string();
    return std::nullopt;
  }
  const char* path_env = std::getenv("PATH");
  std::string_view dirs = path_env ? path_env : "/usr/local/bin:/usr/bin:/bin";
  size_t start = 0;
  while (start <= dirs.size()) {
    auto colon = dirs.find(':', start);
    if (colon == std::string_view::npos) colon = dirs.size();
    auto dir = dirs.substr(start, colon - start);
    fs::path p = fs::path(dir.empty() ? "." : std::string(dir)) / program;
    if (::access(p.c_str(), X_OK) == 0 && !fs::is_directory(p)) return p.string();
    start = colon + 1;
  }
  return std::nullopt;
}

struct ProcessResult {
  int exit_code = 0;
  std::string out;
  std::string err;
};

ProcessResult run_process(const std::string& exe, const std::vector<std::string>& argv, const fs::path& cwd) {
  int out_pipe[2], err_pipe[2];
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) fail(ErrorCode::IoError, "pipe failed");
  if (::pipe2(err_pipe, O_CLOEXEC) != 0) {
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    fail(ErrorCode::IoError, "pipe failed");
  }
  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);
  std::string cwd_s = cwd.string();

  pid_t pid = ::fork();
  if (pid < 0) fail(ErrorCode::IoError, "fork failed");
  if (pid == 0) {
    int devnull = ::open("/dev/null", O_RDONLY);
    if (devnull >= 0) ::dup2(devnull, 0);
    ::dup2(out_pipe[1], 1);
    ::dup2(err_pipe[1], 2);
    if (::chdir(cwd_s.c_str()) != 0) ::_exit(126);
    ::execv(exe.c_str(), args.data());
    ::_exit(127);
  }
  ::close(out_pipe[1]);
  ::close(err_pipe[1]);

  ProcessResult r;
  pollfd fds[2] = {{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}};
  std::string* sinks[2] = {&r.out, &r.err};
  int open_fds = 2;
  char buf[8192];
  while (open_fds > 0) {
    if (::poll(fds, 2, -1) < 0) {
      if (errno == EINTR) continue;
      break;
    }
    for (int i = 0; i < 2; ++i) {
      if (fds[i].fd < 0 || !(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
      auto n = ::read(fds[i].fd, buf, sizeof buf);
      if (n > 0) {
        sinks[i]->append(buf, static_cast<size_t>(n));
      } else if (n == 0 || errno != EINTR) {
        ::close(fds[i].fd);
        fds[i].fd = -1;
        --open_fds;
      }
    }
  }
  for (auto& f : fds) {
    if (f.fd >= 0) ::close(f.fd);
  }
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
  return r;
}

struct SingleRun {
  CheckRun run;
  std::vector<Diagnostic> diagnostics;
};

SingleRun run_one(const CheckConfig& cfg, const fs::path& root, const std::vector<std::string>& targets) {
  cfg.validate();
  auto exe = resolve_executable(cfg.command.front(), root);
  if (!exe) fail(ErrorCode::ToolNotFound, "check '" + cfg.name + "': command not found: " + cfg.command.front());
  auto argv = cfg.command;
  argv.insert(argv.end(), targets.begin(), targets.end());
  auto proc = run_process(*exe, argv, root);
  if (proc.exit_code == 127 && proc.out.empty() && proc.err.empty()) {
    fail(ErrorCode::ToolNotFound, "check '" + cfg.name + "': could not execute " + *exe);
  }

  SingleRun result;
  result.run.tool = cfg.name;
  result.run.exit_code = proc.exit_code;
  if (cfg.format == DiagnosticFormat::JsonLines) {
    result.diagnostics = parse_json_lines(proc.out, cfg.name);
  } else {
    auto parsed = parse_gcc_style(proc.out + (proc.err.empty() || proc.out.empty() || proc.out.back() == '\n' ? "" : "\n") + proc.err, cfg.name);
    result.diagnostics = std::move(parsed.diagnostics);
    result.run.ignored_lines = parsed.ignored_lines;
  }
  if (proc.exit_code != 0 && result.diagnostics.empty()) {
    // A failing tool that reports nothing must still block.
    Diagnostic d;
    d.file = targets.empty() ? "." : targets.front();
    d.line = 1;
    d.severity = Severity::Error;
    d.spelled_severity = "error";
    d.message = "tool failed without findings (exit status " + std::to_string(proc.exit_code) + ")";
    d.tool = cfg.name;
    result.diagnostics.push_back(std::move(d));
  }
  result.run.diagnostics = result.diagnostics.size();
  return result;
}

}  // namespace

CheckReport run_checks(const std::vector<CheckConfig>& configs, const fs::path& project_root,
                       const std::vector<std::string>& target_dirs) {
  for (const auto& t : target_dirs) {
    if (!fs::exists(project_root / t)) fail(ErrorCode::NotFound, "check target does not exist: " + t);
  }
  std::vector<std::future<SingleRun>> futures;
  futures.reserve(configs.size());
  for (const auto& cfg : configs) {
    futures.push_back(std::async(std::launch::async, [&cfg, &project_root, &target_dirs] {
      return run_one(cfg, project_root, target_dirs);
    }));
  }
  CheckReport report;
  std::optional<Error> first_error;
  for (auto& f : futures) {
    try {
      auto single = f.get();
      report.runs.push_back(single.run);
      report.diagnostics.insert(report.diagnostics.end(), single.diagnostics.begin(), single.diagnostics.end());
    } catch (const Error& e) {
      if (!first_error) first_error = e;
    }
  }
  if (first_error) throw *first_error;
  sort_diagnostics(report.diagnostics);
  return report;
}

GateResult gate_status(const std::vector<Diagnostic>& diagnostics, const std::vector<CheckConfig>& configs) {
  std::map<std::string, Severity> thresholds;
  for (const auto& c : configs) thresholds[c.name] = c.threshold;
  GateResult result;
  for (const auto& d : diagnostics) {
    auto it = thresholds.find(d.tool);
    auto threshold = it == thresholds.end() ? Severity::Error : it->second;
    // Error < Warning < Info in enum order; lower is more severe.
    if (static_cast<int>(d.severity) <= static_cast<int>(threshold)) result.blocking.push_back(d);
  }
  result.pass = result.blocking.empty();
  return result;
}

}  // namespace specflow
