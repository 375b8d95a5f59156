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


#include "test_support.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "specflow/paths.hpp"
#include "specflow/project.hpp"

namespace testsupport {

using specflow::EdgeKind;
using specflow::Layer;

TempDir::TempDir() {
  auto templ = (fs::temp_directory_path() / "specflow-test-XXXXXX").string();
  std::vector<char> buf(templ.begin(), templ.end());
  buf.push_back('\0');
  if (!::mkdtemp(buf.data())) throw std::runtime_error("mkdtemp failed");
  path_ = buf.data();
}

TempDir::~TempDir() {
  std::error_code ec;
  // Raw files are made read-only; restore write bits so removal succeeds.
  for (auto it = fs::recursive_directory_iterator(path_, ec); !ec && it != fs::recursive_directory_iterator();
       it.increment(ec)) {
    fs::permissions(it->path(), fs::perms::owner_all, fs::perm_options::add, ec);
  }
  fs::remove_all(path_, ec);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& content) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << content;
}

std::string gate_stub_path() { return SPECFLOW_GATE_STUB; }
fs::path resource_dir() { return SPECFLOW_TEST_RESOURCES; }

void make_canonical_project(const fs::path& root, bool scripted) {
  specflow::scaffold(root);
  auto canon = resource_dir() / "canonical";
  fs::copy_file(canon / "data/raw/boston.csv", root / "data/raw/boston.csv");
  auto config = specflow::ProjectConfig::defaults();
  config.gates = {{"stub", {gate_stub_path()}, specflow::DiagnosticFormat::GccStyle, specflow::Severity::Error}};
  if (scripted) {
    fs::copy_file(canon / "transcript.jsonl", root / "transcript.jsonl");
    config.backend = specflow::BackendKind::Scripted;
    config.transcript = "transcript.jsonl";
  }
  spit(root / "specflow.json", config.to_json().dump(2) + "\n");
}

namespace {

void strip_times(nlohmann::ordered_json& j) {
  if (j.is_object()) {
    for (const char* k : {"at", "created_at", "registered_at"}) j.erase(k);
    for (auto& [k, v] : j.items()) strip_times(v);
  } else if (j.is_array()) {
    for (auto& v : j) strip_times(v);
  }
}

std::string normalized(const std::string& rel, const std::string& bytes) {
  auto ends = [&](const char* suf) {
    std::string s = suf;
    return rel.size() >= s.size() && rel.compare(rel.size() - s.size(), s.size(), s) == 0;
  };
  if (ends(".json")) {
    auto j = nlohmann::ordered_json::parse(bytes, nullptr, false);
    if (j.is_discarded()) return bytes;
    strip_times(j);
    return j.dump();
  }
  if (ends(".jsonl")) {
    std::istringstream in(bytes);
    std::string line, out;
    while (std::getline(in, line)) {
      auto j = nlohmann::ordered_json::parse(line, nullptr, false);
      if (j.is_discarded()) {
        out += line;
      } else {
        strip_times(j);
        out += j.dump();
      }
      out += "\n";
    }
    return out;
  }
  return bytes;
}

}  // namespace

std::map<std::string, std::string> tree_contents(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    auto rel = fs::relative(e.path(), root).generic_string();
    if (e.is_directory()) {
      out[rel + "/"] = "";
    } else if (e.is_regular_file()) {
      out[rel] = normalized(rel, slurp(e.path()));
    }
  }
  return out;
}

std::map<std::string, std::string> tree_snapshot(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    auto rel = fs::relative(e.path(), root).generic_string();
    auto mode = std::to_string(static_cast<unsigned>(e.symlink_status().permissions()));
    if (e.is_directory()) {
      out[rel + "/"] = mode;
    } else {
      out[rel] = mode + ":" + slurp(e.path());
    }
  }
  return out;
}

std::vector<std::vector<bool>> reachability(size_t n, const std::vector<std::pair<size_t, size_t>>& edges) {
  std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
  for (auto [a, b] : edges) r[a][b] = true;
  for (size_t k = 0; k < n; ++k) {
    for (size_t i = 0; i < n; ++i) {
      if (!r[i][k]) continue;
      for (size_t j = 0; j < n; ++j) {
        if (r[k][j]) r[i][j] = true;
      }
    }
  }
  return r;
}

std::set<std::string> ancestors(const std::map<std::string, std::set<std::string>>& parents, const std::string& start) {
  std::set<std::string> found;
  bool grew = true;
  while (grew) {
    grew = false;
    std::set<std::string> frontier = found;
    frontier.insert(start);
    for (const auto& node : frontier) {
      auto it = parents.find(node);
      if (it == parents.end()) continue;
      for (const auto& p : it->second) grew |= found.insert(p).second;
    }
  }
  return found;
}

specflow::DependencyGraph random_dag(std::mt19937& rng, size_t n, double density) {
  static const Layer kLayers[] = {Layer::Command, Layer::Context, Layer::Code, Layer::Data};
  std::uniform_int_distribution<int> pick(0, 3);
  std::bernoulli_distribution coin(density);
  std::vector<specflow::GraphNode> nodes;
  for (size_t i = 0; i < n; ++i) {
    Layer layer = kLayers[pick(rng)];
    std::string id;
    switch (layer) {
      case Layer::Command: id = "@n" + std::to_string(i) + ".md"; break;
      case Layer::Context: id = "docs/n" + std::to_string(i) + ".md"; break;
      case Layer::Code: id = "src/n" + std::to_string(i) + ".py"; break;
      case Layer::Data: id = "data/processed/n" + std::to_string(i) + ".csv"; break;
    }
    nodes.push_back({id, layer, layer == Layer::Command ? "" : id, specflow::Freshness::Fresh});
  }
  std::vector<specflow::GraphEdge> edges;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      auto kind = specflow::edge_kind_for(nodes[i].layer, nodes[j].layer);
      if (kind && coin(rng)) edges.push_back({nodes[i].id, nodes[j].id, *kind});
    }
  }
  return specflow::DependencyGraph::assemble(std::move(nodes), std::move(edges), {});
}

std::string shell_quote(const std::string& arg) {
  std::string out = "'";
  for (char c : arg) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

Proc run_process(const std::vector<std::string>& argv) {
  TempDir scratch;
  auto err_path = scratch.path() / "stderr";
  std::string cmd;
  for (const auto& a : argv) cmd += shell_quote(a) + " ";
  cmd += "2>" + shell_quote(err_path.string()) + " </dev/null";
  Proc p;
  FILE* f = popen(cmd.c_str(), "r");
  if (!f) throw std::runtime_error("popen failed");
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, f)) > 0) p.out.append(buf, n);
  int status = pclose(f);
  p.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  if (fs::exists(err_path)) p.err = slurp(err_path);
  return p;
}

}  // namespace testsupport
