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

#include "specflow/workflow_graph.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "specflow/error.hpp"
#include "specflow/text.hpp"

namespace specflow {

using ojson = nlohmann::ordered_json;

const StageDecl* WorkflowSpec::find(std::string_view command) const {
  for (const auto& s : stages) {
    if (s.command == command) return &s;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Workflow document parsing

namespace {

size_t indent_of(std::string_view line) {
  size_t n = 0;
  while (n < line.size() && (line[n] == ' ' || line[n] == '\t')) ++n;
  return n;
}

// Heading level, or 0.
int heading_level(std::string_view line, std::string_view* title) {
  size_t n = 0;
  while (n < line.size() && line[n] == '#') ++n;
  if (n == 0 || n > 6 || n >= line.size() || line[n] != ' ') return 0;
  *title = text::trim(line.substr(n + 1));
  return static_cast<int>(n);
}

std::string_view strip_separator(std::string_view rest) {
  rest = text::trim(rest);
  for (std::string_view sep : {"\xE2\x80\x94", "\xE2\x80\x93", "--", "-", ":"}) {
    if (text::starts_with(rest, sep)) return text::trim(rest.substr(sep.size()));
  }
  return rest;
}

bool parse_bool(std::string_view v, bool* out) {
  auto s = text::to_lower(text::trim(v));
  if (s == "true" || s == "yes") {
    *out = true;
    return true;
  }
  if (s == "false" || s == "no") {
    *out = false;
    return true;
  }
  return false;
}

std::string where(std::string_view source_path, size_t line) {
  return (source_path.empty() ? std::string("workflow") : std::string(source_path)) + ":" +
         std::to_string(line);
}

}  // namespace

WorkflowSpec parse_workflow_doc(std::string_view source, std::string_view source_path) {
  WorkflowSpec spec;
  spec.source_path = std::string(source_path);

  bool in_section = false, found = false, in_fence = false;
  StageDecl* current = nullptr;

  for (const auto& ln : text::split_lines(source)) {
    auto line = text::strip_cr(ln.text);
    auto trimmed = text::trim(line);

    if (text::starts_with(trimmed, "```") || text::starts_with(trimmed, "~~~")) {
      in_fence = !in_fence;
      continue;
    }
    if (in_fence) continue;

    std::string_view title;
    if (int level = heading_level(line, &title)) {
      if (in_section && level <= 2) {
        in_section = false;
      } else if (!in_section && level == 2 && text::to_lower(title) == "workflow") {
        if (found) fail(ErrorCode::InvalidArgument, where(source_path, ln.number) + ": second workflow section");
        in_section = found = true;
      }
      current = nullptr;
      continue;
    }
    if (!in_section) continue;
    if (trimmed.empty()) continue;

    size_t indent = indent_of(line);
    auto body = line.substr(indent);
    bool bullet = body.size() >= 2 && (body[0] == '-' || body[0] == '*' || body[0] == '+') && body[1] == ' ';

    if (indent <= 3 && bullet) {
      auto item = text::trim(body.substr(2));
      if (item.empty() || item.front() != '@') {
        // Top-level prose bullets end the current stage; nested bullets may
        // still carry metadata.
        if (indent == 0) {
          current = nullptr;
          continue;
        }
      } else {
        auto end = item.find_first_of(" \t");
        auto token = item.substr(0, end);
        if (!text::ends_with(token, ".md") || token.size() <= 4) {
          fail(ErrorCode::InvalidArgument, where(source_path, ln.number) + ": stage reference '" +
                                               std::string(token) + "' must look like @name.md");
        }
        std::string name(token.substr(1, token.size() - 4));
        if (!is_valid_command_name(name)) {
          fail(ErrorCode::InvalidArgument, where(source_path, ln.number) + ": invalid stage name '" + name + "'");
        }
        if (spec.find(name)) {
          fail(ErrorCode::DuplicateStage, where(source_path, ln.number) + ": stage '" + name + "' declared twice");
        }
        StageDecl decl;
        decl.command = name;
        decl.description = std::string(strip_separator(end == std::string_view::npos ? "" : item.substr(end)));
        if (text::ends_with(text::to_lower(decl.description), "(optional)")) decl.optional = true;
        spec.stages.push_back(std::move(decl));
        current = &spec.stages.back();
        continue;
      }
    }

    if (indent == 0) {
      current = nullptr;
      continue;
    }

    auto meta = text::trim(body);
    if (meta.size() >= 2 && (meta[0] == '-' || meta[0] == '*') && meta[1] == ' ') meta = text::trim(meta.substr(2));
    auto colon = meta.find(':');
    if (colon == std::string_view::npos) continue;
    auto key = text::to_lower(text::trim(meta.substr(0, colon)));
    auto value = text::trim(meta.substr(colon + 1));
    if (key != "context" && key != "consumes" && key != "produces" && key != "optional") continue;
    if (!current) {
      fail(ErrorCode::DanglingMetadata,
           where(source_path, ln.number) + ": '" + key + ":' line has no preceding stage item");
    }
    if (key == "context") {
      auto ref = ResourceRef::parse(value);
      if (ref.kind != RefKind::ContextDoc) {
        fail(ErrorCode::InvalidRef, where(source_path, ln.number) + ": context artifact must be under docs/");
      }
      current->context_artifact = ref.pattern;
    } else if (key == "optional") {
      if (!parse_bool(value, &current->optional)) {
        fail(ErrorCode::InvalidArgument, where(source_path, ln.number) + ": optional must be true or false");
      }
    } else {
      auto& target = key == "consumes" ? current->consumes : current->produces;
      for (const auto& item : text::parse_inline_list(value)) {
        auto ref = ResourceRef::parse(item);
        if (std::find(target.begin(), target.end(), ref) == target.end()) target.push_back(std::move(ref));
      }
    }
  }

  if (!found) {
    fail(ErrorCode::NoWorkflowSection,
         (source_path.empty() ? std::string("workflow document") : std::string(source_path)) +
             ": no '## Workflow' section");
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Graph types

std::string_view to_string(Freshness f) {
  switch (f) {
    case Freshness::Fresh: return "fresh";
    case Freshness::Stale: return "stale";
    case Freshness::Missing: return "missing";
  }
  return "unknown";
}

std::optional<Freshness> parse_freshness(std::string_view text) {
  if (text == "fresh") return Freshness::Fresh;
  if (text == "stale") return Freshness::Stale;
  if (text == "missing") return Freshness::Missing;
  return std::nullopt;
}

std::string_view to_string(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::CommandToContext: return "command_to_context";
    case EdgeKind::ContextToCode: return "context_to_code";
    case EdgeKind::CodeToData: return "code_to_data";
    case EdgeKind::DataToContext: return "data_to_context";
    case EdgeKind::CodeToCode: return "code_to_code";
    case EdgeKind::DataToData: return "data_to_data";
    case EdgeKind::ContextToContext: return "context_to_context";
  }
  return "unknown";
}

std::optional<EdgeKind> parse_edge_kind(std::string_view text) {
  for (auto k : {EdgeKind::CommandToContext, EdgeKind::ContextToCode, EdgeKind::CodeToData,
                 EdgeKind::DataToContext, EdgeKind::CodeToCode, EdgeKind::DataToData,
                 EdgeKind::ContextToContext}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::optional<EdgeKind> edge_kind_for(Layer from, Layer to) {
  using L = Layer;
  if (from == L::Command && to == L::Context) return EdgeKind::CommandToContext;
  if (from == L::Context && to == L::Code) return EdgeKind::ContextToCode;
  if (from == L::Code && to == L::Data) return EdgeKind::CodeToData;
  if (from == L::Data && to == L::Context) return EdgeKind::DataToContext;
  if (from == L::Code && to == L::Code) return EdgeKind::CodeToCode;
  if (from == L::Data && to == L::Data) return EdgeKind::DataToData;
  if (from == L::Context && to == L::Context) return EdgeKind::ContextToContext;
  return std::nullopt;
}

std::string command_node_id(std::string_view command) { return "@" + std::string(command) + ".md"; }

namespace {

void invalid(const std::string& msg) { fail(ErrorCode::InvalidArgument, "invalid graph: " + msg); }

}  // namespace

void DependencyGraph::index() {
  by_id_.clear();
  out_.assign(nodes_.size(), {});
  for (size_t i = 0; i < nodes_.size(); ++i) {
    if (!by_id_.emplace(nodes_[i].id, i).second) invalid("duplicate node id '" + nodes_[i].id + "'");
  }
  for (const auto& e : edges_) {
    auto f = by_id_.find(e.from), t = by_id_.find(e.to);
    if (f == by_id_.end() || t == by_id_.end()) invalid("edge " + e.from + " -> " + e.to + " has a missing endpoint");
    out_[f->second].push_back(t->second);
  }
}

DependencyGraph DependencyGraph::assemble(std::vector<GraphNode> nodes, std::vector<GraphEdge> edges,
                                          std::vector<StageEntry> stages) {
  DependencyGraph g;
  g.nodes_ = std::move(nodes);
  g.edges_ = std::move(edges);
  g.stages_ = std::move(stages);
  g.index();

  for (const auto& n : g.nodes_) {
    if (n.layer != Layer::Command) {
      auto layer = layer_of(n.path);
      if (!layer || *layer != n.layer) invalid("node '" + n.id + "' layer does not match its path");
    }
  }
  std::set<std::tuple<std::string, std::string, int>> seen;
  for (const auto& e : g.edges_) {
    const auto* from = g.find(e.from);
    const auto* to = g.find(e.to);
    auto expected = edge_kind_for(from->layer, to->layer);
    if (!expected || *expected != e.kind) {
      invalid("edge " + e.from + " -> " + e.to + " kind " + std::string(to_string(e.kind)) +
              " does not match layers " + std::string(to_string(from->layer)) + "/" +
              std::string(to_string(to->layer)));
    }
    if (!seen.emplace(e.from, e.to, static_cast<int>(e.kind)).second) {
      invalid("duplicate edge " + e.from + " -> " + e.to);
    }
  }
  std::set<std::string> names;
  for (const auto& s : g.stages_) {
    if (!names.insert(s.name).second) invalid("duplicate stage '" + s.name + "'");
    const auto* node = g.find(s.node);
    if (!node || node->layer != Layer::Command) invalid("stage '" + s.name + "' has no command node");
    for (const auto* list : {&s.consumes, &s.produces}) {
      for (const auto& id : *list) {
        const auto* n = g.find(id);
        if (!n || n->layer == Layer::Command) invalid("stage '" + s.name + "' references unknown artifact '" + id + "'");
      }
    }
  }
  return g;
}

const GraphNode* DependencyGraph::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &nodes_[it->second];
}

size_t DependencyGraph::index_of(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  if (it == by_id_.end()) fail(ErrorCode::UnknownNode, "unknown graph node '" + std::string(id) + "'");
  return it->second;
}

const StageEntry* DependencyGraph::find_stage(std::string_view name) const {
  for (const auto& s : stages_) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::set<std::string> DependencyGraph::producers_of(const std::set<std::string>& nodes) const {
  std::set<std::string> out;
  for (const auto& s : stages_) {
    for (const auto& p : s.produces) {
      if (nodes.count(p)) {
        out.insert(s.name);
        break;
      }
    }
  }
  return out;
}

namespace {

// Stage index -> indices of stages it directly depends on.
std::vector<std::vector<size_t>> stage_dependencies(const std::vector<StageEntry>& stages) {
  std::vector<std::vector<size_t>> deps(stages.size());
  for (size_t b = 0; b < stages.size(); ++b) {
    for (size_t a = 0; a < stages.size(); ++a) {
      if (a == b) continue;
      bool feeds = std::any_of(stages[a].produces.begin(), stages[a].produces.end(), [&](const std::string& p) {
        return std::find(stages[b].consumes.begin(), stages[b].consumes.end(), p) != stages[b].consumes.end();
      });
      if (feeds) deps[b].push_back(a);
    }
  }
  return deps;
}

}  // namespace

std::vector<std::string> DependencyGraph::upstream_stages(std::string_view stage) const {
  size_t start = stages_.size();
  for (size_t i = 0; i < stages_.size(); ++i) {
    if (stages_[i].name == stage) start = i;
  }
  if (start == stages_.size()) return {};
  auto deps = stage_dependencies(stages_);
  std::vector<bool> seen(stages_.size(), false);
  std::deque<size_t> todo{start};
  seen[start] = true;
  while (!todo.empty()) {
    auto s = todo.front();
    todo.pop_front();
    for (auto d : deps[s]) {
      if (!seen[d]) {
        seen[d] = true;
        todo.push_back(d);
      }
    }
  }
  std::vector<std::string> out;
  for (size_t i = 0; i < stages_.size(); ++i) {
    if (seen[i] && i != start) out.push_back(stages_[i].name);
  }
  return out;
}

DependencyGraph DependencyGraph::with_freshness(const std::map<std::string, Freshness>& freshness) const {
  DependencyGraph g = *this;
  for (auto& n : g.nodes_) {
    auto it = freshness.find(n.id);
    if (it != freshness.end()) n.freshness = it->second;
  }
  return g;
}

bool operator==(const DependencyGraph& a, const DependencyGraph& b) {
  auto node_key = [](const GraphNode& n) { return std::tuple(n.id, static_cast<int>(n.layer), n.path, static_cast<int>(n.freshness)); };
  auto edge_key = [](const GraphEdge& e) { return std::tuple(e.from, e.to, static_cast<int>(e.kind)); };
  auto sorted_nodes = [&](const DependencyGraph& g) {
    std::vector<decltype(node_key(g.nodes_[0]))> v;
    for (const auto& n : g.nodes_) v.push_back(node_key(n));
    std::sort(v.begin(), v.end());
    return v;
  };
  auto sorted_edges = [&](const DependencyGraph& g) {
    std::vector<std::tuple<std::string, std::string, int>> v;
    for (const auto& e : g.edges_) v.push_back(edge_key(e));
    std::sort(v.begin(), v.end());
    return v;
  };
  if (a.nodes_.size() != b.nodes_.size() || a.edges_.size() != b.edges_.size()) return false;
  if (a.nodes_.empty() != b.nodes_.empty()) return false;
  if (!a.nodes_.empty() && sorted_nodes(a) != sorted_nodes(b)) return false;
  return sorted_edges(a) == sorted_edges(b) && a.stages_ == b.stages_;
}

// ---------------------------------------------------------------------------
// Compilation and analysis

namespace {

// Iterative three-colour DFS over artifact nodes. Returns the cycle, with the
// first node repeated at the end, or empty.
std::vector<std::string> find_artifact_cycle(const DependencyGraph& g) {
  const auto& nodes = g.nodes();
  enum Color : char { White, Grey, Black };
  std::vector<Color> color(nodes.size(), White);
  std::vector<size_t> parent(nodes.size(), SIZE_MAX);

  for (size_t root = 0; root < nodes.size(); ++root) {
    if (color[root] != White || nodes[root].layer == Layer::Command) continue;
    std::vector<std::pair<size_t, size_t>> stack{{root, 0}};
    color[root] = Grey;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      const auto& succ = g.successors(v);
      if (next < succ.size()) {
        size_t w = succ[next++];
        if (nodes[w].layer == Layer::Command) continue;
        if (color[w] == Grey) {
          std::vector<std::string> cycle{nodes[w].id};
          for (size_t u = v; u != w; u = parent[u]) cycle.push_back(nodes[u].id);
          cycle.push_back(nodes[w].id);
          std::reverse(cycle.begin() + 1, cycle.end() - 1);
          return cycle;
        }
        if (color[w] == White) {
          color[w] = Grey;
          parent[w] = v;
          stack.emplace_back(w, 0);
        }
      } else {
        color[v] = Black;
        stack.pop_back();
      }
    }
  }
  return {};
}

// Kahn over stage dependencies with document-order priority. On a cycle,
// throws with one concrete stage cycle.
std::vector<std::string> order_stages(const std::vector<StageEntry>& stages) {
  auto deps = stage_dependencies(stages);
  std::vector<size_t> pending(stages.size(), 0);
  std::vector<std::vector<size_t>> dependents(stages.size());
  for (size_t b = 0; b < stages.size(); ++b) {
    pending[b] = deps[b].size();
    for (auto a : deps[b]) dependents[a].push_back(b);
  }
  std::priority_queue<size_t, std::vector<size_t>, std::greater<>> ready;
  for (size_t i = 0; i < stages.size(); ++i) {
    if (pending[i] == 0) ready.push(i);
  }
  std::vector<std::string> order;
  std::vector<bool> done(stages.size(), false);
  while (!ready.empty()) {
    auto s = ready.top();
    ready.pop();
    done[s] = true;
    order.push_back(stages[s].name);
    for (auto d : dependents[s]) {
      if (--pending[d] == 0) ready.push(d);
    }
  }
  if (order.size() == stages.size()) return order;

  // Walk dependencies among the leftovers until a stage repeats.
  size_t start = 0;
  while (done[start]) ++start;
  std::vector<size_t> path;
  std::vector<size_t> pos(stages.size(), SIZE_MAX);
  size_t v = start;
  while (pos[v] == SIZE_MAX) {
    pos[v] = path.size();
    path.push_back(v);
    for (auto d : deps[v]) {
      if (!done[d]) {
        v = d;
        break;
      }
    }
  }
  std::vector<std::string> cycle;
  for (size_t i = path.size(); i-- > pos[v];) cycle.push_back(stages[path[i]].name);
  cycle.push_back(cycle.front());
  throw CycleError(cycle);
}

}  // namespace

DependencyGraph compile_graph(const WorkflowSpec& spec, const std::vector<CommandSpec>& commands) {
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;
  std::vector<StageEntry> stages;
  std::set<std::string> node_ids;
  std::set<std::tuple<std::string, std::string, int>> edge_keys;

  auto add_node = [&](const std::string& id, Layer layer, const std::string& path) {
    if (node_ids.insert(id).second) nodes.push_back({id, layer, path, Freshness::Fresh});
  };
  auto add_artifact = [&](const std::string& pattern) {
    auto layer = layer_of(pattern);
    if (!layer || *layer == Layer::Command) {
      fail(ErrorCode::UnknownLayer, "cannot classify '" + pattern + "' by its top-level directory");
    }
    add_node(pattern, *layer, pattern);
    return *layer;
  };
  auto add_edge = [&](const std::string& from, const std::string& to, EdgeKind kind) {
    if (edge_keys.emplace(from, to, static_cast<int>(kind)).second) edges.push_back({from, to, kind});
  };

  for (const auto& decl : spec.stages) {
    auto cmd = std::find_if(commands.begin(), commands.end(), [&](const CommandSpec& c) { return c.name == decl.command; });
    if (cmd == commands.end()) {
      fail(ErrorCode::UnknownCommand, "stage '" + decl.command + "' has no command artifact");
    }
    StageEntry entry;
    entry.name = decl.command;
    entry.node = command_node_id(decl.command);
    entry.optional = decl.optional;
    add_node(entry.node, Layer::Command, cmd->origin_path);

    // The workflow's context line wins over the command's own target.
    std::optional<std::string> context = decl.context_artifact;
    if (!context && cmd->context_target) context = cmd->context_target->pattern;
    if (context) {
      add_artifact(*context);
      entry.produces.push_back(*context);
      add_edge(entry.node, *context, EdgeKind::CommandToContext);
    }
    for (const auto& ref : decl.consumes) {
      add_artifact(ref.pattern);
      entry.consumes.push_back(ref.pattern);
    }
    for (const auto& ref : decl.produces) {
      add_artifact(ref.pattern);
      if (std::find(entry.produces.begin(), entry.produces.end(), ref.pattern) == entry.produces.end()) {
        entry.produces.push_back(ref.pattern);
      }
    }
    for (const auto& c : entry.consumes) {
      if (std::find(entry.produces.begin(), entry.produces.end(), c) != entry.produces.end()) {
        throw CycleError({c, c});
      }
    }

    auto layer = [&](const std::string& id) { return *layer_of(id); };
    for (const auto& c : entry.consumes) {
      for (const auto& p : entry.produces) {
        if (auto kind = edge_kind_for(layer(c), layer(p))) add_edge(c, p, *kind);
      }
    }
    for (const auto& p : entry.produces) {
      for (const auto& q : entry.produces) {
        if (p == q) continue;
        if (layer(p) == Layer::Code && layer(q) == Layer::Data) add_edge(p, q, EdgeKind::CodeToData);
        if (is_under(p, "data/processed") && is_under(q, "data/output")) add_edge(p, q, EdgeKind::DataToData);
      }
    }
    stages.push_back(std::move(entry));
  }

  auto graph = DependencyGraph::assemble(std::move(nodes), std::move(edges), std::move(stages));
  if (auto cycle = find_artifact_cycle(graph); !cycle.empty()) throw CycleError(cycle);
  order_stages(graph.stages());
  return graph;
}

std::vector<std::string> recommended_order(const DependencyGraph& graph) {
  if (auto cycle = find_artifact_cycle(graph); !cycle.empty()) throw CycleError(cycle);
  return order_stages(graph.stages());
}

std::set<std::string> stale_set(const DependencyGraph& graph, std::string_view changed) {
  size_t start = graph.index_of(changed);
  std::vector<bool> seen(graph.nodes().size(), false);
  std::deque<size_t> todo{start};
  seen[start] = true;
  std::set<std::string> out;
  while (!todo.empty()) {
    auto v = todo.front();
    todo.pop_front();
    for (auto w : graph.successors(v)) {
      if (!seen[w]) {
        seen[w] = true;
        out.insert(graph.nodes()[w].id);
        todo.push_back(w);
      }
    }
  }
  return out;
}

DependencyGraph observe_freshness(const DependencyGraph& graph, const std::vector<std::string>& files,
                                  const std::set<std::string>& stale_nodes) {
  std::map<std::string, Freshness> fresh;
  for (const auto& n : graph.nodes()) {
    if (stale_nodes.count(n.id)) {
      fresh[n.id] = Freshness::Stale;
      continue;
    }
    bool present = std::any_of(files.begin(), files.end(), [&](const std::string& f) { return glob_match(n.path, f); });
    fresh[n.id] = present ? Freshness::Fresh : Freshness::Missing;
  }
  return graph.with_freshness(fresh);
}

// ---------------------------------------------------------------------------
// Export

namespace {

std::string dot_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string_view dot_shape(Layer layer) {
  switch (layer) {
    case Layer::Command: return "component";
    case Layer::Context: return "note";
    case Layer::Code: return "box";
    case Layer::Data: return "cylinder";
  }
  return "ellipse";
}

}  // namespace

std::string export_graph(const DependencyGraph& graph, GraphFormat format) {
  if (format == GraphFormat::Dot) {
    std::ostringstream out;
    out << "digraph workflow {\n";
    out << "  rankdir=LR;\n";
    for (const auto& n : graph.nodes()) {
      out << "  " << dot_quote(n.id) << " [label=" << dot_quote(n.id) << ", shape=" << dot_shape(n.layer)
          << ", layer=" << to_string(n.layer) << ", freshness=" << to_string(n.freshness) << "];\n";
    }
    for (const auto& e : graph.edges()) {
      out << "  " << dot_quote(e.from) << " -> " << dot_quote(e.to) << " [label=" << to_string(e.kind) << "];\n";
    }
    out << "}\n";
    return out.str();
  }

  ojson doc;
  doc["nodes"] = ojson::array();
  for (const auto& n : graph.nodes()) {
    doc["nodes"].push_back({{"id", n.id}, {"layer", to_string(n.layer)}, {"path", n.path}, {"freshness", to_string(n.freshness)}});
  }
  doc["edges"] = ojson::array();
  for (const auto& e : graph.edges()) {
    doc["edges"].push_back({{"from", e.from}, {"to", e.to}, {"kind", to_string(e.kind)}});
  }
  doc["stages"] = ojson::array();
  for (const auto& s : graph.stages()) {
    doc["stages"].push_back({{"name", s.name}, {"node", s.node}, {"consumes", s.consumes}, {"produces", s.produces}, {"optional", s.optional}});
  }
  return doc.dump(2) + "\n";
}

DependencyGraph graph_from_json(std::string_view json_text) {
  ojson doc;
  try {
    doc = ojson::parse(json_text);
  } catch (const std::exception& e) {
    fail(ErrorCode::ParseFailure, std::string("graph JSON: ") + e.what());
  }
  try {
    std::vector<GraphNode> nodes;
    for (const auto& n : doc.at("nodes")) {
      auto layer = parse_layer(n.at("layer").get<std::string>());
      auto freshness = parse_freshness(n.value("freshness", std::string("fresh")));
      if (!layer || !freshness) fail(ErrorCode::ParseFailure, "graph JSON: bad layer or freshness");
      nodes.push_back({n.at("id").get<std::string>(), *layer, n.at("path").get<std::string>(), *freshness});
    }
    std::vector<GraphEdge> edges;
    for (const auto& e : doc.at("edges")) {
      auto kind = parse_edge_kind(e.at("kind").get<std::string>());
      if (!kind) fail(ErrorCode::ParseFailure, "graph JSON: bad edge kind");
      edges.push_back({e.at("from").get<std::string>(), e.at("to").get<std::string>(), *kind});
    }
    std::vector<StageEntry> stages;
    if (doc.contains("stages")) {
      for (const auto& s : doc.at("stages")) {
        stages.push_back({s.at("name").get<std::string>(), s.at("node").get<std::string>(),
                          s.value("consumes", std::vector<std::string>{}), s.value("produces", std::vector<std::string>{}),
                          s.value("optional", false)});
      }
    }
    return DependencyGraph::assemble(std::move(nodes), std::move(edges), std::move(stages));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseFailure, std::string("graph JSON: ") + e.what());
  }
}

}  // namespace specflow
