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

// The orchestration document and the typed dependency graph compiled from
// it.
//
// A workflow document carries a `## Workflow` section whose list items name
// stages as `- @<command>.md - <description>` (an en or em dash also
// separates), each optionally followed by indented metadata lines:
//
//   - @preprocess.md - design and execute preprocessing
//     context: docs/03-preprocess-plan.md
//     consumes: [docs/02-raw-data-analysis.md]
//     produces: [scripts/preprocess.py]
//
// Compilation produces one command node per stage, one node per distinct
// artifact reference, and edges typed by the layer pair they connect:
//
//   command -> its context artifact                      command_to_context
//   consumed -> produced, when the layer pair has a kind  (see EdgeKind)
//   produced code -> produced data, same stage            code_to_data
//   produced data/processed -> produced data/output       data_to_data
//
// Consumed/produced pairs with no kind (data->code, code->context,
// context->data) add no edge; they still order stages.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "specflow/command_spec.hpp"
#include "specflow/paths.hpp"

namespace specflow {

struct StageDecl {
  std::string command;
  std::string description;
  std::optional<std::string> context_artifact;
  std::vector<ResourceRef> consumes;
  std::vector<ResourceRef> produces;
  bool optional = false;

  friend bool operator==(const StageDecl&, const StageDecl&) = default;
};

struct WorkflowSpec {
  std::vector<StageDecl> stages;
  std::string source_path;

  const StageDecl* find(std::string_view command) const;
};

WorkflowSpec parse_workflow_doc(std::string_view source, std::string_view source_path = "");

enum class Freshness { Fresh, Stale, Missing };

enum class EdgeKind {
  CommandToContext,
  ContextToCode,
  CodeToData,
  DataToContext,
  CodeToCode,
  DataToData,
  ContextToContext,
};

std::string_view to_string(Freshness f);
std::optional<Freshness> parse_freshness(std::string_view text);
std::string_view to_string(EdgeKind kind);
std::optional<EdgeKind> parse_edge_kind(std::string_view text);

/// The kind for an edge between these layers, if the graph has one.
std::optional<EdgeKind> edge_kind_for(Layer from, Layer to);

struct GraphNode {
  std::string id;
  Layer layer = Layer::Data;
  std::string path;
  Freshness freshness = Freshness::Fresh;

  friend bool operator==(const GraphNode&, const GraphNode&) = default;
};

struct GraphEdge {
  std::string from;
  std::string to;
  EdgeKind kind = EdgeKind::CommandToContext;

  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

/// Producer/consumer table for one stage; `produces` includes the context
/// artifact.
struct StageEntry {
  std::string name;
  std::string node;
  std::vector<std::string> consumes;
  std::vector<std::string> produces;
  bool optional = false;

  friend bool operator==(const StageEntry&, const StageEntry&) = default;
};

/// Immutable once built. Node and edge order is deterministic (document
/// order); equality compares them as sets.
class DependencyGraph {
 public:
  DependencyGraph() = default;

  /// Validates ids, edge endpoints, edge kinds against layers, and the
  /// stage table. Throws Error(InvalidArgument) on any violation.
  static DependencyGraph assemble(std::vector<GraphNode> nodes, std::vector<GraphEdge> edges,
                                  std::vector<StageEntry> stages);

  const std::vector<GraphNode>& nodes() const { return nodes_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  const std::vector<StageEntry>& stages() const { return stages_; }

  const GraphNode* find(std::string_view id) const;
  const StageEntry* find_stage(std::string_view name) const;
  const std::vector<size_t>& successors(size_t node_index) const { return out_[node_index]; }
  size_t index_of(std::string_view id) const;

  /// Stages whose produces list contains any of `nodes`.
  std::set<std::string> producers_of(const std::set<std::string>& nodes) const;

  /// Stages that must come before `stage`: direct producers of what it
  /// consumes, transitively.
  std::vector<std::string> upstream_stages(std::string_view stage) const;

  DependencyGraph with_freshness(const std::map<std::string, Freshness>& freshness) const;

  friend bool operator==(const DependencyGraph& a, const DependencyGraph& b);

 private:
  void index();

  std::vector<GraphNode> nodes_;
  std::vector<GraphEdge> edges_;
  std::vector<StageEntry> stages_;
  std::unordered_map<std::string, size_t> by_id_;
  std::vector<std::vector<size_t>> out_;
};

std::string command_node_id(std::string_view command);

/// Throws UnknownCommand, CycleError.
DependencyGraph compile_graph(const WorkflowSpec& spec, const std::vector<CommandSpec>& commands);

/// Topological order of stages, document order breaking ties. Throws
/// CycleError.
std::vector<std::string> recommended_order(const DependencyGraph& graph);

/// Forward-reachable closure of `changed`, excluding it. Throws UnknownNode.
std::set<std::string> stale_set(const DependencyGraph& graph, std::string_view changed);

/// Fresh when some project file matches the node, stale when listed in
/// `stale_nodes`, missing otherwise.
DependencyGraph observe_freshness(const DependencyGraph& graph, const std::vector<std::string>& files,
                                  const std::set<std::string>& stale_nodes);

enum class GraphFormat { Dot, Json };

std::string export_graph(const DependencyGraph& graph, GraphFormat format);
DependencyGraph graph_from_json(std::string_view json_text);

}  // namespace specflow
