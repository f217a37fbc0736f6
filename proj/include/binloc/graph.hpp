/* Copyright 2026 The binloc Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef BINLOC_GRAPH_HPP_
#define BINLOC_GRAPH_HPP_

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "binloc/ops.hpp"

namespace binloc {

enum class NodeKind { kInput, kOutput, kConv, kBatchNorm, kSign, kRelu, kMaxPool, kAvgPool, kUpsample, kConcat, kAdd };

const char* to_string(NodeKind kind);

using NodeId = std::size_t;

struct LayerNode {
  NodeId id = 0;
  NodeKind kind = NodeKind::kInput;
  ConvParams conv;  // meaningful for kConv only
  bool binarized = false;
  std::size_t channels = 0;  // output channels of this node
  std::vector<NodeId> inputs;
  std::string name;
};

/// A DAG stored in topological order: every input id is smaller than the
/// consuming node's id. Node 0 is the input, the last node is the output.
class Graph {
 public:
  Graph() = default;

  const std::vector<LayerNode>& nodes() const { return nodes_; }
  const LayerNode& node(NodeId id) const { return nodes_.at(id); }
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  NodeId output_id() const;

  NodeId input(std::size_t channels, std::string name = "input");
  NodeId output(NodeId x);
  NodeId conv(NodeId x, const ConvParams& p, bool binarized, std::string name = {});
  NodeId batchnorm(NodeId x, std::string name = {});
  NodeId sign(NodeId x);
  NodeId relu(NodeId x);
  NodeId pool(NodeId x, PoolKind kind);
  NodeId upsample(NodeId x);
  NodeId concat(std::vector<NodeId> xs);
  NodeId add(NodeId a, NodeId b);

  /// Copies `other` (minus its input and output nodes) into this graph with
  /// its input bound to `x`; returns the id feeding `other`'s output.
  NodeId inline_graph(const Graph& other, NodeId x, const std::string& prefix = {});

  /// Ids of nodes consuming each node.
  std::vector<std::vector<NodeId>> consumers() const;

  /// One node per line: id, kind, parameters, predecessors.
  std::string to_text() const;

  /// Throws ValueError when the graph breaks the structural rules: ordering,
  /// single input/output, channel bookkeeping, and bn -> sign before every
  /// binarized conv.
  void validate() const;

 private:
  NodeId push(LayerNode node);

  std::vector<LayerNode> nodes_;
};

/// Output shape of every node for an input of shape `input`. Pooling is the
/// 2x2 / stride 2 kind; upsampling doubles both sides.
std::vector<Shape4> infer_shapes(const Graph& g, const Shape4& input);

}  // namespace binloc

#endif  // BINLOC_GRAPH_HPP_
