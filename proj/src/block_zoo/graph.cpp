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

#include "binloc/graph.hpp"

#include <sstream>

#include "binloc/errors.hpp"

namespace binloc {

const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::kInput: return "input";
    case NodeKind::kOutput: return "output";
    case NodeKind::kConv: return "conv";
    case NodeKind::kBatchNorm: return "bn";
    case NodeKind::kSign: return "sign";
    case NodeKind::kRelu: return "relu";
    case NodeKind::kMaxPool: return "maxpool";
    case NodeKind::kAvgPool: return "avgpool";
    case NodeKind::kUpsample: return "upsample";
    case NodeKind::kConcat: return "concat";
    case NodeKind::kAdd: return "add";
  }
  return "?";
}

NodeId Graph::output_id() const {
  if (nodes_.empty() || nodes_.back().kind != NodeKind::kOutput) throw ValueError("graph has no output node");
  return nodes_.back().id;
}

NodeId Graph::push(LayerNode node) {
  for (NodeId in : node.inputs)
    if (in >= nodes_.size()) throw ValueError("node input " + std::to_string(in) + " does not exist");
  if (!nodes_.empty() && nodes_.back().kind == NodeKind::kOutput) throw ValueError("graph is already closed");
  node.id = nodes_.size();
  nodes_.push_back(std::move(node));
  return nodes_.back().id;
}

NodeId Graph::input(std::size_t channels, std::string name) {
  if (!nodes_.empty()) throw ValueError("input must be the first node");
  LayerNode n;
  n.kind = NodeKind::kInput;
  n.channels = channels;
  n.name = std::move(name);
  return push(std::move(n));
}

NodeId Graph::output(NodeId x) {
  LayerNode n;
  n.kind = NodeKind::kOutput;
  n.channels = node(x).channels;
  n.inputs = {x};
  return push(std::move(n));
}

NodeId Graph::conv(NodeId x, const ConvParams& p, bool binarized, std::string name) {
  if (node(x).channels != p.in_channels)
    throw ShapeError("conv expects " + std::to_string(p.in_channels) + " input channels, got " +
                     std::to_string(node(x).channels));
  if (p.kernel_h == 0 || p.kernel_w == 0 || p.stride_h == 0 || p.stride_w == 0 || p.out_channels == 0)
    throw ValueError("degenerate conv parameters");
  LayerNode n;
  n.kind = NodeKind::kConv;
  n.conv = p;
  n.binarized = binarized;
  n.channels = p.out_channels;
  n.inputs = {x};
  n.name = std::move(name);
  return push(std::move(n));
}

namespace {

LayerNode unary(NodeKind kind, const LayerNode& x) {
  LayerNode n;
  n.kind = kind;
  n.channels = x.channels;
  n.inputs = {x.id};
  return n;
}

}  // namespace

NodeId Graph::batchnorm(NodeId x, std::string name) {
  LayerNode n = unary(NodeKind::kBatchNorm, node(x));
  n.name = std::move(name);
  return push(std::move(n));
}
NodeId Graph::sign(NodeId x) { return push(unary(NodeKind::kSign, node(x))); }
NodeId Graph::relu(NodeId x) { return push(unary(NodeKind::kRelu, node(x))); }
NodeId Graph::pool(NodeId x, PoolKind kind) {
  return push(unary(kind == PoolKind::kMax ? NodeKind::kMaxPool : NodeKind::kAvgPool, node(x)));
}
NodeId Graph::upsample(NodeId x) { return push(unary(NodeKind::kUpsample, node(x))); }

NodeId Graph::concat(std::vector<NodeId> xs) {
  if (xs.empty()) throw ValueError("concat needs at least one input");
  LayerNode n;
  n.kind = NodeKind::kConcat;
  for (NodeId x : xs) n.channels += node(x).channels;
  n.inputs = std::move(xs);
  return push(std::move(n));
}

NodeId Graph::add(NodeId a, NodeId b) {
  if (node(a).channels != node(b).channels) throw ShapeError("add of mismatched channel counts");
  LayerNode n;
  n.kind = NodeKind::kAdd;
  n.channels = node(a).channels;
  n.inputs = {a, b};
  return push(std::move(n));
}

NodeId Graph::inline_graph(const Graph& other, NodeId x, const std::string& prefix) {
  if (other.empty() || other.nodes_.front().kind != NodeKind::kInput) throw ValueError("inlined graph has no input");
  const NodeId out = other.output_id();
  if (other.nodes_.front().channels != node(x).channels) throw ShapeError("inlined graph input channel mismatch");
  std::vector<NodeId> map(other.size());
  map[0] = x;
  for (std::size_t i = 1; i < out; ++i) {
    LayerNode n = other.nodes_[i];
    for (NodeId& in : n.inputs) in = map[in];
    if (!prefix.empty()) n.name = n.name.empty() ? prefix : prefix + "." + n.name;
    map[i] = push(std::move(n));
  }
  return map[other.nodes_[out].inputs.at(0)];
}

std::vector<std::vector<NodeId>> Graph::consumers() const {
  std::vector<std::vector<NodeId>> out(nodes_.size());
  for (const LayerNode& n : nodes_)
    for (NodeId in : n.inputs) out[in].push_back(n.id);
  return out;
}

std::string Graph::to_text() const {
  std::ostringstream os;
  for (const LayerNode& n : nodes_) {
    os << n.id << ' ' << to_string(n.kind);
    if (n.kind == NodeKind::kConv) {
      const ConvParams& p = n.conv;
      os << ' ' << p.kernel_h << 'x' << p.kernel_w << " s" << p.stride_h << " p" << p.pad_h << ' ' << p.in_channels
         << "->" << p.out_channels << (n.binarized ? " binary" : " real");
    }
    os << " c=" << n.channels;
    if (!n.inputs.empty()) {
      os << " <-";
      for (std::size_t i = 0; i < n.inputs.size(); ++i) os << (i ? "," : " ") << n.inputs[i];
    }
    if (!n.name.empty()) os << " # " << n.name;
    os << '\n';
  }
  return os.str();
}

void Graph::validate() const {
  if (nodes_.empty()) throw ValueError("empty graph");
  std::size_t inputs = 0, outputs = 0;
  for (const LayerNode& n : nodes_) {
    inputs += n.kind == NodeKind::kInput;
    outputs += n.kind == NodeKind::kOutput;
    for (NodeId in : n.inputs)
      if (in >= n.id) throw ValueError("node " + std::to_string(n.id) + " is not topologically ordered");
    const auto in_channels = [&](std::size_t i) { return nodes_[n.inputs.at(i)].channels; };
    switch (n.kind) {
      case NodeKind::kInput:
        if (n.id != 0 || !n.inputs.empty()) throw ValueError("input must be node 0 with no predecessors");
        break;
      case NodeKind::kConcat: {
        std::size_t sum = 0;
        for (std::size_t i = 0; i < n.inputs.size(); ++i) sum += in_channels(i);
        if (sum != n.channels) throw ValueError("concat channel bookkeeping broken at node " + std::to_string(n.id));
        break;
      }
      case NodeKind::kAdd:
        if (n.inputs.size() != 2 || in_channels(0) != n.channels || in_channels(1) != n.channels)
          throw ValueError("add channel mismatch at node " + std::to_string(n.id));
        break;
      case NodeKind::kConv:
        if (n.inputs.size() != 1 || in_channels(0) != n.conv.in_channels || n.channels != n.conv.out_channels)
          throw ValueError("conv channel mismatch at node " + std::to_string(n.id));
        if (n.binarized) {
          const LayerNode& s = nodes_[n.inputs[0]];
          if (s.kind != NodeKind::kSign || nodes_[s.inputs.at(0)].kind != NodeKind::kBatchNorm)
            throw ValueError("binarized conv " + std::to_string(n.id) + " is not preceded by bn -> sign");
        }
        break;
      default:
        if (n.inputs.size() != 1 || in_channels(0) != n.channels)
          throw ValueError("channel mismatch at node " + std::to_string(n.id));
    }
  }
  if (inputs != 1 || outputs != 1 || nodes_.back().kind != NodeKind::kOutput)
    throw ValueError("graph needs exactly one input and one output node");
  // Every node must reach the output.
  std::vector<bool> live(nodes_.size(), false);
  live.back() = true;
  for (std::size_t i = nodes_.size(); i-- > 0;)
    if (live[i])
      for (NodeId in : nodes_[i].inputs) live[in] = true;
  for (std::size_t i = 0; i < live.size(); ++i)
    if (!live[i]) throw ValueError("node " + std::to_string(i) + " does not reach the output");
}

std::vector<Shape4> infer_shapes(const Graph& g, const Shape4& input) {
  std::vector<Shape4> shapes(g.size());
  for (const LayerNode& n : g.nodes()) {
    if (n.kind == NodeKind::kInput) {
      if (input.c != n.channels) throw ShapeError("input has " + std::to_string(input.c) + " channels, graph expects " +
                                                  std::to_string(n.channels));
      shapes[n.id] = input;
      continue;
    }
    Shape4 s = shapes[n.inputs.at(0)];
    switch (n.kind) {
      case NodeKind::kConv:
        s = n.conv.output_shape(s);
        break;
      case NodeKind::kMaxPool:
      case NodeKind::kAvgPool:
        if (s.h < 2 || s.w < 2) throw ShapeError("pooling input smaller than its window at node " + std::to_string(n.id));
        s.h /= 2;
        s.w /= 2;
        break;
      case NodeKind::kUpsample:
        s.h *= 2;
        s.w *= 2;
        break;
      case NodeKind::kConcat:
      case NodeKind::kAdd:
        for (NodeId in : n.inputs) {
          const Shape4& o = shapes[in];
          if (o.n != s.n || o.h != s.h || o.w != s.w)
            throw ShapeError("spatial mismatch at node " + std::to_string(n.id) + ": " + to_string(o) + " vs " +
                             to_string(s));
        }
        s.c = n.channels;
        break;
      default:
        break;
    }
    shapes[n.id] = s;
  }
  return shapes;
}

}  // namespace binloc
