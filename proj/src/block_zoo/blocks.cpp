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

#include "binloc/blocks.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "binloc/errors.hpp"

namespace binloc {

std::string to_string(BlockVariant v) {
  switch (v) {
    case BlockVariant::kBottleneck: return "bottleneck";
    case BlockVariant::kWider: return "wider";
    case BlockVariant::kMultiScale: return "ms";
    case BlockVariant::kMultiScaleNo1x1: return "ms-no1x1";
    case BlockVariant::kHpm: return "hpm";
  }
  return "?";
}

BlockVariant parse_block_variant(const std::string& s) {
  for (BlockVariant v : {BlockVariant::kBottleneck, BlockVariant::kWider, BlockVariant::kMultiScale,
                         BlockVariant::kMultiScaleNo1x1, BlockVariant::kHpm})
    if (to_string(v) == s) return v;
  if (s == "multiscale") return BlockVariant::kMultiScale;
  if (s == "ms_no_1x1") return BlockVariant::kMultiScaleNo1x1;
  throw ValueError("unknown block variant '" + s + "'");
}

namespace {

void require_channels(std::size_t c, std::size_t divisor, const char* what) {
  if (c == 0 || c % divisor != 0)
    throw ValueError(std::string(what) + " needs channels divisible by " + std::to_string(divisor) + ", got " +
                     std::to_string(c));
}

// bn -> sign for binarized blocks, bn -> relu for real ones.
NodeId preact(Graph& g, NodeId x, const BlockOptions& opt) {
  const NodeId bn = g.batchnorm(x);
  return opt.binarized ? g.sign(bn) : g.relu(bn);
}

NodeId conv_after(Graph& g, NodeId act, std::size_t ci, std::size_t co, std::size_t k, const BlockOptions& opt) {
  const NodeId c = g.conv(act, ConvParams::square(ci, co, k), opt.binarized);
  return opt.relu_after_conv ? g.relu(c) : c;
}

NodeId unit(Graph& g, NodeId x, std::size_t ci, std::size_t co, std::size_t k, const BlockOptions& opt) {
  return conv_after(g, preact(g, x, opt), ci, co, k, opt);
}

BlockSpec start(BlockVariant v, std::size_t in, std::size_t out, const BlockOptions& opt) {
  BlockSpec b;
  b.variant = v;
  b.in_channels = in;
  b.out_channels = out;
  b.options = opt;
  b.graph.input(in);
  return b;
}

BlockSpec finish(BlockSpec b, NodeId body, NodeId skip) {
  b.graph.output(b.graph.add(body, skip));
  b.graph.validate();
  return b;
}

}  // namespace

BlockSpec build_bottleneck(std::size_t in, std::size_t out, const BlockOptions& opt) {
  require_channels(out, 2, "bottleneck");
  if (in == 0) throw ValueError("bottleneck needs a positive input width");
  BlockSpec b = start(BlockVariant::kBottleneck, in, out, opt);
  Graph& g = b.graph;
  const std::size_t mid = out / 2;
  const NodeId a = preact(g, 0, opt);
  const NodeId c1 = conv_after(g, a, in, mid, 1, opt);
  const NodeId c2 = unit(g, c1, mid, mid, 3, opt);
  const NodeId c3 = unit(g, c2, mid, out, 1, opt);
  const NodeId skip = in == out ? NodeId{0} : conv_after(g, a, in, out, 1, opt);
  return finish(std::move(b), c3, skip);
}

BlockSpec build_bottleneck(std::size_t c, const BlockOptions& opt) { return build_bottleneck(c, c, opt); }

BlockSpec build_wider(std::size_t c, const BlockOptions& opt) {
  if (c == 0) throw ValueError("wider needs a positive width");
  BlockSpec b = start(BlockVariant::kWider, c, c, opt);
  Graph& g = b.graph;
  const NodeId c1 = unit(g, 0, c, c, 1, opt);
  const NodeId c2 = unit(g, c1, c, c, 3, opt);
  const NodeId c3 = unit(g, c2, c, c, 1, opt);
  return finish(std::move(b), c3, 0);
}

BlockSpec build_multiscale(std::size_t c, const BlockOptions& opt) {
  require_channels(c, 8, "multiscale");
  BlockSpec b = start(BlockVariant::kMultiScale, c, c, opt);
  Graph& g = b.graph;
  const NodeId left = unit(g, unit(g, 0, c, c / 4, 1, opt), c / 4, c / 4, 3, opt);
  const NodeId pa = preact(g, g.pool(0, opt.pool), opt);
  const NodeId r3 = conv_after(g, pa, c, c / 8, 3, opt);
  const NodeId r5 = unit(g, conv_after(g, pa, c, c / 8, 3, opt), c / 8, c / 8, 3, opt);
  const NodeId right = g.upsample(g.concat({r3, r5}));
  const NodeId merged = unit(g, g.concat({left, right}), c / 2, c, 1, opt);
  return finish(std::move(b), merged, 0);
}

BlockSpec build_ms_no_1x1(std::size_t c, const BlockOptions& opt) {
  require_channels(c, 4, "ms-no1x1");
  BlockSpec b = start(BlockVariant::kMultiScaleNo1x1, c, c, opt);
  Graph& g = b.graph;
  const NodeId left = unit(g, 0, c, c / 2, 3, opt);
  const NodeId pa = preact(g, g.pool(0, opt.pool), opt);
  const NodeId r3 = conv_after(g, pa, c, c / 4, 3, opt);
  const NodeId r5 = unit(g, conv_after(g, pa, c, c / 4, 3, opt), c / 4, c / 4, 3, opt);
  const NodeId right = g.upsample(g.concat({r3, r5}));
  return finish(std::move(b), g.concat({left, right}), 0);
}

BlockSpec build_hpm(std::size_t c, const BlockOptions& opt) {
  require_channels(c, 4, "hpm");
  BlockSpec b = start(BlockVariant::kHpm, c, c, opt);
  Graph& g = b.graph;
  const NodeId l1 = unit(g, 0, c, c / 2, 3, opt);
  const NodeId l2 = unit(g, l1, c / 2, c / 4, 3, opt);
  const NodeId l3 = unit(g, l2, c / 4, c / 4, 3, opt);
  return finish(std::move(b), g.concat({l1, l2, l3}), 0);
}

BlockSpec build_block(BlockVariant v, std::size_t c, const BlockOptions& opt) {
  switch (v) {
    case BlockVariant::kBottleneck: return build_bottleneck(c, opt);
    case BlockVariant::kWider: return build_wider(c, opt);
    case BlockVariant::kMultiScale: return build_multiscale(c, opt);
    case BlockVariant::kMultiScaleNo1x1: return build_ms_no_1x1(c, opt);
    case BlockVariant::kHpm: return build_hpm(c, opt);
  }
  throw ValueError("unknown block variant");
}

std::uint64_t count_params(const Graph& g, bool include_bn) {
  std::uint64_t total = 0;
  for (const LayerNode& n : g.nodes()) {
    if (n.kind == NodeKind::kConv) total += n.conv.weight_count();
    if (include_bn && n.kind == NodeKind::kBatchNorm) total += 2 * n.channels;
  }
  return total;
}

std::size_t count_convs(const Graph& g, std::size_t kernel) {
  return static_cast<std::size_t>(std::count_if(g.nodes().begin(), g.nodes().end(), [&](const LayerNode& n) {
    return n.kind == NodeKind::kConv && (kernel == 0 || (n.conv.kernel_h == kernel && n.conv.kernel_w == kernel));
  }));
}

std::vector<std::size_t> conv_path_lengths(const Graph& g) {
  constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max();
  const auto consumers = g.consumers();
  std::vector<std::size_t> dist(g.size(), kUnreachable);
  for (std::size_t i = g.size(); i-- > 0;) {
    const LayerNode& n = g.node(i);
    std::size_t best = n.kind == NodeKind::kOutput ? 0 : kUnreachable;
    for (NodeId c : consumers[i]) best = std::min(best, dist[c]);
    if (best != kUnreachable && n.kind == NodeKind::kConv) ++best;
    dist[i] = best;
  }
  std::vector<std::size_t> out(g.size(), 0);
  for (const LayerNode& n : g.nodes())
    if (n.kind == NodeKind::kConv) out[n.id] = dist[n.id];
  return out;
}

std::size_t shortest_conv_path(const Graph& g) {
  const auto lengths = conv_path_lengths(g);
  return lengths.empty() ? 0 : *std::max_element(lengths.begin(), lengths.end());
}

std::size_t receptive_field(const Graph& g) {
  // Per node: for each input-pixel jump, the largest field reaching it.
  std::vector<std::map<double, double>> states(g.size());
  for (const LayerNode& n : g.nodes()) {
    auto& st = states[n.id];
    if (n.kind == NodeKind::kInput) {
      st[1.0] = 1.0;
      continue;
    }
    for (NodeId in : n.inputs)
      for (auto [jump, rf] : states[in]) {
        double j = jump, r = rf;
        switch (n.kind) {
          case NodeKind::kConv:
            r += static_cast<double>(n.conv.kernel_h - 1) * j;
            j *= static_cast<double>(n.conv.stride_h);
            break;
          case NodeKind::kMaxPool:
          case NodeKind::kAvgPool:
            r += j;
            j *= 2.0;
            break;
          case NodeKind::kUpsample:
            j /= 2.0;
            break;
          default:
            break;
        }
        auto [it, inserted] = st.emplace(j, r);
        if (!inserted) it->second = std::max(it->second, r);
      }
  }
  double best = 0.0;
  for (auto [jump, rf] : states.back()) best = std::max(best, rf);
  return static_cast<std::size_t>(best + 0.5);
}

}  // namespace binloc
