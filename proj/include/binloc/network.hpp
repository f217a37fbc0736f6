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

#ifndef BINLOC_NETWORK_HPP_
#define BINLOC_NETWORK_HPP_

#include <cstddef>
#include <cstdint>
#include <string>

#include "binloc/blocks.hpp"

namespace binloc {

enum class HeadKind { kHeatmaps, kSegmentation };

/// A single (unstacked) hourglass. The stem is 7x7/2 conv (3 -> 64), a
/// 64 -> 128 bottleneck, max pool, then 128 -> 128 and 128 -> 256
/// bottlenecks; a binarized 1x1 transition follows when channels != 256.
/// The head is one block, a 1x1 c -> c and a real 1x1 c -> outputs.
struct NetworkSpec {
  BlockVariant block_variant = BlockVariant::kBottleneck;
  std::size_t channels = 256;
  std::size_t hg_depth = 4;
  std::size_t input_resolution = 256;
  HeadKind head = HeadKind::kHeatmaps;
  std::size_t outputs = 16;  // landmarks or classes
  bool binarize = true;
  bool relu_after_conv = false;
  PoolKind block_pool = PoolKind::kMax;

  std::size_t output_resolution() const { return input_resolution / 4; }
  Shape4 input_shape(std::size_t batch) const { return {batch, 3, input_resolution, input_resolution}; }
  Shape4 output_shape(std::size_t batch) const { return {batch, outputs, output_resolution(), output_resolution()}; }

  /// key = value lines; from_text accepts any subset of the keys.
  std::string to_text() const;
  static NetworkSpec from_text(const std::string& text);

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

/// Throws ValueError for unusable combinations of resolution, depth and
/// widths.
void validate(const NetworkSpec& spec);

struct Network {
  NetworkSpec spec;
  Graph graph;
};

Network build_network(const NetworkSpec& spec);

std::uint64_t count_network_params(const NetworkSpec& spec, bool include_bn = false);

struct ParamBreakdown {
  std::uint64_t real_weights = 0;
  std::uint64_t binary_weights = 0;
  std::uint64_t alphas = 0;          // one per output channel of each binarized conv
  std::uint64_t packed_words = 0;    // 64-bit words holding the binary weights
  std::uint64_t bn_channels = 0;
};

ParamBreakdown param_breakdown(const Graph& g);

/// Conv weight storage in bytes. Dense: 4 bytes per weight. Packed: 4 bytes
/// per real weight, 64-bit words per binarized filter and 4 bytes per alpha.
std::uint64_t memory_footprint(const Graph& g, bool packed);
std::uint64_t memory_footprint(const NetworkSpec& spec, bool packed);

}  // namespace binloc

#endif  // BINLOC_NETWORK_HPP_
