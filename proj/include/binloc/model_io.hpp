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

#ifndef BINLOC_MODEL_IO_HPP_
#define BINLOC_MODEL_IO_HPP_

#include <cstdint>
#include <string>

#include "binloc/model.hpp"

namespace binloc {

inline constexpr char kModelMagic[4] = {'B', 'N', 'L', 'L'};
inline constexpr std::uint32_t kModelFormatVersion = 1;

/// How binarized conv weights are written. kPacked stores 64-bit words
/// (LSB-first) plus one float alpha per output channel; kDense stores the
/// float latent weights so training can resume.
enum class BinaryStorage { kPacked, kDense };

/// File layout, all little-endian:
///   "BNLL" | u32 version | u32 header length | header text | payload
/// The header holds the NetworkSpec keys, `storage`, and one
/// `layer.<id> = ...` line per conv and batch-norm node. Payload per node in
/// graph order: real conv f32 weights; binarized conv u64 words then f32
/// alphas (packed) or f32 latents (dense); batch norm f32 gamma, beta,
/// running mean, running var. There are no bias arrays.
void save_model(const Model<float>& model, const std::string& path, BinaryStorage storage = BinaryStorage::kPacked);

/// Throws FormatError on a bad magic, version, header or payload length.
/// Packed weights come back as alpha * sign latents, which quantize to the
/// stored bits and alphas.
Model<float> load_model(const std::string& path);

/// Storage recorded in a model file header.
BinaryStorage model_storage(const std::string& path);

struct ModelFileLayout {
  std::uint64_t framing_bytes = 0;  // magic, version, header length
  std::uint64_t header_bytes = 0;
  std::uint64_t real_bytes = 0;
  std::uint64_t binary_bytes = 0;  // packed words or dense latents
  std::uint64_t alpha_bytes = 0;
  std::uint64_t bn_bytes = 0;

  std::uint64_t total() const {
    return framing_bytes + header_bytes + real_bytes + binary_bytes + alpha_bytes + bn_bytes;
  }
};

/// Byte layout save_model would produce for `net`.
ModelFileLayout model_file_layout(const Network& net, BinaryStorage storage = BinaryStorage::kPacked);

struct CompressionReport {
  ModelFileLayout file;
  std::uint64_t conv_weights = 0;
  std::uint64_t conv_biases = 0;  // one per output channel, as a dense framework stores them
  std::uint64_t bn_params = 0;    // gamma, beta, running mean, running var
  std::uint64_t dense_with_bias_bytes = 0;
  std::uint64_t dense_without_bias_bytes = 0;
  double ratio_with_bias = 0.0;
  double ratio_without_bias = 0.0;

  /// Aligned multi-line breakdown.
  std::string to_text() const;
};

/// Dense float32 model size over the model file size.
CompressionReport compression_report(const Network& net);

/// Same ratios for an arbitrary breakdown, without header or framing; used
/// for hypothetical models.
CompressionReport compression_report(const ParamBreakdown& params, std::uint64_t conv_output_channels,
                                     bool count_alphas = true);

}  // namespace binloc

#endif  // BINLOC_MODEL_IO_HPP_
