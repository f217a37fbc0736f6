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

#include "binloc/model_io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "binloc/errors.hpp"
#include "binloc/keyvalue.hpp"

namespace binloc {

namespace {

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
  }
  void f32(float f) {
    std::uint32_t v;
    std::memcpy(&v, &f, 4);
    u32(v);
  }
  void raw(const char* p, std::size_t n) { bytes_.append(p, n); }
  const std::string& bytes() const { return bytes_; }

 private:
  std::string bytes_;
};

class Reader {
 public:
  Reader(const std::string& bytes, const std::string& path) : bytes_(bytes), path_(path) {}
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw FormatError(path_ + ": truncated model file");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{static_cast<unsigned char>(bytes_[pos_ + i])} << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{static_cast<unsigned char>(bytes_[pos_ + i])} << (8 * i);
    pos_ += 8;
    return v;
  }
  float f32() {
    const std::uint32_t v = u32();
    float f;
    std::memcpy(&f, &v, 4);
    return f;
  }
  std::string str(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  const std::string& bytes_;
  const std::string& path_;
  std::size_t pos_ = 0;
};

std::string layer_line(const LayerNode& n) {
  std::ostringstream os;
  if (n.kind == NodeKind::kConv) {
    const ConvParams& p = n.conv;
    os << "conv " << (n.binarized ? "binary " : "real ") << p.out_channels << ' ' << p.in_channels << ' '
       << p.kernel_h << ' ' << p.kernel_w;
  } else {
    os << "bn " << n.channels;
  }
  return os.str();
}

std::string make_header(const Network& net, BinaryStorage storage) {
  std::ostringstream os;
  os << "format = binloc-model\n"
     << "storage = " << (storage == BinaryStorage::kPacked ? "packed" : "dense") << '\n'
     << net.spec.to_text();
  std::size_t layers = 0;
  for (const LayerNode& n : net.graph.nodes())
    if (n.kind == NodeKind::kConv || n.kind == NodeKind::kBatchNorm) ++layers;
  os << "layers = " << layers << '\n';
  for (const LayerNode& n : net.graph.nodes())
    if (n.kind == NodeKind::kConv || n.kind == NodeKind::kBatchNorm) os << "layer." << n.id << " = " << layer_line(n) << '\n';
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open model " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct ParsedHeader {
  BinaryStorage storage = BinaryStorage::kPacked;
  NetworkSpec spec;
  KeyValues layers;
};

ParsedHeader parse_header(Reader& r, const std::string& path) {
  if (r.str(4) != std::string(kModelMagic, 4)) throw FormatError(path + ": not a binloc model (bad magic)");
  const std::uint32_t version = r.u32();
  if (version != kModelFormatVersion)
    throw FormatError(path + ": unsupported model format version " + std::to_string(version) + " (expected " +
                      std::to_string(kModelFormatVersion) + ")");
  const std::uint32_t header_len = r.u32();
  KeyValues kv;
  try {
    kv = parse_key_values(r.str(header_len));
  } catch (const ValueError& e) {
    throw FormatError(path + ": bad header: " + e.what());
  }
  ParsedHeader h;
  if (kv["format"] != "binloc-model") throw FormatError(path + ": header lacks the format tag");
  const std::string storage = kv["storage"];
  if (storage == "packed") h.storage = BinaryStorage::kPacked;
  else if (storage == "dense") h.storage = BinaryStorage::kDense;
  else throw FormatError(path + ": unknown storage '" + storage + "'");
  std::string spec_text;
  for (const auto& [k, v] : kv) {
    if (k == "format" || k == "storage" || k == "layers") continue;
    if (k.rfind("layer.", 0) == 0) h.layers[k] = v;
    else spec_text += k + " = " + v + "\n";
  }
  try {
    h.spec = NetworkSpec::from_text(spec_text);
  } catch (const ValueError& e) {
    throw FormatError(path + ": bad network description: " + e.what());
  }
  return h;
}

}  // namespace

void save_model(const Model<float>& model, const std::string& path, BinaryStorage storage) {
  if (!model.spec()) throw ValueError("save_model needs a model built from a NetworkSpec");
  const Network net{*model.spec(), model.graph()};
  const std::string header = make_header(net, storage);
  Writer w;
  w.raw(kModelMagic, 4);
  w.u32(kModelFormatVersion);
  w.u32(static_cast<std::uint32_t>(header.size()));
  w.raw(header.data(), header.size());
  for (const LayerNode& n : net.graph.nodes()) {
    if (n.kind == NodeKind::kConv) {
      if (n.binarized && storage == BinaryStorage::kPacked) {
        const BitPlaneTensor q = model.binarized_weight(n.id);
        for (Word word : q.bits.words) w.u64(word);
        for (float a : q.alphas) w.f32(a);
      } else {
        for (float v : model.conv_weight(n.id).data()) w.f32(v);
      }
    } else if (n.kind == NodeKind::kBatchNorm) {
      const BatchNormParams<float>& bn = model.bn(n.id);
      for (const auto* vec : {&bn.gamma, &bn.beta, &bn.running_mean, &bn.running_var})
        for (float v : *vec) w.f32(v);
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write model " + path);
  out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
  if (!out) throw FormatError("write failed for " + path);
}

BinaryStorage model_storage(const std::string& path) {
  const std::string bytes = read_file(path);
  Reader r(bytes, path);
  return parse_header(r, path).storage;
}

Model<float> load_model(const std::string& path) {
  const std::string bytes = read_file(path);
  Reader r(bytes, path);
  const ParsedHeader h = parse_header(r, path);
  Network net;
  try {
    net = build_network(h.spec);
  } catch (const std::invalid_argument& e) {
    throw FormatError(path + ": header describes an invalid network: " + e.what());
  }
  std::size_t expected_layers = 0;
  for (const LayerNode& n : net.graph.nodes()) {
    if (n.kind != NodeKind::kConv && n.kind != NodeKind::kBatchNorm) continue;
    ++expected_layers;
    const auto it = h.layers.find("layer." + std::to_string(n.id));
    if (it == h.layers.end() || it->second != layer_line(n))
      throw FormatError(path + ": layer " + std::to_string(n.id) + " does not match the network description");
  }
  if (h.layers.size() != expected_layers) throw FormatError(path + ": unexpected layer entries in header");

  Model<float> model(net, 0);
  for (const LayerNode& n : net.graph.nodes()) {
    if (n.kind == NodeKind::kConv) {
      Tensor<float>& wt = model.conv_weight(n.id);
      if (n.binarized && h.storage == BinaryStorage::kPacked) {
        const std::size_t fs = n.conv.filter_size();
        BitMatrix bits(n.conv.out_channels, fs);
        for (Word& word : bits.words) word = r.u64();
        if (!bits.padding_clear())
          throw FormatError(path + ": nonzero padding bits in layer " + std::to_string(n.id));
        std::vector<float> alphas(n.conv.out_channels);
        for (float& a : alphas) {
          a = r.f32();
          if (!std::isfinite(a) || a < 0.0f) throw FormatError(path + ": invalid alpha in layer " + std::to_string(n.id));
        }
        for (std::size_t o = 0; o < n.conv.out_channels; ++o)
          for (std::size_t k = 0; k < fs; ++k) wt[o * fs + k] = bits.get(o, k) ? alphas[o] : -alphas[o];
      } else {
        for (float& v : wt.data()) {
          v = r.f32();
          if (!std::isfinite(v)) throw FormatError(path + ": non-finite weight in layer " + std::to_string(n.id));
        }
      }
    } else if (n.kind == NodeKind::kBatchNorm) {
      BatchNormParams<float>& bn = model.bn(n.id);
      for (auto* vec : {&bn.gamma, &bn.beta, &bn.running_mean, &bn.running_var})
        for (float& v : *vec) v = r.f32();
      for (float v : bn.running_var)
        if (!(v >= 0.0f)) throw FormatError(path + ": negative running variance in layer " + std::to_string(n.id));
    }
  }
  if (!r.done()) throw FormatError(path + ": trailing bytes after payload");
  return model;
}

ModelFileLayout model_file_layout(const Network& net, BinaryStorage storage) {
  ModelFileLayout l;
  l.framing_bytes = 12;
  l.header_bytes = make_header(net, storage).size();
  for (const LayerNode& n : net.graph.nodes()) {
    if (n.kind == NodeKind::kBatchNorm) l.bn_bytes += 16 * n.channels;
    if (n.kind != NodeKind::kConv) continue;
    if (!n.binarized) {
      l.real_bytes += 4 * n.conv.weight_count();
    } else if (storage == BinaryStorage::kDense) {
      l.binary_bytes += 4 * n.conv.weight_count();
    } else {
      l.binary_bytes += 8 * n.conv.out_channels * words_for_bits(n.conv.filter_size());
      l.alpha_bytes += 4 * n.conv.out_channels;
    }
  }
  return l;
}

namespace {

void finish_ratios(CompressionReport& r) {
  r.dense_without_bias_bytes = 4 * (r.conv_weights + r.bn_params);
  r.dense_with_bias_bytes = r.dense_without_bias_bytes + 4 * r.conv_biases;
  const double file = static_cast<double>(r.file.total());
  r.ratio_with_bias = file > 0 ? static_cast<double>(r.dense_with_bias_bytes) / file : 0.0;
  r.ratio_without_bias = file > 0 ? static_cast<double>(r.dense_without_bias_bytes) / file : 0.0;
}

}  // namespace

CompressionReport compression_report(const Network& net) {
  CompressionReport r;
  r.file = model_file_layout(net, BinaryStorage::kPacked);
  for (const LayerNode& n : net.graph.nodes()) {
    if (n.kind == NodeKind::kConv) {
      r.conv_weights += n.conv.weight_count();
      r.conv_biases += n.conv.out_channels;
    } else if (n.kind == NodeKind::kBatchNorm) {
      r.bn_params += 4 * n.channels;
    }
  }
  finish_ratios(r);
  return r;
}

CompressionReport compression_report(const ParamBreakdown& params, std::uint64_t conv_output_channels,
                                     bool count_alphas) {
  CompressionReport r;
  r.file.real_bytes = 4 * params.real_weights;
  r.file.binary_bytes = 8 * params.packed_words;
  r.file.alpha_bytes = count_alphas ? 4 * params.alphas : 0;
  r.file.bn_bytes = 16 * params.bn_channels;
  r.conv_weights = params.real_weights + params.binary_weights;
  r.conv_biases = conv_output_channels;
  r.bn_params = 4 * params.bn_channels;
  finish_ratios(r);
  return r;
}

std::string CompressionReport::to_text() const {
  std::ostringstream os;
  auto row = [&](const std::string& name, std::uint64_t bytes) {
    os << std::left << std::setw(34) << name << std::right << std::setw(14) << bytes << " bytes\n";
  };
  os << "model file\n";
  row("  framing (magic, version, length)", file.framing_bytes);
  row("  header", file.header_bytes);
  row("  real conv weights (f32)", file.real_bytes);
  row("  binary conv weights (u64 words)", file.binary_bytes);
  row("  alphas (f32)", file.alpha_bytes);
  row("  batch norm (4 x f32 per channel)", file.bn_bytes);
  row("  total", file.total());
  os << "dense float32 baseline\n";
  row("  conv weights", 4 * conv_weights);
  row("  conv biases", 4 * conv_biases);
  row("  batch norm", 4 * bn_params);
  row("  total with biases", dense_with_bias_bytes);
  row("  total without biases", dense_without_bias_bytes);
  os << std::fixed << std::setprecision(2) << "compression ratio with biases     " << std::setw(14)
     << ratio_with_bias << "x\n"
     << "compression ratio without biases  " << std::setw(14) << ratio_without_bias << "x\n";
  return os.str();
}

}  // namespace binloc
