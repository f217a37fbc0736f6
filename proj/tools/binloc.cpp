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

// binloc command-line interface.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>

#include "CLI11.hpp"
#include "binloc/bench.hpp"
#include "binloc/blocks.hpp"
#include "binloc/dataset_io.hpp"
#include "binloc/errors.hpp"
#include "binloc/heatmap.hpp"
#include "binloc/model_io.hpp"
#include "binloc/network.hpp"
#include "binloc/toy.hpp"
#include "binloc/trainer.hpp"

namespace {

using namespace binloc;

std::string millions(std::uint64_t n) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << static_cast<double>(n) / 1e6 << 'M';
  return os.str();
}

struct ParamsArgs {
  std::string block = "hpm";
  std::size_t channels = 256;
  bool network = false;
  std::size_t hg_depth = 4;
  std::size_t outputs = 16;
  bool include_bn = false;
};

void run_params(const ParamsArgs& a) {
  const BlockVariant v = parse_block_variant(a.block);
  if (!a.network) {
    const BlockSpec b = build_block(v, a.channels);
    std::cout << "block=" << to_string(v) << " channels=" << a.channels << " conv_weights=" << count_params(b)
              << " with_bn=" << count_params(b, true) << " (" << millions(count_params(b, a.include_bn)) << ")\n";
    return;
  }
  NetworkSpec spec;
  spec.block_variant = v;
  spec.channels = a.channels;
  spec.hg_depth = a.hg_depth;
  spec.outputs = a.outputs;
  const std::uint64_t n = count_network_params(spec, a.include_bn);
  std::cout << "network block=" << to_string(v) << " channels=" << a.channels << " hg_depth=" << a.hg_depth
            << " outputs=" << a.outputs << " params=" << n << " (" << millions(n) << ")\n";
}

void run_analyze(const std::string& block, std::size_t channels) {
  const BlockSpec b = build_block(parse_block_variant(block), channels);
  std::cout << "block=" << to_string(b.variant) << " channels=" << channels << '\n'
            << "shortest_conv_path=" << shortest_conv_path(b) << '\n'
            << "receptive_field=" << receptive_field(b) << '\n'
            << "conv1x1=" << count_convs(b.graph, 1) << '\n'
            << "convs=" << count_convs(b.graph) << '\n'
            << "conv_weights=" << count_params(b) << '\n'
            << b.graph.to_text();
}

void run_bench(const std::string& sizes, int reps, int pin_cpu) {
  BenchOptions opt;
  opt.reps = reps;
  opt.pin_cpu = pin_cpu;
  const BenchResult r = bench_gemm(parse_gemm_shapes(sizes), opt);
  std::cout << r.to_text();
  for (const BenchRow& row : r.rows) {
    std::cout << "row m=" << row.shape.m << " n=" << row.shape.n << " k=" << row.shape.k
              << " float_ms=" << row.reference_ms << " eigen_ms=" << row.eigen_ms
              << " popcount_ms=" << row.popcount_ms << " speedup=" << row.speedup_vs_reference
              << " speedup_eigen=" << row.speedup_vs_eigen << " checksum=" << row.checksum
              << " checksum_match=true\n";
  }
  if (!r.failures.empty()) throw ValueError(r.failures.front());
}

void run_train(const std::string& config_path) {
  const TrainConfig cfg = TrainConfig::from_key_values(read_key_values(config_path));
  std::vector<Sample> train, val;
  load_training_data(cfg, &train, &val);
  Model<float> model(build_network(cfg.net), cfg.seed);
  Trainer trainer(cfg, model);
  std::ofstream log_file;
  std::ostream* log = &std::cout;
  if (!cfg.log_path.empty()) {
    log_file.open(cfg.log_path);
    if (!log_file) throw ValueError("cannot write log " + cfg.log_path);
    log = &log_file;
  }
  const auto stats = trainer.fit(train, val, log);
  if (!cfg.model_out.empty()) {
    save_model(model, cfg.model_out, BinaryStorage::kDense);
    std::cerr << "saved " << cfg.model_out << '\n';
  }
  if (!stats.empty() && log != &std::cout)
    std::cout << "epochs=" << stats.size() << " train_loss=" << stats.back().train_loss
              << " val_pck=" << stats.back().val_pck << '\n';
}

Sample load_image(const std::string& path, std::size_t size) {
  Sample s;
  s.image = read_pnm(path);
  if (s.image.shape().c != 3) {
    DenseTensor rgb(Shape4{1, 3, s.height(), s.width()});
    for (std::size_t c = 0; c < 3; ++c)
      std::copy(s.image.plane(0, 0), s.image.plane(0, 0) + s.image.shape().plane(), rgb.plane(0, c));
    s.image = std::move(rgb);
  }
  return resize_sample(s, size);
}

void run_infer(const std::string& model_path, const std::string& image_path) {
  Model<float> model = load_model(model_path);
  const NetworkSpec& net = *model.spec();
  if (net.head != HeadKind::kHeatmaps) throw ValueError("infer needs a heatmap model");
  Sample s;
  s.image = read_pnm(image_path);
  const double sx = static_cast<double>(s.width()) / net.input_resolution;
  const double sy = static_cast<double>(s.height()) / net.input_resolution;
  const Sample in = load_image(image_path, net.input_resolution);
  const double stride = static_cast<double>(net.input_resolution) / net.output_resolution();
  const auto peaks = decode_heatmaps(model.forward(in.image), stride).front();
  std::cout << "landmark x y confidence\n" << std::fixed << std::setprecision(3);
  for (std::size_t k = 0; k < peaks.size(); ++k)
    std::cout << k << ' ' << (peaks[k].x + 0.5) * sx - 0.5 << ' ' << (peaks[k].y + 0.5) * sy - 0.5 << ' '
              << peaks[k].confidence << '\n';
}

std::vector<Sample> load_eval_data(const std::string& data, std::size_t size) {
  std::string path = data;
  if (std::filesystem::is_directory(path)) path = (std::filesystem::path(path) / "annotations.jsonl").string();
  std::vector<Sample> samples = load_dataset(path);
  for (Sample& s : samples) s = resize_sample(s, size);
  return samples;
}

void run_eval(const std::string& model_path, const std::string& data, const std::string& metric, double thresh) {
  Model<float> model = load_model(model_path);
  const NetworkSpec& net = *model.spec();
  const std::vector<Sample> samples = load_eval_data(data, net.input_resolution);
  if (samples.empty()) throw ValueError("no samples in " + data);
  std::cout << std::fixed << std::setprecision(2);
  if (metric == "seg") {
    if (net.head != HeadKind::kSegmentation) throw ValueError("seg metric needs a segmentation model");
    std::vector<std::size_t> idx(samples.size());
    std::iota(idx.begin(), idx.end(), 0);
    const Batch gt = make_batch(samples, idx, net, LossKind::kMulticlassCE, 1.0);
    const std::size_t hw = net.output_resolution() * net.output_resolution();
    std::vector<std::vector<std::int32_t>> gts;
    for (std::size_t i = 0; i < samples.size(); ++i)
      gts.emplace_back(gt.masks.begin() + i * hw, gt.masks.begin() + (i + 1) * hw);
    const SegMetrics m = seg_metrics(predict_segmentation(model, samples), gts, net.outputs);
    std::cout << "metric value\npixel_acc " << 100 * m.pixel_acc << "\nmean_acc " << 100 * m.mean_acc
              << "\nmean_iu " << 100 * m.mean_iu << '\n';
    return;
  }
  if (net.head != HeadKind::kHeatmaps) throw ValueError(metric + " needs a heatmap model");
  const auto preds = predict_keypoints(model, samples);
  std::vector<KeypointSet> gts;
  for (const Sample& s : samples) gts.push_back(s.keypoints);
  if (metric == "pckh") {
    std::vector<double> heads;
    for (const Sample& s : samples) heads.push_back(s.head_size);
    const PckResult r = pckh(preds, gts, heads, thresh);
    std::cout << "joint pckh@" << thresh << '\n';
    for (std::size_t k = 0; k < r.per_joint.size(); ++k) std::cout << k << ' ' << r.per_joint[k] << '\n';
    std::cout << "mean " << r.mean << '\n';
  } else if (metric == "nme") {
    std::vector<double> norms;
    for (const Sample& s : samples) norms.push_back(bbox_norm(s.bbox));
    std::cout << "metric value\nnme " << nme(preds, gts, norms) << '\n';
  } else {
    throw ValueError("unknown metric '" + metric + "' (expected pckh, nme or seg)");
  }
}

void run_pack(const std::string& in, const std::string& out) {
  const Model<float> model = load_model(in);
  save_model(model, out, BinaryStorage::kPacked);
  std::cout << "packed " << in << " (" << std::filesystem::file_size(in) << " bytes) -> " << out << " ("
            << std::filesystem::file_size(out) << " bytes)\n";
}

void run_report(const std::string& model_path) {
  const Model<float> model = load_model(model_path);
  const Network net{*model.spec(), model.graph()};
  const CompressionReport r = compression_report(net);
  const ParamBreakdown p = param_breakdown(net.graph);
  std::cout << "model " << model_path << " (" << std::filesystem::file_size(model_path) << " bytes on disk, "
            << (model_storage(model_path) == BinaryStorage::kPacked ? "packed" : "dense") << ")\n"
            << "real weights " << p.real_weights << ", binary weights " << p.binary_weights << ", alphas "
            << p.alphas << ", bn channels " << p.bn_channels << '\n'
            << "packed layout:\n"
            << r.to_text();
}

void run_make_toy(const std::string& out, std::size_t n, std::size_t k, std::size_t size, std::uint64_t seed) {
  ToyConfig cfg;
  cfg.image_size = size;
  save_dataset(out, make_toy_dataset(n, k, seed, cfg));
  std::cout << "wrote " << n << " samples to " << out << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Binarized landmark localization toolkit"};
  app.require_subcommand(1);

  ParamsArgs pa;
  auto* params = app.add_subcommand("params", "Parameter counts for a block or a whole network");
  params->add_option("--block", pa.block, "bottleneck|wider|ms|ms-no1x1|hpm")->required();
  params->add_option("--channels", pa.channels, "Block width")->required();
  params->add_flag("--network", pa.network, "Count the whole hourglass network");
  params->add_option("--hg-depth", pa.hg_depth, "Hourglass depth");
  params->add_option("--outputs", pa.outputs, "Landmarks or classes");
  params->add_flag("--include-bn", pa.include_bn, "Add batch-norm parameters");

  std::string block = "hpm";
  std::size_t channels = 256;
  auto* analyze = app.add_subcommand("analyze", "Structural analysis of a block");
  analyze->add_option("--block", block)->required();
  analyze->add_option("--channels", channels);

  std::string sizes = "1024,256,2304";
  int reps = 5, pin_cpu = -1;
  auto* bench = app.add_subcommand("bench", "Float vs popcount GEMM timing");
  bench->add_option("--sizes", sizes, "m,n,k[;m,n,k...]");
  bench->add_option("--reps", reps);
  bench->add_option("--pin-cpu", pin_cpu, "Pin to one cpu for stable timings");

  std::string config;
  auto* train = app.add_subcommand("train", "Train from a key-value config");
  train->add_option("--config", config)->required();

  std::string model_path, image_path, data, metric = "pckh";
  double thresh = 0.5;
  auto* infer = app.add_subcommand("infer", "Heatmap peaks for one image");
  infer->add_option("--model", model_path)->required();
  infer->add_option("--image", image_path)->required();

  auto* eval = app.add_subcommand("eval", "Evaluate a model on an annotated dataset");
  eval->add_option("--model", model_path)->required();
  eval->add_option("--data", data, "Dataset directory or annotation file")->required();
  eval->add_option("--metric", metric)->check(CLI::IsMember({"pckh", "nme", "seg"}));
  eval->add_option("--thresh", thresh, "PCKh threshold as a fraction of head size");

  std::string in_path, out_path;
  auto* pack = app.add_subcommand("pack", "Rewrite a model with packed binary weights");
  pack->add_option("--in", in_path)->required();
  pack->add_option("--out", out_path)->required();

  auto* report = app.add_subcommand("report", "Compression breakdown of a model file");
  report->add_option("--model", model_path)->required();

  std::string toy_out;
  std::size_t toy_n = 16, toy_k = 4, toy_size = 64;
  std::uint64_t toy_seed = 1;
  auto* make_toy = app.add_subcommand("make-toy", "Write a synthetic landmark dataset");
  make_toy->add_option("--out", toy_out)->required();
  make_toy->add_option("--n", toy_n);
  make_toy->add_option("--landmarks", toy_k);
  make_toy->add_option("--size", toy_size);
  make_toy->add_option("--seed", toy_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "binloc: error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*params) run_params(pa);
    else if (*analyze) run_analyze(block, channels);
    else if (*bench) run_bench(sizes, reps, pin_cpu);
    else if (*train) run_train(config);
    else if (*infer) run_infer(model_path, image_path);
    else if (*eval) run_eval(model_path, data, metric, thresh);
    else if (*pack) run_pack(in_path, out_path);
    else if (*report) run_report(model_path);
    else if (*make_toy) run_make_toy(toy_out, toy_n, toy_k, toy_size, toy_seed);
  } catch (const std::exception& e) {
    std::cerr << "binloc: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
