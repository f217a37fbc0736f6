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

#include "binloc/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "binloc/errors.hpp"

namespace binloc {

namespace fs = std::filesystem;

namespace {

struct Pnm {
  int channels = 0;
  std::size_t width = 0, height = 0;
  unsigned maxval = 0;
  std::vector<unsigned> values;
};

std::size_t read_header_number(std::istream& in, const std::string& path) {
  // Skip whitespace and comments.
  for (;;) {
    const int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (c != EOF && std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  std::size_t v = 0;
  if (!(in >> v)) throw FormatError(path + ": malformed PNM header");
  return v;
}

Pnm read_raw_pnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open image " + path);
  char magic[2] = {0, 0};
  in.read(magic, 2);
  Pnm p;
  if (magic[0] == 'P' && magic[1] == '6') p.channels = 3;
  else if (magic[0] == 'P' && magic[1] == '5') p.channels = 1;
  else throw FormatError(path + ": not a binary PPM/PGM file");
  p.width = read_header_number(in, path);
  p.height = read_header_number(in, path);
  const std::size_t maxval = read_header_number(in, path);
  if (p.width == 0 || p.height == 0 || maxval == 0 || maxval > 65535)
    throw FormatError(path + ": bad PNM dimensions or maxval");
  if (p.width > (1u << 15) || p.height > (1u << 15)) throw FormatError(path + ": image too large");
  p.maxval = static_cast<unsigned>(maxval);
  in.get();  // single whitespace before the raster
  const std::size_t bytes = maxval > 255 ? 2 : 1;
  const std::size_t count = p.width * p.height * static_cast<std::size_t>(p.channels);
  std::vector<unsigned char> raw(count * bytes);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) throw FormatError(path + ": truncated raster");
  p.values.resize(count);
  for (std::size_t i = 0; i < count; ++i)
    p.values[i] = bytes == 2 ? (unsigned{raw[2 * i]} << 8) | raw[2 * i + 1] : raw[i];
  for (unsigned v : p.values)
    if (v > p.maxval) throw FormatError(path + ": sample exceeds maxval");
  return p;
}

void write_raw_pnm(const std::string& path, int channels, std::size_t width, std::size_t height,
                   const std::vector<unsigned char>& raster) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  out << (channels == 3 ? "P6" : "P5") << '\n' << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
  if (!out) throw FormatError("write failed for " + path);
}

}  // namespace

DenseTensor read_pnm(const std::string& path) {
  const Pnm p = read_raw_pnm(path);
  DenseTensor img(Shape4{1, static_cast<std::size_t>(p.channels), p.height, p.width});
  const float scale = 1.0f / static_cast<float>(p.maxval);
  for (std::size_t i = 0; i < p.width * p.height; ++i)
    for (int c = 0; c < p.channels; ++c)
      img.plane(0, static_cast<std::size_t>(c))[i] = static_cast<float>(p.values[i * p.channels + c]) * scale;
  return img;
}

void write_pnm(const std::string& path, const DenseTensor& image) {
  const Shape4& s = image.shape();
  if (s.n != 1 || (s.c != 1 && s.c != 3)) throw ShapeError("write_pnm: need a (1, 1|3, H, W) image");
  std::vector<unsigned char> raster(s.plane() * s.c);
  for (std::size_t i = 0; i < s.plane(); ++i)
    for (std::size_t c = 0; c < s.c; ++c) {
      const float v = std::clamp(image.plane(0, c)[i], 0.0f, 1.0f);
      raster[i * s.c + c] = static_cast<unsigned char>(std::lround(v * 255.0f));
    }
  write_raw_pnm(path, static_cast<int>(s.c), s.w, s.h, raster);
}

std::vector<std::int32_t> read_mask(const std::string& path, std::size_t* height, std::size_t* width) {
  const Pnm p = read_raw_pnm(path);
  if (p.channels != 1) throw FormatError(path + ": masks must be PGM");
  *height = p.height;
  *width = p.width;
  return {p.values.begin(), p.values.end()};
}

void write_mask(const std::string& path, const std::vector<std::int32_t>& mask, std::size_t height,
                std::size_t width) {
  if (mask.size() != height * width) throw ShapeError("write_mask: size mismatch");
  std::vector<unsigned char> raster(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] < 0 || mask[i] > 255) throw ValueError("write_mask: class ids must fit in 8 bits");
    raster[i] = static_cast<unsigned char>(mask[i]);
  }
  write_raw_pnm(path, 1, width, height, raster);
}

std::vector<Sample> load_dataset(const std::string& annotation_path) {
  std::ifstream in(annotation_path);
  if (!in) throw FormatError("cannot open annotations " + annotation_path);
  const fs::path root = fs::path(annotation_path).parent_path();
  std::vector<Sample> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = annotation_path + ":" + std::to_string(lineno);
    try {
      const nlohmann::json j = nlohmann::json::parse(line);
      Sample s;
      s.image = read_pnm((root / j.at("image").get<std::string>()).string());
      if (s.image.shape().c == 1) {
        DenseTensor rgb(Shape4{1, 3, s.height(), s.width()});
        for (std::size_t c = 0; c < 3; ++c) std::copy_n(s.image.plane(0, 0), s.image.size(), rgb.plane(0, c));
        s.image = std::move(rgb);
      }
      for (const auto& kp : j.at("keypoints")) {
        if (kp.size() != 3) throw FormatError("keypoints need [x, y, visible]");
        Keypoint k{kp[0].get<double>(), kp[1].get<double>(), kp[2].get<double>() > 0};
        if (k.visible && (k.x < 0 || k.y < 0 || k.x > static_cast<double>(s.width()) - 1 ||
                          k.y > static_cast<double>(s.height()) - 1))
          k.visible = false;
        s.keypoints.push_back(k);
      }
      s.head_size = j.value("head_size", 0.0);
      if (j.contains("bbox")) {
        const auto& b = j["bbox"];
        if (b.size() != 4) throw FormatError("bbox needs [x, y, w, h]");
        s.bbox = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
      }
      if (j.contains("mask")) s.mask = read_mask((root / j["mask"].get<std::string>()).string(), &s.mask_h, &s.mask_w);
      out.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(where + ": " + e.what());
    } catch (const FormatError& e) {
      throw FormatError(where + ": " + e.what());
    }
  }
  return out;
}

void save_dataset(const std::string& dir, const std::vector<Sample>& samples, const std::string& annotation_name) {
  fs::create_directories(fs::path(dir) / "images");
  std::ofstream ann(fs::path(dir) / annotation_name);
  if (!ann) throw FormatError("cannot write annotations in " + dir);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Sample& s = samples[i];
    std::ostringstream name;
    name << "images/" << std::setw(5) << std::setfill('0') << i << ".ppm";
    write_pnm((fs::path(dir) / name.str()).string(), s.image);
    nlohmann::json j;
    j["image"] = name.str();
    j["keypoints"] = nlohmann::json::array();
    for (const Keypoint& k : s.keypoints) j["keypoints"].push_back({k.x, k.y, k.visible ? 1 : 0});
    j["head_size"] = s.head_size;
    j["bbox"] = {s.bbox.x, s.bbox.y, s.bbox.w, s.bbox.h};
    if (!s.mask.empty()) {
      std::ostringstream mname;
      mname << "images/" << std::setw(5) << std::setfill('0') << i << "_mask.pgm";
      write_mask((fs::path(dir) / mname.str()).string(), s.mask, s.mask_h, s.mask_w);
      j["mask"] = mname.str();
    }
    ann << j.dump() << '\n';
  }
}

Sample resize_sample(const Sample& s, std::size_t size) {
  if (size == 0) throw ValueError("resize_sample: zero size");
  const std::size_t w = s.width(), h = s.height();
  if (w == size && h == size) return s;
  const double sx = static_cast<double>(size) / static_cast<double>(w);
  const double sy = static_cast<double>(size) / static_cast<double>(h);
  Sample out = s;
  out.image = DenseTensor(Shape4{1, s.image.shape().c, size, size});
  for (std::size_t c = 0; c < s.image.shape().c; ++c) {
    const float* in = s.image.plane(0, c);
    float* dst = out.image.plane(0, c);
    for (std::size_t y = 0; y < size; ++y)
      for (std::size_t x = 0; x < size; ++x) {
        const double fx = std::clamp((static_cast<double>(x) + 0.5) / sx - 0.5, 0.0, static_cast<double>(w - 1));
        const double fy = std::clamp((static_cast<double>(y) + 0.5) / sy - 0.5, 0.0, static_cast<double>(h - 1));
        const std::size_t x0 = static_cast<std::size_t>(fx), y0 = static_cast<std::size_t>(fy);
        const std::size_t x1 = std::min(x0 + 1, w - 1), y1 = std::min(y0 + 1, h - 1);
        const double ax = fx - static_cast<double>(x0), ay = fy - static_cast<double>(y0);
        dst[y * size + x] = static_cast<float>((1 - ay) * ((1 - ax) * in[y0 * w + x0] + ax * in[y0 * w + x1]) +
                                               ay * ((1 - ax) * in[y1 * w + x0] + ax * in[y1 * w + x1]));
      }
  }
  for (Keypoint& k : out.keypoints) {
    k.x = (k.x + 0.5) * sx - 0.5;
    k.y = (k.y + 0.5) * sy - 0.5;
  }
  out.head_size = s.head_size * std::sqrt(sx * sy);
  out.bbox = {s.bbox.x * sx, s.bbox.y * sy, s.bbox.w * sx, s.bbox.h * sy};
  return out;
}

}  // namespace binloc
