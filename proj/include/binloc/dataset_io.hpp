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

#ifndef BINLOC_DATASET_IO_HPP_
#define BINLOC_DATASET_IO_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "binloc/sample.hpp"

namespace binloc {

/// Binary PPM (P6, 3 channels) or PGM (P5, 1 channel), maxval up to 65535.
/// Values are scaled to [0, 1].
DenseTensor read_pnm(const std::string& path);
/// Writes P6 for 3 channels, P5 for 1; values are clamped to [0, 1] and
/// stored with 8 bits.
void write_pnm(const std::string& path, const DenseTensor& image);

/// PGM whose grey levels are class ids.
std::vector<std::int32_t> read_mask(const std::string& path, std::size_t* height, std::size_t* width);
void write_mask(const std::string& path, const std::vector<std::int32_t>& mask, std::size_t height, std::size_t width);

/// One JSON object per line:
///   {"image": "img/0001.ppm", "keypoints": [[x, y, visible], ...],
///    "head_size": 42.0, "bbox": [x, y, w, h], "mask": "mask/0001.pgm"}
/// Paths are relative to the annotation file's directory; mask is optional.
std::vector<Sample> load_dataset(const std::string& annotation_path);
void save_dataset(const std::string& dir, const std::vector<Sample>& samples,
                  const std::string& annotation_name = "annotations.jsonl");

/// Bilinear resize to size x size, keypoints, head size and bbox scaled to
/// match. Masks use nearest neighbour.
Sample resize_sample(const Sample& s, std::size_t size);

}  // namespace binloc

#endif  // BINLOC_DATASET_IO_HPP_
