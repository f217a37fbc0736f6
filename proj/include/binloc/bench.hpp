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

#ifndef BINLOC_BENCH_HPP_
#define BINLOC_BENCH_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace binloc {

struct GemmShape {
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t k = 0;
};

/// Parses "m,n,k;m,n,k;...". Throws ValueError.
std::vector<GemmShape> parse_gemm_shapes(const std::string& text);

struct BenchOptions {
  int reps = 5;
  std::uint64_t seed = 1;
  int pin_cpu = -1;  // pin the process to this cpu when >= 0
};

/// Median milliseconds per product. Popcount time includes packing the
/// left operand; the right operand is packed once, like stored weights.
struct BenchRow {
  GemmShape shape;
  double reference_ms = 0.0;
  double eigen_ms = 0.0;
  double popcount_ms = 0.0;
  double speedup_vs_reference = 0.0;
  double speedup_vs_eigen = 0.0;
  std::int64_t checksum = 0;  // sum of all output entries
};

struct BenchResult {
  std::string environment;
  std::vector<BenchRow> rows;           // only shapes whose outputs all agreed
  std::vector<std::string> failures;    // shapes rejected by the checksum gate

  std::string to_text() const;
};

/// Random +-1 operands; the float reference, Eigen and popcount outputs must
/// agree exactly and match a sampled integer dot-product oracle before a row
/// is reported.
BenchResult bench_gemm(const std::vector<GemmShape>& shapes, const BenchOptions& options = {});

}  // namespace binloc

#endif  // BINLOC_BENCH_HPP_
