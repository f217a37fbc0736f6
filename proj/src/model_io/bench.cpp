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

#include "binloc/bench.hpp"

#include <sched.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "binloc/bitplane.hpp"
#include "binloc/errors.hpp"
#include "binloc/gemm.hpp"
#include "binloc/keyvalue.hpp"

namespace binloc {

std::vector<GemmShape> parse_gemm_shapes(const std::string& text) {
  std::vector<GemmShape> shapes;
  std::stringstream groups(text);
  std::string group;
  while (std::getline(groups, group, ';')) {
    if (group.find_first_not_of(" \t") == std::string::npos) continue;
    std::stringstream fields(group);
    std::string f;
    std::vector<std::size_t> v;
    while (std::getline(fields, f, ',')) {
      const auto b = f.find_first_not_of(" \t"), e = f.find_last_not_of(" \t");
      v.push_back(parse_size("gemm shape", b == std::string::npos ? std::string() : f.substr(b, e - b + 1)));
    }
    if (v.size() != 3) throw ValueError("gemm shape '" + group + "' must be m,n,k");
    if (v[0] == 0 || v[1] == 0 || v[2] == 0) throw ValueError("gemm shape '" + group + "' has a zero dimension");
    shapes.push_back({v[0], v[1], v[2]});
  }
  if (shapes.empty()) throw ValueError("no gemm shapes given");
  return shapes;
}

namespace {

std::string cpu_model() {
  std::ifstream in("/proc/cpuinfo");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) return line.substr(colon + 2);
    }
  }
  return "unknown cpu";
}

template <typename F>
double median_ms(int reps, F&& f) {
  std::vector<double> times;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    times.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  }
  std::sort(times.begin(), times.end());
  return times[times.size() / 2];
}

BitMatrix pack_rows(const std::vector<float>& a, std::size_t rows, std::size_t cols) {
  BitMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const float* src = a.data() + r * cols;
    Word* dst = m.row(r).data();
    for (std::size_t w = 0; w < m.words_per_row; ++w) {
      const std::size_t base = w * kWordBits, end = std::min(cols, base + kWordBits);
      Word acc = 0;
      for (std::size_t i = base; i < end; ++i) acc |= Word{src[i] >= 0.0f} << (i - base);
      dst[w] = acc;
    }
  }
  return m;
}

std::string shape_name(const GemmShape& s) {
  return std::to_string(s.m) + "," + std::to_string(s.n) + "," + std::to_string(s.k);
}

}  // namespace

BenchResult bench_gemm(const std::vector<GemmShape>& shapes, const BenchOptions& options) {
  if (options.reps < 1) throw ValueError("bench needs at least one repetition");
  BenchResult result;
  if (options.pin_cpu >= 0) {
    cpu_set_t set;
    CPU_ZERO(&set);
    CPU_SET(options.pin_cpu, &set);
    if (sched_setaffinity(0, sizeof(set), &set) != 0)
      throw ValueError("cannot pin to cpu " + std::to_string(options.pin_cpu));
  }
  std::ostringstream env;
  env << "cpu=\"" << cpu_model() << "\" compiler=\"" << __VERSION__ << "\" threads=1"
      << " reference=blocked-float-gemm popcount=xnor-popcount-u64";
  result.environment = env.str();

  std::mt19937_64 rng(options.seed);
  for (const GemmShape& s : shapes) {
    std::bernoulli_distribution coin(0.5);
    std::vector<float> a(s.m * s.k), bt(s.n * s.k), b(s.k * s.n);
    for (float& v : a) v = coin(rng) ? 1.0f : -1.0f;
    for (float& v : bt) v = coin(rng) ? 1.0f : -1.0f;
    for (std::size_t j = 0; j < s.n; ++j)
      for (std::size_t p = 0; p < s.k; ++p) b[p * s.n + j] = bt[j * s.k + p];

    std::vector<float> ref(s.m * s.n), eig(s.m * s.n);
    std::vector<std::int32_t> pop;
    const BitMatrix wb = pack_rows(bt, s.n, s.k);

    BenchRow row;
    row.shape = s;
    row.reference_ms = median_ms(options.reps, [&] { gemm_reference(s.m, s.n, s.k, a.data(), b.data(), ref.data()); });
    row.eigen_ms = median_ms(options.reps, [&] {
      gemm<float>(Transpose::kNo, Transpose::kNo, s.m, s.n, s.k, 1.0f, a.data(), s.k, b.data(), s.n, 0.0f,
                  eig.data(), s.n);
    });
    row.popcount_ms = median_ms(options.reps, [&] { pop = gemm_popcount(pack_rows(a, s.m, s.k), wb); });

    bool ok = pop.size() == ref.size();
    for (std::size_t i = 0; ok && i < ref.size(); ++i)
      ok = ref[i] == static_cast<float>(pop[i]) && eig[i] == ref[i];
    std::uniform_int_distribution<std::size_t> pick_i(0, s.m - 1), pick_j(0, s.n - 1);
    for (int t = 0; ok && t < 64; ++t) {
      const std::size_t i = pick_i(rng), j = pick_j(rng);
      std::int64_t dot = 0;
      for (std::size_t p = 0; p < s.k; ++p) dot += static_cast<std::int64_t>(a[i * s.k + p] * bt[j * s.k + p]);
      ok = dot == pop[i * s.n + j];
    }
    if (!ok) {
      result.failures.push_back("checksum mismatch for " + shape_name(s));
      continue;
    }
    for (std::int32_t v : pop) row.checksum += v;
    row.speedup_vs_reference = row.reference_ms / row.popcount_ms;
    row.speedup_vs_eigen = row.eigen_ms / row.popcount_ms;
    result.rows.push_back(row);
  }
  return result;
}

std::string BenchResult::to_text() const {
  std::ostringstream os;
  os << "# " << environment << '\n';
  os << std::left << std::setw(20) << "m,n,k" << std::right << std::setw(12) << "float_ms" << std::setw(12)
     << "eigen_ms" << std::setw(12) << "popcnt_ms" << std::setw(12) << "vs_float" << std::setw(12) << "vs_eigen"
     << std::setw(14) << "checksum" << '\n';
  os << std::fixed;
  for (const BenchRow& r : rows) {
    os << std::left << std::setw(20) << shape_name(r.shape) << std::right << std::setprecision(3) << std::setw(12)
       << r.reference_ms << std::setw(12) << r.eigen_ms << std::setw(12) << r.popcount_ms << std::setprecision(2)
       << std::setw(11) << r.speedup_vs_reference << 'x' << std::setw(11) << r.speedup_vs_eigen << 'x'
       << std::setw(14) << r.checksum << '\n';
  }
  for (const std::string& f : failures) os << "FAILED " << f << '\n';
  return os.str();
}

}  // namespace binloc
