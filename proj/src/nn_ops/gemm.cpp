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

#include "binloc/gemm.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include <Eigen/Core>

#include "binloc/errors.hpp"

namespace binloc {

template <typename T>
void gemm(Transpose trans_a, Transpose trans_b, std::size_t m, std::size_t n, std::size_t k, T alpha, const T* a,
          std::size_t lda, const T* b, std::size_t ldb, T beta, T* c, std::size_t ldc) {
  using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using Stride = Eigen::OuterStride<>;
  const auto rows = [](Transpose t, std::size_t r, std::size_t c) { return t == Transpose::kNo ? r : c; };
  const auto ei = [](std::size_t v) { return static_cast<Eigen::Index>(v); };

  Eigen::Map<const RowMat, 0, Stride> A(a, ei(rows(trans_a, m, k)), ei(rows(trans_a, k, m)), Stride(ei(lda)));
  Eigen::Map<const RowMat, 0, Stride> B(b, ei(rows(trans_b, k, n)), ei(rows(trans_b, n, k)), Stride(ei(ldb)));
  Eigen::Map<RowMat, 0, Stride> C(c, ei(m), ei(n), Stride(ei(ldc)));

  if (beta == T(0)) {
    C.setZero();
  } else if (beta != T(1)) {
    C *= beta;
  }
  if (m == 0 || n == 0 || k == 0) return;
  if (trans_a == Transpose::kNo && trans_b == Transpose::kNo) {
    C.noalias() += alpha * A * B;
  } else if (trans_a == Transpose::kNo) {
    C.noalias() += alpha * A * B.transpose();
  } else if (trans_b == Transpose::kNo) {
    C.noalias() += alpha * A.transpose() * B;
  } else {
    C.noalias() += alpha * A.transpose() * B.transpose();
  }
}

template void gemm<float>(Transpose, Transpose, std::size_t, std::size_t, std::size_t, float, const float*,
                          std::size_t, const float*, std::size_t, float, float*, std::size_t);
template void gemm<double>(Transpose, Transpose, std::size_t, std::size_t, std::size_t, double, const double*,
                           std::size_t, const double*, std::size_t, double, double*, std::size_t);

void gemm_reference(std::size_t m, std::size_t n, std::size_t k, const float* a, const float* b, float* c) {
  constexpr std::size_t kRowBlock = 32;
  constexpr std::size_t kDepthBlock = 128;
  std::fill(c, c + m * n, 0.0f);
  for (std::size_t i0 = 0; i0 < m; i0 += kRowBlock) {
    const std::size_t i1 = std::min(m, i0 + kRowBlock);
    for (std::size_t p0 = 0; p0 < k; p0 += kDepthBlock) {
      const std::size_t p1 = std::min(k, p0 + kDepthBlock);
      for (std::size_t i = i0; i < i1; ++i) {
        float* __restrict crow = c + i * n;
        for (std::size_t p = p0; p < p1; ++p) {
          const float aip = a[i * k + p];
          const float* __restrict brow = b + p * n;
          for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
        }
      }
    }
  }
}

std::vector<std::int32_t> gemm_popcount(const BitMatrix& a, const BitMatrix& b) {
  if (a.bits_per_row != b.bits_per_row) {
    throw ShapeError("gemm_popcount: row lengths " + std::to_string(a.bits_per_row) + " and " +
                     std::to_string(b.bits_per_row) + " differ");
  }
  const std::size_t n_bits = a.bits_per_row;
  if (n_bits > (std::size_t{1} << 31)) throw ShapeError("gemm_popcount: row length exceeds 2^31");
  const std::size_t m = a.rows;
  const std::size_t n = b.rows;
  const std::size_t words = a.words_per_row;
  const auto total = static_cast<std::int32_t>(n_bits);
  std::vector<std::int32_t> out(m * n);

  // Padding bits are zero in both operands, so they never show up in the XOR.
  constexpr std::size_t kColBlock = 32;
  for (std::size_t j0 = 0; j0 < n; j0 += kColBlock) {
    const std::size_t j1 = std::min(n, j0 + kColBlock);
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
      const Word* a0 = a.words.data() + (i + 0) * words;
      const Word* a1 = a.words.data() + (i + 1) * words;
      const Word* a2 = a.words.data() + (i + 2) * words;
      const Word* a3 = a.words.data() + (i + 3) * words;
      for (std::size_t j = j0; j < j1; ++j) {
        const Word* bj = b.words.data() + j * words;
        std::int32_t d0 = 0, d1 = 0, d2 = 0, d3 = 0;
        for (std::size_t w = 0; w < words; ++w) {
          const Word bw = bj[w];
          d0 += std::popcount(a0[w] ^ bw);
          d1 += std::popcount(a1[w] ^ bw);
          d2 += std::popcount(a2[w] ^ bw);
          d3 += std::popcount(a3[w] ^ bw);
        }
        out[(i + 0) * n + j] = total - 2 * d0;
        out[(i + 1) * n + j] = total - 2 * d1;
        out[(i + 2) * n + j] = total - 2 * d2;
        out[(i + 3) * n + j] = total - 2 * d3;
      }
    }
    for (; i < m; ++i) {
      const Word* ai = a.words.data() + i * words;
      for (std::size_t j = j0; j < j1; ++j) {
        const Word* bj = b.words.data() + j * words;
        std::int32_t d = 0;
        for (std::size_t w = 0; w < words; ++w) d += std::popcount(ai[w] ^ bj[w]);
        out[i * n + j] = total - 2 * d;
      }
    }
  }
  return out;
}

}  // namespace binloc
