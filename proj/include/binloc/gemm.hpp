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

#ifndef BINLOC_GEMM_HPP_
#define BINLOC_GEMM_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "binloc/bitplane.hpp"

namespace binloc {

enum class Transpose { kNo, kYes };

/// C = alpha * op(A) * op(B) + beta * C on row-major operands with leading
/// dimensions, op(A) m x k and op(B) k x n. Backed by Eigen.
template <typename T>
void gemm(Transpose trans_a, Transpose trans_b, std::size_t m, std::size_t n, std::size_t k, T alpha,
          const T* a, std::size_t lda, const T* b, std::size_t ldb, T beta, T* c, std::size_t ldc);

/// Plain cache-blocked C = A * B (row-major, A m x k, B k x n). No vendor
/// code; this is the float baseline the popcount kernel is benchmarked
/// against.
void gemm_reference(std::size_t m, std::size_t n, std::size_t k, const float* a, const float* b, float* c);

/// Word-parallel XNOR/popcount product. Row i of `a` and row j of `b` are
/// +-1 vectors of the same logical length; entry (i, j) of the result is
/// their dot product. Result is a.rows x b.rows, row-major.
std::vector<std::int32_t> gemm_popcount(const BitMatrix& a, const BitMatrix& b);

}  // namespace binloc

#endif  // BINLOC_GEMM_HPP_
