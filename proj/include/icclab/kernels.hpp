// Copyright (c) 2026 The icc-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Data-parallel inner loops used by the statistics, the losses, the sampler
// and the autodiff engine. Each kernel has a portable scalar reference and,
// on x86-64, an AVX2/FMA variant. The variant is chosen once per process:
//
//   ICC_LAB_SIMD=scalar|avx2|auto   (default auto)
//
// All matrices are dense row-major double arrays.

#ifndef ICCLAB_KERNELS_HPP_
#define ICCLAB_KERNELS_HPP_

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace icclab::simd {

enum class Isa { kScalar, kAvx2 };

struct KernelTable {
  Isa isa;
  const char* name;

  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out[c] = sum_r x[r, c]
  void (*col_sum)(const double* x, std::size_t rows, std::size_t cols,
                  double* out);
  // out[c] = sum_r (x[r, c] - center[c])^2
  void (*col_centered_sq)(const double* x, std::size_t rows, std::size_t cols,
                          const double* center, double* out);
  // out[r] = sum_c x[r, c]^2
  void (*row_sq_norms)(const double* x, std::size_t rows, std::size_t cols,
                       double* out);
  // c[m x n] (+)= a[m x k] * b[k x n]
  void (*gemm_nn)(const double* a, const double* b, double* c, std::size_t m,
                  std::size_t k, std::size_t n, bool accumulate);
  // c[m x n] (+)= a[m x k] * b[n x k]^T
  void (*gemm_nt)(const double* a, const double* b, double* c, std::size_t m,
                  std::size_t k, std::size_t n, bool accumulate);
  // c[m x n] (+)= a[k x m]^T * b[k x n]
  void (*gemm_tn)(const double* a, const double* b, double* c, std::size_t m,
                  std::size_t k, std::size_t n, bool accumulate);
  // Philox4x32-10 blocks for counters (first_block + i, stream); writes
  // 4 * n_blocks words. Integer-only, so every variant is bit-identical.
  void (*philox4x32)(std::uint64_t key, std::uint64_t stream,
                     std::uint64_t first_block, std::size_t n_blocks,
                     std::uint32_t* out);
};

const KernelTable& scalar_kernels();

// nullptr when the variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

// The process-wide selection. Resolved on first use and never changed, so
// every thread of a run uses the same arithmetic.
const KernelTable& kernels();

// Parses an ICC_LAB_SIMD value; unknown or unavailable requests fall back to
// the best available table.
const KernelTable& select_kernels(std::string_view request);

}  // namespace icclab::simd

#endif  // ICCLAB_KERNELS_HPP_
