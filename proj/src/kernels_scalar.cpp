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

#include <cstddef>
#include <cstdint>

#include "icclab/kernels.hpp"
#include "philox_detail.hpp"

namespace icclab::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void col_sum_scalar(const double* x, std::size_t rows, std::size_t cols,
                    double* out) {
  for (std::size_t c = 0; c < cols; ++c) out[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = x + r * cols;
    for (std::size_t c = 0; c < cols; ++c) out[c] += row[c];
  }
}

void col_centered_sq_scalar(const double* x, std::size_t rows,
                            std::size_t cols, const double* center,
                            double* out) {
  for (std::size_t c = 0; c < cols; ++c) out[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = x + r * cols;
    for (std::size_t c = 0; c < cols; ++c) {
      const double d = row[c] - center[c];
      out[c] += d * d;
    }
  }
}

void row_sq_norms_scalar(const double* x, std::size_t rows, std::size_t cols,
                         double* out) {
  for (std::size_t r = 0; r < rows; ++r) {
    out[r] = dot_scalar(x + r * cols, x + r * cols, cols);
  }
}

void gemm_nn_scalar(const double* a, const double* b, double* c, std::size_t m,
                    std::size_t k, std::size_t n, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c + i * n;
    if (!accumulate) {
      for (std::size_t j = 0; j < n; ++j) ci[j] = 0.0;
    }
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      const double* bp = b + p * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
    }
  }
}

void gemm_nt_scalar(const double* a, const double* b, double* c, std::size_t m,
                    std::size_t k, std::size_t n, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double d = dot_scalar(a + i * k, b + j * k, k);
      c[i * n + j] = accumulate ? c[i * n + j] + d : d;
    }
  }
}

void gemm_tn_scalar(const double* a, const double* b, double* c, std::size_t m,
                    std::size_t k, std::size_t n, bool accumulate) {
  if (!accumulate) {
    for (std::size_t i = 0; i < m * n; ++i) c[i] = 0.0;
  }
  for (std::size_t p = 0; p < k; ++p) {
    const double* ap = a + p * m;
    const double* bp = b + p * n;
    for (std::size_t i = 0; i < m; ++i) {
      const double api = ap[i];
      double* ci = c + i * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += api * bp[j];
    }
  }
}

void philox_scalar(std::uint64_t key, std::uint64_t stream,
                   std::uint64_t first_block, std::size_t n_blocks,
                   std::uint32_t* out) {
  for (std::size_t i = 0; i < n_blocks; ++i) {
    const std::uint64_t block = first_block + i;
    detail::PhiloxBlock ctr = {static_cast<std::uint32_t>(block),
                               static_cast<std::uint32_t>(block >> 32),
                               static_cast<std::uint32_t>(stream),
                               static_cast<std::uint32_t>(stream >> 32)};
    const detail::PhiloxBlock r = detail::philox4x32_10(
        ctr, static_cast<std::uint32_t>(key),
        static_cast<std::uint32_t>(key >> 32));
    out[4 * i + 0] = r[0];
    out[4 * i + 1] = r[1];
    out[4 * i + 2] = r[2];
    out[4 * i + 3] = r[3];
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table = {
      Isa::kScalar,      "scalar",       dot_scalar,     axpy_scalar,
      col_sum_scalar,    col_centered_sq_scalar,         row_sq_norms_scalar,
      gemm_nn_scalar,    gemm_nt_scalar, gemm_tn_scalar, philox_scalar,
  };
  return table;
}

}  // namespace icclab::simd
