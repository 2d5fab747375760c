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

// AVX2/FMA variants. This translation unit is compiled with -mavx2 -mfma and
// must only be entered after the dispatcher has confirmed CPU support.

#include <immintrin.h>

#include <cstddef>
#include <cstdint>

#include "icclab/kernels.hpp"
#include "philox_detail.hpp"

namespace icclab::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                           _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void col_sum_avx2(const double* x, std::size_t rows, std::size_t cols,
                  double* out) {
  std::size_t c = 0;
  for (; c + 4 <= cols; c += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t r = 0; r < rows; ++r) {
      acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + r * cols + c));
    }
    _mm256_storeu_pd(out + c, acc);
  }
  for (; c < cols; ++c) {
    double acc = 0.0;
    for (std::size_t r = 0; r < rows; ++r) acc += x[r * cols + c];
    out[c] = acc;
  }
}

void col_centered_sq_avx2(const double* x, std::size_t rows, std::size_t cols,
                          const double* center, double* out) {
  std::size_t c = 0;
  for (; c + 4 <= cols; c += 4) {
    const __m256d mu = _mm256_loadu_pd(center + c);
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t r = 0; r < rows; ++r) {
      const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + r * cols + c), mu);
      acc = _mm256_fmadd_pd(d, d, acc);
    }
    _mm256_storeu_pd(out + c, acc);
  }
  for (; c < cols; ++c) {
    double acc = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      const double d = x[r * cols + c] - center[c];
      acc += d * d;
    }
    out[c] = acc;
  }
}

void row_sq_norms_avx2(const double* x, std::size_t rows, std::size_t cols,
                       double* out) {
  for (std::size_t r = 0; r < rows; ++r) {
    out[r] = dot_avx2(x + r * cols, x + r * cols, cols);
  }
}

void gemm_nn_avx2(const double* a, const double* b, double* c, std::size_t m,
                  std::size_t k, std::size_t n, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c + i * n;
    if (!accumulate) {
      for (std::size_t j = 0; j < n; ++j) ci[j] = 0.0;
    }
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      if (aip == 0.0) continue;
      axpy_avx2(aip, b + p * n, ci, n);
    }
  }
}

void gemm_nt_avx2(const double* a, const double* b, double* c, std::size_t m,
                  std::size_t k, std::size_t n, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double d = dot_avx2(a + i * k, b + j * k, k);
      c[i * n + j] = accumulate ? c[i * n + j] + d : d;
    }
  }
}

void gemm_tn_avx2(const double* a, const double* b, double* c, std::size_t m,
                  std::size_t k, std::size_t n, bool accumulate) {
  if (!accumulate) {
    for (std::size_t i = 0; i < m * n; ++i) c[i] = 0.0;
  }
  for (std::size_t p = 0; p < k; ++p) {
    const double* ap = a + p * m;
    const double* bp = b + p * n;
    for (std::size_t i = 0; i < m; ++i) {
      if (ap[i] == 0.0) continue;
      axpy_avx2(ap[i], bp, c + i * n, n);
    }
  }
}

// Four Philox blocks per pass: every 32-bit counter word lives in the low
// half of a 64-bit lane so _mm256_mul_epu32 yields the full 64-bit product.
void philox_avx2(std::uint64_t key, std::uint64_t stream,
                 std::uint64_t first_block, std::size_t n_blocks,
                 std::uint32_t* out) {
  const __m256i lo_mask = _mm256_set1_epi64x(0xFFFFFFFFll);
  const __m256i m0 = _mm256_set1_epi64x(detail::kPhiloxM0);
  const __m256i m1 = _mm256_set1_epi64x(detail::kPhiloxM1);
  const __m256i s_lo = _mm256_set1_epi64x(static_cast<std::uint32_t>(stream));
  const __m256i s_hi =
      _mm256_set1_epi64x(static_cast<std::uint32_t>(stream >> 32));
  std::size_t i = 0;
  for (; i + 4 <= n_blocks; i += 4) {
    const std::uint64_t b0 = first_block + i;
    __m256i blocks = _mm256_setr_epi64x(
        static_cast<long long>(b0), static_cast<long long>(b0 + 1),
        static_cast<long long>(b0 + 2), static_cast<long long>(b0 + 3));
    __m256i c0 = _mm256_and_si256(blocks, lo_mask);
    __m256i c1 = _mm256_srli_epi64(blocks, 32);
    __m256i c2 = s_lo;
    __m256i c3 = s_hi;
    std::uint32_t k0 = static_cast<std::uint32_t>(key);
    std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        k0 += detail::kPhiloxW0;
        k1 += detail::kPhiloxW1;
      }
      const __m256i vk0 = _mm256_set1_epi64x(k0);
      const __m256i vk1 = _mm256_set1_epi64x(k1);
      const __m256i p0 = _mm256_mul_epu32(c0, m0);
      const __m256i p1 = _mm256_mul_epu32(c2, m1);
      const __m256i hi0 = _mm256_srli_epi64(p0, 32);
      const __m256i lo0 = _mm256_and_si256(p0, lo_mask);
      const __m256i hi1 = _mm256_srli_epi64(p1, 32);
      const __m256i lo1 = _mm256_and_si256(p1, lo_mask);
      const __m256i n0 = _mm256_xor_si256(_mm256_xor_si256(hi1, c1), vk0);
      const __m256i n2 = _mm256_xor_si256(_mm256_xor_si256(hi0, c3), vk1);
      c0 = n0;
      c1 = lo1;
      c2 = n2;
      c3 = lo0;
    }
    alignas(32) std::uint64_t w0[4], w1[4], w2[4], w3[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(w0), c0);
    _mm256_store_si256(reinterpret_cast<__m256i*>(w1), c1);
    _mm256_store_si256(reinterpret_cast<__m256i*>(w2), c2);
    _mm256_store_si256(reinterpret_cast<__m256i*>(w3), c3);
    for (int lane = 0; lane < 4; ++lane) {
      std::uint32_t* o = out + 4 * (i + lane);
      o[0] = static_cast<std::uint32_t>(w0[lane]);
      o[1] = static_cast<std::uint32_t>(w1[lane]);
      o[2] = static_cast<std::uint32_t>(w2[lane]);
      o[3] = static_cast<std::uint32_t>(w3[lane]);
    }
  }
  for (; i < n_blocks; ++i) {
    const std::uint64_t block = first_block + i;
    const detail::PhiloxBlock r = detail::philox4x32_10(
        {static_cast<std::uint32_t>(block),
         static_cast<std::uint32_t>(block >> 32),
         static_cast<std::uint32_t>(stream),
         static_cast<std::uint32_t>(stream >> 32)},
        static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32));
    for (int w = 0; w < 4; ++w) out[4 * i + w] = r[w];
  }
}

}  // namespace

const KernelTable& avx2_kernel_table() {
  static const KernelTable table = {
      Isa::kAvx2,      "avx2",       dot_avx2,     axpy_avx2,
      col_sum_avx2,    col_centered_sq_avx2,       row_sq_norms_avx2,
      gemm_nn_avx2,    gemm_nt_avx2, gemm_tn_avx2, philox_avx2,
  };
  return table;
}

}  // namespace icclab::simd
