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

#include "icclab/rng.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "icclab/kernels.hpp"

namespace icclab {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;

inline std::uint64_t join(std::uint32_t lo, std::uint32_t hi) {
  return static_cast<std::uint64_t>(lo) | (static_cast<std::uint64_t>(hi) << 32);
}

inline void box_muller(std::uint64_t a, std::uint64_t b, double* z0,
                       double* z1) {
  const double u1 = static_cast<double>((a >> 11) + 1) * kTwoPow53Inv;
  const double u2 = static_cast<double>(b >> 11) * kTwoPow53Inv;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  *z0 = r * std::cos(theta);
  *z1 = r * std::sin(theta);
}

}  // namespace

std::uint64_t derive_key(std::uint64_t seed,
                         std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = splitmix64(seed);
  for (const std::uint64_t p : parts) h = splitmix64(h ^ splitmix64(p));
  return h;
}

RandomStream::RandomStream(std::uint64_t key, std::uint64_t stream)
    : key_(key), stream_(stream) {}

void RandomStream::refill() {
  simd::kernels().philox4x32(key_, stream_, next_block_, 1, words_.data());
  ++next_block_;
  word_pos_ = 0;
}

std::uint32_t RandomStream::next_u32() {
  if (word_pos_ >= 4) refill();
  return words_[word_pos_++];
}

std::uint64_t RandomStream::next_u64() {
  const std::uint32_t lo = next_u32();
  const std::uint32_t hi = next_u32();
  return join(lo, hi);
}

double RandomStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * kTwoPow53Inv;
}

double RandomStream::uniform_open() {
  return static_cast<double>((next_u64() >> 11) + 1) * kTwoPow53Inv;
}

double RandomStream::normal() {
  if (cached_normal_) {
    const double z = *cached_normal_;
    cached_normal_.reset();
    return z;
  }
  const std::uint64_t a = next_u64();
  const std::uint64_t b = next_u64();
  double z0 = 0.0;
  double z1 = 0.0;
  box_muller(a, b, &z0, &z1);
  cached_normal_ = z1;
  return z0;
}

std::uint64_t RandomStream::below(std::uint64_t n) {
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return x % n;
}

void RandomStream::fill_normal(std::span<double> out, double scale) {
  std::size_t i = 0;
  while ((cached_normal_ || word_pos_ < 4) && i < out.size()) {
    out[i++] = scale * normal();
  }
  if (i >= out.size()) return;

  // Block-aligned bulk path: one block -> one Box-Muller pair, the same
  // consumption pattern as repeated normal() calls.
  const std::size_t remaining = out.size() - i;
  const std::size_t pairs = remaining / 2;
  if (pairs > 0) {
    thread_local std::vector<std::uint32_t> words;
    words.resize(4 * pairs);
    simd::kernels().philox4x32(key_, stream_, next_block_, pairs, words.data());
    next_block_ += pairs;
    for (std::size_t p = 0; p < pairs; ++p) {
      const std::uint32_t* w = words.data() + 4 * p;
      double z0 = 0.0;
      double z1 = 0.0;
      box_muller(join(w[0], w[1]), join(w[2], w[3]), &z0, &z1);
      out[i++] = scale * z0;
      out[i++] = scale * z1;
    }
  }
  if (i < out.size()) out[i++] = scale * normal();
}

}  // namespace icclab
