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

#ifndef ICCLAB_RNG_HPP_
#define ICCLAB_RNG_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>

namespace icclab {

// Derives a 64-bit stream key as a pure function of a seed and a tuple of
// indices (cell coordinates, repeat index, purpose tag, ...).
std::uint64_t derive_key(std::uint64_t seed,
                         std::initializer_list<std::uint64_t> parts);

// Counter-based random stream: block i of stream s under key k is
// Philox4x32-10(counter = (i, s), key = k). Two streams constructed with the
// same (key, stream) produce identical sequences on every platform.
class RandomStream {
 public:
  RandomStream(std::uint64_t key, std::uint64_t stream);

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  // [0, 1)
  double uniform();
  // (0, 1]
  double uniform_open();
  // Box-Muller; pairs are cached.
  double normal();
  // Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);
  // out[i] = scale * z_i with z_i standard normal. Uses the bulk SIMD
  // Philox kernel when the stream sits on a block boundary.
  void fill_normal(std::span<double> out, double scale = 1.0);

 private:
  void refill();

  std::uint64_t key_;
  std::uint64_t stream_;
  std::uint64_t next_block_ = 0;
  std::array<std::uint32_t, 4> words_{};
  int word_pos_ = 4;
  std::optional<double> cached_normal_;
};

}  // namespace icclab

#endif  // ICCLAB_RNG_HPP_
