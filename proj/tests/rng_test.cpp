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

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "icclab/rng.hpp"

namespace icclab {
namespace {

TEST(DeriveKey, DependsOnEveryPart) {
  std::set<std::uint64_t> keys;
  for (std::uint64_t i = 0; i < 20; ++i) {
    for (std::uint64_t j = 0; j < 20; ++j) keys.insert(derive_key(7, {i, j}));
  }
  EXPECT_EQ(keys.size(), 400u);
  EXPECT_NE(derive_key(7, {1, 2}), derive_key(7, {2, 1}));
  EXPECT_NE(derive_key(7, {1}), derive_key(8, {1}));
  EXPECT_EQ(derive_key(7, {3, 4}), derive_key(7, {3, 4}));
}

TEST(RandomStream, SameKeySameSequence) {
  RandomStream a(derive_key(1, {2}), 3);
  RandomStream b(derive_key(1, {2}), 3);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(a.next_u32(), b.next_u32());
  RandomStream c(derive_key(1, {2}), 4);
  RandomStream d(derive_key(1, {2}), 3);
  int same = 0;
  for (int i = 0; i < 100; ++i) same += c.next_u32() == d.next_u32();
  EXPECT_LT(same, 3);
}

TEST(RandomStream, BulkNormalsMatchSequentialDraws) {
  for (std::size_t n : {1, 2, 7, 64, 401}) {
    RandomStream bulk(99, 5);
    RandomStream seq(99, 5);
    // Leave the bulk stream mid-block with a cached normal first.
    EXPECT_EQ(bulk.next_u32(), seq.next_u32());
    EXPECT_EQ(bulk.normal(), seq.normal());
    std::vector<double> out(n);
    bulk.fill_normal(out, 2.0);
    for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(out[i], 2.0 * seq.normal()) << i;
    EXPECT_EQ(bulk.next_u32(), seq.next_u32());
  }
}

TEST(RandomStream, NormalMoments) {
  RandomStream s(12345, 0);
  std::vector<double> z(400000);
  s.fill_normal(z);
  double mean = 0.0;
  for (double v : z) mean += v;
  mean /= static_cast<double>(z.size());
  double var = 0.0;
  double kurt = 0.0;
  for (double v : z) {
    var += (v - mean) * (v - mean);
    kurt += std::pow(v - mean, 4);
  }
  var /= static_cast<double>(z.size());
  kurt /= static_cast<double>(z.size()) * var * var;
  // 5-sigma bands for n = 4e5.
  EXPECT_NEAR(mean, 0.0, 5.0 / std::sqrt(4e5));
  EXPECT_NEAR(var, 1.0, 5.0 * std::sqrt(2.0 / 4e5));
  EXPECT_NEAR(kurt, 3.0, 0.05);
}

TEST(RandomStream, UniformRanges) {
  RandomStream s(3, 3);
  std::vector<int> hist(10, 0);
  for (int i = 0; i < 100000; ++i) {
    const double u = s.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double o = s.uniform_open();
    ASSERT_GT(o, 0.0);
    ASSERT_LE(o, 1.0);
    const auto k = s.below(10);
    ASSERT_LT(k, 10u);
    ++hist[k];
  }
  for (int h : hist) EXPECT_NEAR(h, 10000, 500);
}

}  // namespace
}  // namespace icclab
