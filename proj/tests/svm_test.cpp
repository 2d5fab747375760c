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

#include "icclab/svm.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "icclab/error.hpp"
#include "test_util.hpp"

namespace icclab {
namespace {

// Classifies each test row by its nearest training-class mean.
double nearest_centroid_error(const EmbeddingBatch& train, const EmbeddingBatch& test) {
  const std::size_t d = train.dim();
  std::vector<std::vector<double>> means(train.n_classes(), std::vector<double>(d, 0.0));
  for (std::size_t j = 0; j < train.n_classes(); ++j) {
    for (std::size_t r = 0; r < train.class_size(j); ++r) {
      const auto row = train.row(train.class_begin(j) + r);
      for (std::size_t l = 0; l < d; ++l) means[j][l] += row[l] / static_cast<double>(train.class_size(j));
    }
  }
  std::size_t wrong = 0;
  for (std::size_t j = 0; j < test.n_classes(); ++j) {
    for (std::size_t r = 0; r < test.class_size(j); ++r) {
      const auto row = test.row(test.class_begin(j) + r);
      std::size_t best = 0;
      double best_d = INFINITY;
      for (std::size_t c = 0; c < means.size(); ++c) {
        double dist = 0.0;
        for (std::size_t l = 0; l < d; ++l) dist += (row[l] - means[c][l]) * (row[l] - means[c][l]);
        if (dist < best_d) {
          best_d = dist;
          best = c;
        }
      }
      if (best != j) ++wrong;
    }
  }
  return static_cast<double>(wrong) / static_cast<double>(test.total_rows());
}

// Rank = 1 + #smaller + (#equal - 1) / 2, then Pearson on the ranks.
double naive_spearman(const std::vector<double>& a, const std::vector<double>& b) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      double less = 0.0;
      double equal = 0.0;
      for (double w : v) {
        if (w < v[i]) less += 1.0;
        if (w == v[i]) equal += 1.0;
      }
      r[i] = 1.0 + less + (equal - 1.0) / 2.0;
    }
    return r;
  };
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const double n = static_cast<double>(a.size());
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += ra[i] / n;
    mb += rb[i] / n;
  }
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

EmbeddingBatch separable_clouds() {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> z(0.0, 0.05);
  std::vector<std::vector<std::vector<double>>> classes(2);
  for (int j = 0; j < 2; ++j) {
    const double cx = j == 0 ? -2.0 : 2.0;
    for (int i = 0; i < 30; ++i) classes[j].push_back({cx + z(rng), 1.0 + z(rng)});
  }
  return EmbeddingBatch::from_classes(classes);
}

TEST(SvmConfigValidation, DefaultsAndBadFields) {
  const SvmConfig c;
  EXPECT_DOUBLE_EQ(c.reg_strength, 1e-3);
  EXPECT_EQ(c.epochs, 50u);
  EXPECT_DOUBLE_EQ(c.learning_rate, 0.01);
  EXPECT_DOUBLE_EQ(c.train_fraction, 0.5);
  EXPECT_NO_THROW(validate(c));
  SvmConfig bad = c;
  bad.train_fraction = 1.0;
  EXPECT_THROW(validate(bad), Error);
  bad = c;
  bad.reg_strength = 0.0;
  EXPECT_THROW(validate(bad), Error);
}

TEST(TrainLinearSvm, SeparableCloudsHaveZeroTrainingError) {
  const EmbeddingBatch b = separable_clouds();
  const SvmModel m = train_linear_svm(b, {});
  EXPECT_EQ(m.error_rate(b), 0.0);
}

TEST(TrainLinearSvm, ObjectiveTraceNeverIncreases) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const EmbeddingBatch b = testing::random_batch(rng, 4, 25, 8, 0.5, 1.0);
    const SvmModel m = train_linear_svm(b, {}, trial);
    ASSERT_EQ(m.objective_trace.size(), 51u);
    // The zero model pays a unit hinge for each one-vs-rest problem.
    EXPECT_DOUBLE_EQ(m.objective_trace.front(), 4.0);
    for (std::size_t e = 1; e < m.objective_trace.size(); ++e) {
      EXPECT_LE(m.objective_trace[e], m.objective_trace[e - 1] + 1e-6);
    }
    EXPECT_NEAR(svm_objective(m, b, 1e-3), m.objective_trace.back(), 1e-12);
  }
}

TEST(TrainLinearSvm, DeterministicPerSeedAndStream) {
  std::mt19937_64 rng(9);
  const EmbeddingBatch b = testing::random_batch(rng, 3, 20, 5, 1.0, 1.0);
  SvmConfig c;
  c.seed = 42;
  const SvmModel a = train_linear_svm(b, c, 3);
  const SvmModel again = train_linear_svm(b, c, 3);
  EXPECT_EQ(a.weights, again.weights);
  EXPECT_EQ(a.bias, again.bias);
  EXPECT_NE(a.weights, train_linear_svm(b, c, 4).weights);
}

TEST(TrainLinearSvm, GenericDimensionPathMatchesShape) {
  std::mt19937_64 rng(2);
  const EmbeddingBatch b = testing::random_batch(rng, 3, 12, 5, 2.0, 0.2);
  const SvmModel m = train_linear_svm(b, {});
  EXPECT_EQ(m.weights.size(), 15u);
  EXPECT_LT(m.error_rate(b), 0.2);
}

TEST(TrainLinearSvm, MissingClassIsADegenerateSplit) {
  const EmbeddingBatch b(std::vector<std::size_t>{3, 0, 2}, 2, std::vector<double>(10, 1.0));
  try {
    train_linear_svm(b, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateSplit);
  }
}

TEST(SvmModel, TiesGoToTheLowestClass) {
  SvmModel m;
  m.n_classes = 3;
  m.dim = 2;
  m.weights = {0.0, 0.0, 1.0, 0.0, 1.0, 0.0};
  m.bias = {0.0, 0.0, 0.0};
  const std::vector<double> x{0.0, 0.0};
  EXPECT_EQ(m.predict(x), 0u);
  const std::vector<double> y{1.0, 5.0};
  EXPECT_EQ(m.predict(y), 1u);
}

TEST(SplitStratified, PreservesBalanceAndRows) {
  std::mt19937_64 rng(4);
  const EmbeddingBatch b = testing::random_batch(rng, 4, 10, 3, 1.0, 1.0);
  const SplitBatches s = split_stratified(b, 0.5, 77, 0);
  for (std::size_t j = 0; j < 4; ++j) {
    EXPECT_EQ(s.train.class_size(j), 5u);
    EXPECT_EQ(s.test.class_size(j), 5u);
    std::vector<std::vector<double>> original;
    std::vector<std::vector<double>> joined;
    for (std::size_t r = 0; r < 10; ++r) {
      const auto row = b.row(b.class_begin(j) + r);
      original.emplace_back(row.begin(), row.end());
    }
    for (const EmbeddingBatch* part : {&s.train, &s.test}) {
      for (std::size_t r = 0; r < part->class_size(j); ++r) {
        const auto row = part->row(part->class_begin(j) + r);
        joined.emplace_back(row.begin(), row.end());
      }
    }
    std::sort(original.begin(), original.end());
    std::sort(joined.begin(), joined.end());
    EXPECT_EQ(original, joined);
  }
  EXPECT_EQ(s.train, split_stratified(b, 0.5, 77, 0).train);
  EXPECT_NE(s.train, split_stratified(b, 0.5, 77, 1).train);
}

TEST(SplitStratified, SingletonClassCannotBeSplit) {
  const EmbeddingBatch b(std::vector<std::size_t>{1, 4}, 1, std::vector<double>(5, 0.0));
  try {
    split_stratified(b, 0.5, 1, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateSplit);
  }
}

GridConfig corner_config() {
  GridConfig c;
  c.intra = {0.02, 2.0, 1.98};
  c.inter = {0.01, 0.60, 0.59};
  c.n_repeats = 20;
  return c;
}

TEST(SvmErrorSurface, CornerCellsAgreeWithNearestCentroid) {
  const GridConfig c = corner_config();
  const SvmConfig svm;
  const VarianceGrid g = svm_error_surface(c, svm);
  for (double v : g.values_mean) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  // The oracle sees the same draws with a split of its own.
  auto oracle = [&](std::size_t i, std::size_t j) {
    double total = 0.0;
    for (std::size_t r = 0; r < c.n_repeats; ++r) {
      const EmbeddingBatch b =
          sample_mixture(g.intra_values[i], g.inter_values[j], c, {i, j, r, 0});
      const SplitBatches s = split_stratified(b, 0.5, 1234, r);
      total += nearest_centroid_error(s.train, s.test);
    }
    return total / static_cast<double>(c.n_repeats);
  };
  // Tight, well separated classes.
  EXPECT_LT(g.mean_at(0, 1), 0.05);
  EXPECT_LT(oracle(0, 1), 0.05);
  // Overlap-dominated: close to the 0.75 chance level of four classes.
  EXPECT_NEAR(g.mean_at(1, 0), 0.75, 0.1);
  EXPECT_NEAR(oracle(1, 0), 0.75, 0.1);
  EXPECT_NEAR(g.mean_at(1, 0), oracle(1, 0), 0.1);
}

TEST(SvmErrorSurface, ParallelMatchesSerialBitwise) {
  GridConfig c = corner_config();
  c.n_repeats = 4;
  const VarianceGrid a = svm_error_surface(c, {}, Threads::serial());
  const VarianceGrid b = svm_error_surface(c, {}, Threads{3});
  EXPECT_EQ(a.values_mean, b.values_mean);
  EXPECT_EQ(a.values_std, b.values_std);
}

TEST(Spearman, MatchesNaiveRanking) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> small(0, 5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(30);
    std::vector<double> b(30);
    // Small integer values force many ties.
    for (auto& v : a) v = small(rng);
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = a[i] + small(rng);
    EXPECT_NEAR(spearman_correlation(a, b), naive_spearman(a, b), 1e-12);
  }
}

TEST(Spearman, MonotoneTransformsAndReversal) {
  std::mt19937_64 rng(3);
  const std::vector<double> a = testing::random_values(rng, 40);
  std::vector<double> b(a.size());
  std::vector<double> c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    b[i] = std::exp(a[i]);
    c[i] = -a[i] * a[i] * a[i];
  }
  EXPECT_NEAR(spearman_correlation(a, b), 1.0, 1e-15);
  EXPECT_NEAR(spearman_correlation(a, c), -1.0, 1e-15);
  EXPECT_THROW(spearman_correlation(a, std::vector<double>(40, 1.0)), Error);
  EXPECT_THROW(spearman_correlation(a, std::span<const double>(b).subspan(0, 3)), Error);
}

}  // namespace
}  // namespace icclab
