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

#include "icclab/landscape.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "anova_oracle.hpp"
#include "icclab/error.hpp"
#include "icclab/icc.hpp"

namespace icclab {
namespace {

GridConfig small_config() {
  GridConfig c;
  c.intra = {0.1, 1.0, 0.3};
  c.inter = {0.05, 0.5, 0.15};
  c.dims = 4;
  c.n_classes = 4;
  c.n_samples_total = 40;
  c.n_repeats = 12;
  c.seed = 7;
  return c;
}

LossSpec spec_of(LossKind kind) {
  LossSpec s;
  s.kind = kind;
  return s;
}

// A grid whose mean surface is f(intra, inter), for the tracer tests.
VarianceGrid analytic_grid(const GridConfig& config,
                           const std::function<double(double, double)>& f) {
  VarianceGrid g = make_grid(config, spec_of(LossKind::kIccReg));
  for (std::size_t i = 0; i < g.n_intra(); ++i) {
    for (std::size_t j = 0; j < g.n_inter(); ++j) {
      g.values_mean[i * g.n_inter() + j] = f(g.intra_values[i], g.inter_values[j]);
    }
  }
  return g;
}

TEST(Axis, DefaultAxesHaveTheDocumentedLengths) {
  const GridConfig c;
  EXPECT_EQ(c.intra.size(), 100u);
  EXPECT_EQ(c.inter.size(), 60u);
  EXPECT_DOUBLE_EQ(c.intra.values().back(), 2.0);
  EXPECT_DOUBLE_EQ(c.inter.values().back(), 0.60);
  const VarianceGrid g = make_grid(c, {});
  EXPECT_EQ(g.n_intra(), 100u);
  EXPECT_EQ(g.n_inter(), 60u);
  EXPECT_EQ(g.values_mean.size(), 6000u);
}

TEST(GridConfigValidation, RejectsBadFields) {
  GridConfig c = small_config();
  c.n_samples_total = 41;
  EXPECT_THROW(validate(c), Error);
  c = small_config();
  c.intra.step = 0.0;
  try {
    validate(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfigError);
    EXPECT_NE(std::string(e.what()).find("/intra_axis/step"), std::string::npos);
  }
  c = small_config();
  c.n_repeats = 0;
  EXPECT_THROW(validate(c), Error);
}

TEST(SampleMixture, DefaultShape) {
  const GridConfig c;
  const EmbeddingBatch b = sample_mixture(0.5, 0.2, c, {});
  EXPECT_EQ(b.n_classes(), 4u);
  EXPECT_EQ(b.class_size(0), 100u);
  EXPECT_EQ(b.dim(), 8u);
  EXPECT_TRUE(b.is_balanced());
}

TEST(SampleMixture, VanishingNoiseGivesTightClasses) {
  const GridConfig c;
  const EmbeddingBatch b = sample_mixture(1e-8, 0.3, c, {3, 4, 5, 0});
  for (const auto& d : variance_decomposition_all(b)) {
    // MS_W scales the pooled population variance by M / (M - 1).
    EXPECT_LT(d.ms_w, 1e-6);
  }
}

TEST(SampleMixture, DeterministicAndKeyedByCell) {
  const GridConfig c = small_config();
  const EmbeddingBatch a = sample_mixture(0.3, 0.2, c, {1, 2, 3, 0});
  EXPECT_EQ(a, sample_mixture(0.3, 0.2, c, {1, 2, 3, 0}));
  EXPECT_NE(a, sample_mixture(0.3, 0.2, c, {1, 2, 4, 0}));
  EXPECT_NE(a, sample_mixture(0.3, 0.2, c, {2, 1, 3, 0}));
  EXPECT_NE(a, sample_mixture(0.3, 0.2, c, {1, 2, 3, 1}));
  GridConfig other = c;
  other.seed = 8;
  EXPECT_NE(a, sample_mixture(0.3, 0.2, other, {1, 2, 3, 0}));
}

TEST(SampleMixture, MomentsMatchTheGenerativeVariances) {
  GridConfig c = small_config();
  c.n_samples_total = 400;
  const double intra = 0.7;
  const double inter = 0.25;
  double ms_w = 0.0;
  double centroid_sq = 0.0;
  std::size_t n_centroids = 0;
  const std::size_t draws = 400;
  for (std::size_t r = 0; r < draws; ++r) {
    const EmbeddingBatch b = sample_mixture(intra, inter, c, {0, 0, r, 0});
    for (const auto& d : variance_decomposition_all(b)) ms_w += d.ms_w;
    for (std::size_t j = 0; j < b.n_classes(); ++j) {
      const auto block = b.class_block(j);
      for (std::size_t l = 0; l < b.dim(); ++l) {
        double s = 0.0;
        for (std::size_t i = 0; i < b.class_size(j); ++i) s += block[i * b.dim() + l];
        const double mean = s / static_cast<double>(b.class_size(j));
        centroid_sq += mean * mean;
        ++n_centroids;
      }
    }
  }
  ms_w /= static_cast<double>(draws * c.dims);
  // E[class mean^2] = inter + intra / M.
  const double expected_sq = inter + intra / 100.0;
  EXPECT_NEAR(ms_w, intra, 0.01);
  EXPECT_NEAR(centroid_sq / static_cast<double>(n_centroids), expected_sq, 0.02);
}

TEST(SampleMixture, RejectsNonPositiveVariances) {
  EXPECT_THROW(sample_mixture(0.0, 0.1, small_config(), {}), Error);
  EXPECT_THROW(sample_mixture(0.1, -1.0, small_config(), {}), Error);
}

TEST(EvaluateSurface, ShapeAndFiniteness) {
  const GridConfig c = small_config();
  const VarianceGrid g = evaluate_surface(c, spec_of(LossKind::kGe2e));
  EXPECT_EQ(g.n_intra(), 4u);
  EXPECT_EQ(g.n_inter(), 4u);
  for (double v : g.values_mean) EXPECT_TRUE(std::isfinite(v));
  for (double v : g.values_std) EXPECT_GE(v, 0.0);
  EXPECT_EQ(g.n_repeats, c.n_repeats);
}

TEST(EvaluateSurface, RegularizerIsLowForTightSeparatedClasses) {
  GridConfig c = small_config();
  c.intra = {0.02, 2.0, 1.98};
  c.inter = {0.01, 0.60, 0.59};
  const VarianceGrid g = evaluate_surface(c, spec_of(LossKind::kIccReg));
  EXPECT_LT(g.mean_at(0, 1), g.mean_at(1, 0));
}

TEST(EvaluateSurface, CellMeansMatchOwnDraws) {
  const GridConfig c = small_config();
  const LossSpec spec = spec_of(LossKind::kIccReg);
  const VarianceGrid g = evaluate_surface(c, spec);
  const std::size_t i = 2;
  const std::size_t j = 1;
  std::vector<double> draws;
  for (std::size_t r = 0; r < c.n_repeats; ++r) {
    draws.push_back(icc_regularizer(
        sample_mixture(g.intra_values[i], g.inter_values[j], c, {i, j, r, 0})));
  }
  double mean = 0.0;
  for (double d : draws) mean += d;
  mean /= static_cast<double>(draws.size());
  double ss = 0.0;
  for (double d : draws) ss += (d - mean) * (d - mean);
  EXPECT_NEAR(g.mean_at(i, j), mean, 1e-14);
  EXPECT_NEAR(g.std_at(i, j), std::sqrt(ss / static_cast<double>(draws.size() - 1)), 1e-14);
}

TEST(EvaluateSurface, RegularizerMeansMatchExactExpectation) {
  GridConfig c = small_config();
  c.dims = 8;
  c.n_samples_total = 400;
  c.n_repeats = 200;
  c.intra = {0.1, 1.9, 0.6};
  c.inter = {0.01, 0.51, 0.25};
  const VarianceGrid g = evaluate_surface(c, spec_of(LossKind::kIccReg));
  for (std::size_t i = 0; i < g.n_intra(); ++i) {
    for (std::size_t j = 0; j < g.n_inter(); ++j) {
      const double want = testing::exact_expected_regularizer(
          g.intra_values[i], g.inter_values[j], c.n_classes, c.samples_per_class());
      EXPECT_LE(std::abs(g.mean_at(i, j) - want), 4.0 * g.stderr_at(i, j))
          << "intra=" << g.intra_values[i] << " inter=" << g.inter_values[j];
    }
  }
}

TEST(EvaluateSurface, RegularizerIsMonotoneOnAxes) {
  GridConfig c = small_config();
  c.n_repeats = 40;
  const VarianceGrid g = evaluate_surface(c, spec_of(LossKind::kIccReg));
  for (std::size_t i = 0; i < g.n_intra(); ++i) {
    for (std::size_t j = 0; j < g.n_inter(); ++j) {
      if (i + 1 < g.n_intra()) {
        const double se = std::hypot(g.stderr_at(i, j), g.stderr_at(i + 1, j));
        EXPECT_GE(g.mean_at(i + 1, j), g.mean_at(i, j) - 3.0 * se);
      }
      if (j + 1 < g.n_inter()) {
        const double se = std::hypot(g.stderr_at(i, j), g.stderr_at(i, j + 1));
        EXPECT_LE(g.mean_at(i, j + 1), g.mean_at(i, j) + 3.0 * se);
      }
    }
  }
}

TEST(EvaluateSurface, ParallelMatchesSerialBitwise) {
  const GridConfig c = small_config();
  for (LossKind kind : {LossKind::kGe2e, LossKind::kIccReg}) {
    const VarianceGrid a = evaluate_surface(c, spec_of(kind), Threads::serial());
    const VarianceGrid b = evaluate_surface(c, spec_of(kind), Threads{4});
    EXPECT_EQ(a.values_mean, b.values_mean);
    EXPECT_EQ(a.values_std, b.values_std);
  }
}

TEST(ExpectedMeanSquareSurface, MatchesClosedForm) {
  const GridConfig c = small_config();
  const VarianceGrid g = expected_mean_square_surface(c);
  for (std::size_t i = 0; i < g.n_intra(); ++i) {
    for (std::size_t j = 0; j < g.n_inter(); ++j) {
      const double w = g.intra_values[i];
      const double m = 10.0;
      const double b = m * g.inter_values[j] + w;
      // 1 - ICC = m W / (B + (m - 1) W).
      EXPECT_NEAR(g.mean_at(i, j), m * w / (b + (m - 1.0) * w), 1e-14);
      EXPECT_NEAR(g.mean_at(i, j),
                  testing::plugin_expected_regularizer(w, g.inter_values[j], 10), 1e-14);
    }
  }
}

TEST(LambdaSweep, EndpointsReproduceBaseGridsExactly) {
  const GridConfig c = small_config();
  const auto sweep = lambda_sweep(c, {0.0, 0.5, 1.0});
  const VarianceGrid ge2e = evaluate_surface(c, spec_of(LossKind::kGe2e));
  const VarianceGrid reg = evaluate_surface(c, spec_of(LossKind::kIccReg));
  ASSERT_EQ(sweep.size(), 3u);
  EXPECT_EQ(sweep[0].values_mean, ge2e.values_mean);
  EXPECT_EQ(sweep[0].values_std, ge2e.values_std);
  EXPECT_EQ(sweep[2].values_mean, reg.values_mean);
  EXPECT_EQ(sweep[2].values_std, reg.values_std);
  for (std::size_t k = 0; k < ge2e.values_mean.size(); ++k) {
    const double want = 0.5 * ge2e.values_mean[k] + 0.5 * reg.values_mean[k];
    EXPECT_LE(std::abs(sweep[1].values_mean[k] - want), 1e-12 * std::abs(want));
  }
}

TEST(LambdaSweep, EveryLambdaIsLinearInTheBaseGrids) {
  const GridConfig c = small_config();
  std::vector<double> lambdas;
  for (int k = 1; k <= 9; ++k) lambdas.push_back(0.1 * k);
  const auto sweep = lambda_sweep(c, lambdas);
  const auto base = lambda_sweep(c, {0.0, 1.0});
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    EXPECT_DOUBLE_EQ(sweep[k].loss.lambda, lambdas[k]);
    EXPECT_DOUBLE_EQ(sweep[k].loss.alpha, 1.0 - lambdas[k]);
    for (std::size_t c_idx = 0; c_idx < base[0].values_mean.size(); ++c_idx) {
      const double want = (1.0 - lambdas[k]) * base[0].values_mean[c_idx] +
                          lambdas[k] * base[1].values_mean[c_idx];
      EXPECT_LE(std::abs(sweep[k].values_mean[c_idx] - want), 1e-12 * std::abs(want));
    }
  }
}

TEST(LambdaSweep, IndependentBatchesDrawFreshSamples) {
  const GridConfig c = small_config();
  const auto shared = lambda_sweep(c, {0.0}, {}, true);
  const auto fresh = lambda_sweep(c, {0.0}, {}, false);
  EXPECT_NE(shared[0].values_mean, fresh[0].values_mean);
  for (double v : fresh[0].values_mean) EXPECT_TRUE(std::isfinite(v));
}

TEST(LambdaSweep, RejectsLambdaOutsideUnitInterval) {
  EXPECT_THROW(lambda_sweep(small_config(), {1.5}), Error);
  EXPECT_THROW(lambda_sweep(small_config(), {-0.1}), Error);
}

TEST(Interpolate, ExactOnBilinearFunctions) {
  GridConfig c = small_config();
  c.intra = {0.1, 2.0, 0.1};
  c.inter = {0.01, 0.6, 0.01};
  const auto f = [](double x, double y) { return 1.0 + 2.0 * x - 3.0 * y + 0.5 * x * y; };
  const VarianceGrid g = analytic_grid(c, f);
  for (double x : {0.1, 0.33, 1.234, 2.0}) {
    for (double y : {0.01, 0.077, 0.5, 0.6}) {
      EXPECT_NEAR(interpolate(g, x, y), f(x, y), 1e-12);
    }
  }
}

TEST(TraceDescent, RejectsStartsOutsideTheGrid) {
  const VarianceGrid g = expected_mean_square_surface(small_config());
  try {
    trace_descent(g, 5.0, 0.1, 0.01);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kStartOutOfBounds);
  }
  EXPECT_THROW(trace_descent(g, 0.5, 0.0, 0.01), Error);
  EXPECT_THROW(trace_descent(g, 0.5, 0.2, 0.0), Error);
}

TEST(TraceDescent, FollowsAPlaneToTheBoundary) {
  GridConfig c = small_config();
  c.intra = {0.1, 2.0, 0.1};
  c.inter = {0.01, 0.6, 0.01};
  const VarianceGrid g = analytic_grid(c, [](double x, double y) { return 3.0 * x - 4.0 * y; });
  const DescentPath p = trace_descent(g, 1.0, 0.3, 0.005);
  EXPECT_EQ(p.termination, Termination::kHitBoundary);
  ASSERT_GT(p.points.size(), 2u);
  for (std::size_t k = 1; k < p.points.size(); ++k) {
    const double dx = p.points[k].intra - p.points[k - 1].intra;
    const double dy = p.points[k].inter - p.points[k - 1].inter;
    EXPECT_NEAR(std::hypot(dx, dy), 0.005, 1e-12);
    EXPECT_NEAR(dx / 0.005, -0.6, 1e-9);
    EXPECT_NEAR(dy / 0.005, 0.8, 1e-9);
  }
}

TEST(TraceDescent, FlatSurfaceConvergesAtOnce) {
  const VarianceGrid g = analytic_grid(small_config(), [](double, double) { return 2.5; });
  const DescentPath p = trace_descent(g, 0.5, 0.2, 0.01);
  EXPECT_EQ(p.termination, Termination::kConverged);
  EXPECT_EQ(p.points.size(), 1u);
}

TEST(TraceDescent, StopsAtMaxSteps) {
  const VarianceGrid g =
      analytic_grid(small_config(), [](double x, double y) { return x - y; });
  const DescentPath p = trace_descent(g, 0.7, 0.2, 1e-4, 5);
  EXPECT_EQ(p.termination, Termination::kMaxSteps);
  EXPECT_EQ(p.points.size(), 6u);
}

TEST(TraceDescent, ValuesNeverIncreaseOnNoisySurfaces) {
  const GridConfig c = small_config();
  const VarianceGrid g = evaluate_surface(c, spec_of(LossKind::kGe2e));
  double lo = g.values_mean[0];
  double hi = lo;
  for (double v : g.values_mean) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  for (const auto& s : std::vector<std::array<double, 2>>{{0.4, 0.2}, {0.9, 0.1}, {0.2, 0.45}}) {
    const DescentPath p = trace_descent(g, s[0], s[1], default_descent_step(g));
    for (std::size_t k = 1; k < p.points.size(); ++k) {
      EXPECT_LE(p.points[k].value, p.points[k - 1].value + 1e-9 * (hi - lo));
    }
  }
}

// On the plug-in surface the tracer should follow the analytic gradient
// d(1 - ICC)/d(intra) = dR/dB + dR/dW, d/d(inter) = M dR/dB.
TEST(TraceDescent, AgreesWithAnalyticGradientOnExpectedSurface) {
  const GridConfig config;
  const VarianceGrid g = expected_mean_square_surface(config);
  const double m = static_cast<double>(config.samples_per_class());
  for (const auto& s : default_descent_starts()) {
    const DescentPath p = trace_descent(g, s[0], s[1], default_descent_step(g));
    ASSERT_GT(p.points.size(), 1u);
    for (std::size_t k = 1; k < p.points.size(); ++k) {
      const PathPoint& a = p.points[k - 1];
      const double w = a.intra;
      const double b = m * a.inter + w;
      const IccGradient grad = icc_gradient(b, w, config.samples_per_class());
      // icc_gradient is for the regularizer 1 - ICC.
      const double gx = grad.d_ms_b + grad.d_ms_w;
      const double gy = m * grad.d_ms_b;
      const double dx = p.points[k].intra - a.intra;
      const double dy = p.points[k].inter - a.inter;
      const double cosine = -(gx * dx + gy * dy) / (std::hypot(gx, gy) * std::hypot(dx, dy));
      EXPECT_GT(cosine, 0.99) << "step " << k << " from (" << s[0] << ", " << s[1] << ")";
    }
  }
}

TEST(TraceDescent, DefaultStepIsHalfTheSmallerAxisStep) {
  const VarianceGrid g = make_grid(GridConfig{}, {});
  EXPECT_NEAR(default_descent_step(g), 0.005, 1e-15);
}

}  // namespace
}  // namespace icclab
