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

#include "icclab/icc.hpp"

#include <cmath>
#include <string>

#include "icclab/error.hpp"
#include "icclab/kernels.hpp"

namespace icclab {
namespace {

void require_shape(const EmbeddingBatch& batch) {
  if (batch.n_classes() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "ICC needs at least 2 classes");
  }
  for (std::size_t j = 0; j < batch.n_classes(); ++j) {
    if (batch.class_size(j) < 2) {
      throw Error(ErrorCode::kDegenerateClass,
                  "class " + std::to_string(j) + " has " +
                      std::to_string(batch.class_size(j)) +
                      " samples; at least 2 are required");
    }
  }
}

void require_balanced(const EmbeddingBatch& batch) {
  require_shape(batch);
  if (!batch.is_balanced()) {
    throw Error(ErrorCode::kImbalancedBatch,
                "class sizes differ; use the imbalanced formulation");
  }
}

// Per-class means and centred sums of squares, two-pass.
struct ClassMoments {
  std::vector<double> means;  // [N x L]
  std::vector<double> ss;     // [N x L]
};

ClassMoments class_moments(const EmbeddingBatch& batch) {
  const auto& k = simd::kernels();
  const std::size_t n = batch.n_classes();
  const std::size_t dim = batch.dim();
  ClassMoments out{std::vector<double>(n * dim), std::vector<double>(n * dim)};
  for (std::size_t j = 0; j < n; ++j) {
    const double* block = batch.class_block(j).data();
    const std::size_t rows = batch.class_size(j);
    double* mean = out.means.data() + j * dim;
    k.col_sum(block, rows, dim, mean);
    const double inv = 1.0 / static_cast<double>(rows);
    for (std::size_t l = 0; l < dim; ++l) mean[l] *= inv;
    k.col_centered_sq(block, rows, dim, mean, out.ss.data() + j * dim);
  }
  return out;
}

double guarded_ratio(double num, double den, std::size_t l, IccOptions options) {
  if (options.guard == DenominatorGuard::kRelaxed) {
    return num / (den + options.epsilon);
  }
  if (!(den >= options.epsilon)) {
    throw Error(ErrorCode::kDegenerateDimension,
                "dimension " + std::to_string(l) + " has denominator " +
                    std::to_string(den) + " below epsilon");
  }
  return num / den;
}

IccReport finish(std::vector<double> per_dim) {
  IccReport r;
  double sum = 0.0;
  for (const double v : per_dim) sum += v;
  r.mean_icc = sum / static_cast<double>(per_dim.size());
  r.regularizer_value = 1.0 - r.mean_icc;
  r.per_dimension = std::move(per_dim);
  return r;
}

}  // namespace

std::vector<VarianceDecomposition> variance_decomposition_all(
    const EmbeddingBatch& batch) {
  require_balanced(batch);
  const std::size_t n = batch.n_classes();
  const std::size_t m = batch.class_size(0);
  const std::size_t dim = batch.dim();
  const ClassMoments mom = class_moments(batch);

  std::vector<VarianceDecomposition> out(dim);
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  for (std::size_t l = 0; l < dim; ++l) {
    double grand = 0.0;
    for (std::size_t j = 0; j < n; ++j) grand += mom.means[j * dim + l];
    grand /= nd;
    double between = 0.0;
    double within = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = mom.means[j * dim + l] - grand;
      between += d * d;
      within += mom.ss[j * dim + l];
    }
    out[l].ms_b = md * between / (nd - 1.0);
    out[l].ms_w = within / (nd * (md - 1.0));
    out[l].m = m;
  }
  return out;
}

VarianceDecomposition variance_decomposition(const EmbeddingBatch& batch,
                                             std::size_t dim) {
  if (dim >= batch.dim()) {
    throw Error(ErrorCode::kInvalidArgument,
                "dimension " + std::to_string(dim) + " out of range");
  }
  return variance_decomposition_all(batch)[dim];
}

double icc_from_mean_squares(double ms_b, double ms_w, std::size_t m) {
  return (ms_b - ms_w) / (ms_b + (static_cast<double>(m) - 1.0) * ms_w);
}

IccReport icc_balanced(const EmbeddingBatch& batch, IccOptions options) {
  const auto parts = variance_decomposition_all(batch);
  std::vector<double> per_dim(parts.size());
  for (std::size_t l = 0; l < parts.size(); ++l) {
    const auto& p = parts[l];
    per_dim[l] = guarded_ratio(p.ms_b - p.ms_w,
                               p.ms_b + (static_cast<double>(p.m) - 1.0) * p.ms_w,
                               l, options);
  }
  return finish(std::move(per_dim));
}

IccReport icc_imbalanced(const EmbeddingBatch& batch, IccOptions options) {
  require_shape(batch);
  const std::size_t n = batch.n_classes();
  const std::size_t dim = batch.dim();
  const ClassMoments mom = class_moments(batch);
  const double nd = static_cast<double>(n);

  std::vector<double> per_dim(dim);
  for (std::size_t l = 0; l < dim; ++l) {
    // Overall mean is the mean of class means.
    double grand = 0.0;
    for (std::size_t j = 0; j < n; ++j) grand += mom.means[j * dim + l];
    grand /= nd;
    double between = 0.0;
    double within_unbiased = 0.0;
    double within_total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double kj = static_cast<double>(batch.class_size(j));
      const double d = mom.means[j * dim + l] - grand;
      between += kj * d * d;
      within_unbiased += mom.ss[j * dim + l] / (kj - 1.0);
      within_total += mom.ss[j * dim + l];
    }
    const double ms_b = between / (nd - 1.0);
    per_dim[l] = guarded_ratio(ms_b - within_unbiased / nd,
                               ms_b + within_total / nd, l, options);
  }
  return finish(std::move(per_dim));
}

IccReport compute_icc(const EmbeddingBatch& batch, IccMode mode,
                      IccOptions options) {
  switch (mode) {
    case IccMode::kBalanced:
      return icc_balanced(batch, options);
    case IccMode::kImbalanced:
      return icc_imbalanced(batch, options);
    case IccMode::kAuto:
      break;
  }
  return batch.is_balanced() ? icc_balanced(batch, options)
                             : icc_imbalanced(batch, options);
}

double icc_regularizer(const EmbeddingBatch& batch, IccOptions options) {
  return compute_icc(batch, IccMode::kAuto, options).regularizer_value;
}

IccGradient icc_gradient(double ms_b, double ms_w, std::size_t m) {
  if (ms_b < 0.0 || ms_w < 0.0 || m < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "mean squares must be nonnegative and m >= 2");
  }
  const double md = static_cast<double>(m);
  const double den = ms_b + (md - 1.0) * ms_w;
  if (den == 0.0) {
    throw Error(ErrorCode::kZeroDenominator, "MS_B + (m - 1) MS_W is zero");
  }
  const double den2 = den * den;
  return {-md * ms_w / den2, md * ms_b / den2};
}

}  // namespace icclab
