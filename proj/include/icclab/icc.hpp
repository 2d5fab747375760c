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

// ICC(1,1) repeatability statistics for embedding batches.
//
// For dimension l of a batch with N classes:
//
//   MS_B = M * sum_j (mean_j - mean)^2 / (N - 1)
//   MS_W = sum_j sum_i (e_ji - mean_j)^2 / (N (M - 1))
//   ICC  = (MS_B - MS_W) / (MS_B + (M - 1) MS_W)
//
// The batch ICC is the unweighted mean over dimensions and the regularizer is
// R = 1 - ICC. Ragged batches use the per-class generalisation implemented in
// icc_imbalanced().

#ifndef ICCLAB_ICC_HPP_
#define ICCLAB_ICC_HPP_

#include <cstddef>
#include <vector>

#include "icclab/batch.hpp"

namespace icclab {

inline constexpr double kDenominatorEpsilon = 1e-8;

enum class DenominatorGuard {
  // A dimension whose denominator is below epsilon raises
  // kDegenerateDimension. Used for reported metrics.
  kStrict,
  // Epsilon is added to every denominator so the value is always finite.
  // Used inside training.
  kRelaxed,
};

struct IccOptions {
  DenominatorGuard guard = DenominatorGuard::kStrict;
  double epsilon = kDenominatorEpsilon;
};

inline constexpr IccOptions kRelaxedIcc{DenominatorGuard::kRelaxed, kDenominatorEpsilon};

struct VarianceDecomposition {
  double ms_b = 0.0;
  double ms_w = 0.0;
  std::size_t m = 0;
};

struct IccReport {
  std::vector<double> per_dimension;
  double mean_icc = 0.0;
  double regularizer_value = 0.0;
};

struct IccGradient {
  double d_ms_b = 0.0;
  double d_ms_w = 0.0;
};

enum class IccMode { kBalanced, kImbalanced, kAuto };

VarianceDecomposition variance_decomposition(const EmbeddingBatch& batch,
                                             std::size_t dim);

// All dimensions in one sweep over the batch.
std::vector<VarianceDecomposition> variance_decomposition_all(
    const EmbeddingBatch& batch);

IccReport icc_balanced(const EmbeddingBatch& batch, IccOptions options = {});
IccReport icc_imbalanced(const EmbeddingBatch& batch, IccOptions options = {});
IccReport compute_icc(const EmbeddingBatch& batch, IccMode mode,
                      IccOptions options = {});

// 1 - mean ICC, dispatching on whether the batch is balanced.
double icc_regularizer(const EmbeddingBatch& batch, IccOptions options = {});

// ICC of a single dimension from its mean squares (no guard).
double icc_from_mean_squares(double ms_b, double ms_w, std::size_t m);

// Partial derivatives of R = 1 - ICC with respect to MS_B and MS_W:
//   dR/dMS_B = -m MS_W / D^2,  dR/dMS_W = m MS_B / D^2,
//   D = MS_B + (m - 1) MS_W.
IccGradient icc_gradient(double ms_b, double ms_w, std::size_t m);

}  // namespace icclab

#endif  // ICCLAB_ICC_HPP_
