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

// One-vs-rest linear SVM trained by stochastic subgradient descent, and the
// held-out error-rate surface over the simulation grid.

#ifndef ICCLAB_SVM_HPP_
#define ICCLAB_SVM_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "icclab/batch.hpp"
#include "icclab/landscape.hpp"
#include "icclab/parallel.hpp"

namespace icclab {

struct SvmConfig {
  double reg_strength = 1e-3;
  std::size_t epochs = 50;
  // Step t uses learning_rate / (1 + learning_rate * reg_strength * t).
  double learning_rate = 0.01;
  double train_fraction = 0.5;
  std::uint64_t seed = 1;

  bool operator==(const SvmConfig&) const = default;
};

// Throws kConfigError naming the offending field as a JSON pointer.
void validate(const SvmConfig& config);

struct SvmModel {
  std::size_t n_classes = 0;
  std::size_t dim = 0;
  std::vector<double> weights;  // [n_classes x dim]
  std::vector<double> bias;     // [n_classes]
  // Training objective of the returned weights after each epoch, starting
  // with the all-zero model (entry 0). Non-increasing.
  std::vector<double> objective_trace;

  std::vector<double> scores(std::span<const double> x) const;
  // argmax of the class scores; ties go to the lowest class index.
  std::size_t predict(std::span<const double> x) const;
  // Fraction of rows whose predicted class differs from their class.
  double error_rate(const EmbeddingBatch& batch) const;
};

// Sum over classes of the one-vs-rest objectives
//   reg/2 |w_k|^2 + mean_i max(0, 1 - y_ik (w_k . x_i + b_k)).
double svm_objective(const SvmModel& model, const EmbeddingBatch& train,
                     double reg_strength);

// Shuffles come from the (config.seed, stream) random stream. The model
// with the lowest objective seen at an epoch boundary is returned.
SvmModel train_linear_svm(const EmbeddingBatch& train, const SvmConfig& config,
                          std::uint64_t stream = 0);

struct SplitBatches {
  EmbeddingBatch train;
  EmbeddingBatch test;
};

// Per class, a random floor(k * train_fraction) rows go to training and the
// rest to testing. Throws kDegenerateSplit when a class ends up with no
// training rows or no test rows.
SplitBatches split_stratified(const EmbeddingBatch& batch, double train_fraction,
                              std::uint64_t key, std::uint64_t stream);

// Mean and std over repeats of the held-out error rate. Cell draws are the
// same batches that evaluate_surface() uses for the same GridConfig.
VarianceGrid svm_error_surface(const GridConfig& config, const SvmConfig& svm,
                               Threads threads = Threads::serial());

// Spearman rank correlation with average ranks for ties.
double spearman_correlation(std::span<const double> a, std::span<const double> b);

}  // namespace icclab

#endif  // ICCLAB_SVM_HPP_
