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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "icclab/error.hpp"
#include "icclab/rng.hpp"

namespace icclab {

namespace {

constexpr std::uint64_t kShuffleTag = 0x73766d73687566ULL;  // "svmshuf"
constexpr std::uint64_t kSplitTag = 0x73766d73706c74ULL;    // "svmsplt"
constexpr std::uint64_t kTrainTag = 0x73766d747261696eULL;  // "svmtrain"

[[noreturn]] void config_error(const std::string& pointer, const std::string& what) {
  throw Error(ErrorCode::kConfigError, pointer + ": " + what);
}

std::vector<std::size_t> row_labels(const EmbeddingBatch& batch) {
  std::vector<std::size_t> labels(batch.total_rows());
  for (std::size_t j = 0; j < batch.n_classes(); ++j) {
    std::fill_n(labels.begin() + static_cast<std::ptrdiff_t>(batch.class_begin(j)),
                batch.class_size(j), j);
  }
  return labels;
}

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t k = 0;
  while (k < order.size()) {
    std::size_t end = k + 1;
    while (end < order.size() && v[order[end]] == v[order[k]]) ++end;
    // Ranks are 1-based; a tie group shares the mean of its positions.
    const double rank = 0.5 * static_cast<double>(k + 1 + end);
    for (std::size_t q = k; q < end; ++q) ranks[order[q]] = rank;
    k = end;
  }
  return ranks;
}

}  // namespace

void validate(const SvmConfig& config) {
  if (!(config.reg_strength > 0.0) || !std::isfinite(config.reg_strength)) {
    config_error("/reg_strength", "must be a positive finite number");
  }
  if (config.epochs == 0) config_error("/epochs", "must be positive");
  if (!(config.learning_rate > 0.0) || !std::isfinite(config.learning_rate)) {
    config_error("/learning_rate", "must be a positive finite number");
  }
  if (!(config.train_fraction > 0.0 && config.train_fraction < 1.0)) {
    config_error("/train_fraction", "must lie strictly between 0 and 1");
  }
}

std::vector<double> SvmModel::scores(std::span<const double> x) const {
  std::vector<double> out(n_classes);
  for (std::size_t c = 0; c < n_classes; ++c) {
    double s = bias[c];
    for (std::size_t l = 0; l < dim; ++l) s += weights[c * dim + l] * x[l];
    out[c] = s;
  }
  return out;
}

std::size_t SvmModel::predict(std::span<const double> x) const {
  const std::vector<double> s = scores(x);
  std::size_t best = 0;
  for (std::size_t c = 1; c < s.size(); ++c) {
    if (s[c] > s[best]) best = c;
  }
  return best;
}

double SvmModel::error_rate(const EmbeddingBatch& batch) const {
  if (batch.total_rows() == 0) return 0.0;
  std::size_t wrong = 0;
  for (std::size_t j = 0; j < batch.n_classes(); ++j) {
    for (std::size_t r = 0; r < batch.class_size(j); ++r) {
      if (predict(batch.row(batch.class_begin(j) + r)) != j) ++wrong;
    }
  }
  return static_cast<double>(wrong) / static_cast<double>(batch.total_rows());
}

namespace {

// Inner loops, specialised on the common small dimensions so the compiler
// can unroll them; kDim == 0 reads the dimension at run time.
template <std::size_t kDim>
struct SvmCore {
  std::size_t d;
  std::size_t dim() const { return kDim ? kDim : d; }

  double dot(const double* a, const double* b) const {
    double s = 0.0;
    for (std::size_t l = 0; l < dim(); ++l) s += a[l] * b[l];
    return s;
  }

  double objective(const double* w, const double* bias, std::size_t n_classes,
                   const double* x, const std::size_t* labels, std::size_t n,
                   double reg) const {
    double hinge = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double* xi = x + i * dim();
      for (std::size_t c = 0; c < n_classes; ++c) {
        const double y = labels[i] == c ? 1.0 : -1.0;
        hinge += std::max(0.0, 1.0 - y * (dot(w + c * dim(), xi) + bias[c]));
      }
    }
    double norm = 0.0;
    for (std::size_t c = 0; c < n_classes; ++c) norm += dot(w + c * dim(), w + c * dim());
    return 0.5 * reg * norm + hinge / static_cast<double>(n);
  }

  void epoch(double* w, double* bias, std::size_t n_classes, const double* x,
             const std::size_t* labels, const std::vector<std::size_t>& order,
             const SvmConfig& config, double* t) const {
    for (std::size_t idx : order) {
      const double* xi = x + idx * dim();
      const double eta =
          config.learning_rate / (1.0 + config.learning_rate * config.reg_strength * *t);
      const double shrink = 1.0 - eta * config.reg_strength;
      for (std::size_t c = 0; c < n_classes; ++c) {
        double* wc = w + c * dim();
        const double y = labels[idx] == c ? 1.0 : -1.0;
        const double margin = y * (dot(wc, xi) + bias[c]);
        if (margin < 1.0) {
          const double step = eta * y;
          for (std::size_t l = 0; l < dim(); ++l) wc[l] = shrink * wc[l] + step * xi[l];
          bias[c] += step;
        } else {
          for (std::size_t l = 0; l < dim(); ++l) wc[l] *= shrink;
        }
      }
      *t += 1.0;
    }
  }
};

template <std::size_t kDim>
SvmModel train_with(const EmbeddingBatch& train, const SvmConfig& config,
                    std::uint64_t stream) {
  const SvmCore<kDim> core{train.dim()};
  const std::size_t n_classes = train.n_classes();
  const std::size_t n = train.total_rows();
  const double* x = train.values().data();
  const std::vector<std::size_t> labels = row_labels(train);

  SvmModel model;
  model.n_classes = n_classes;
  model.dim = train.dim();
  model.weights.assign(n_classes * model.dim, 0.0);
  model.bias.assign(n_classes, 0.0);
  SvmModel best = model;
  auto objective = [&] {
    return core.objective(model.weights.data(), model.bias.data(), n_classes, x,
                          labels.data(), n, config.reg_strength);
  };
  double best_objective = objective();
  best.objective_trace.push_back(best_objective);

  RandomStream rng(derive_key(config.seed, {kShuffleTag}), stream);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  double t = 0.0;
  for (std::size_t e = 0; e < config.epochs; ++e) {
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    core.epoch(model.weights.data(), model.bias.data(), n_classes, x, labels.data(), order,
               config, &t);
    const double value = objective();
    if (value < best_objective) {
      best_objective = value;
      best.weights = model.weights;
      best.bias = model.bias;
    }
    best.objective_trace.push_back(best_objective);
  }
  return best;
}

}  // namespace

double svm_objective(const SvmModel& model, const EmbeddingBatch& train,
                     double reg_strength) {
  if (train.dim() != model.dim || train.n_classes() != model.n_classes) {
    throw Error(ErrorCode::kInvalidArgument, "model and batch shapes differ");
  }
  const std::vector<std::size_t> labels = row_labels(train);
  return SvmCore<0>{model.dim}.objective(model.weights.data(), model.bias.data(),
                                         model.n_classes, train.values().data(),
                                         labels.data(), train.total_rows(), reg_strength);
}

SvmModel train_linear_svm(const EmbeddingBatch& train, const SvmConfig& config,
                          std::uint64_t stream) {
  validate(config);
  const std::size_t n_classes = train.n_classes();
  if (n_classes < 2) {
    throw Error(ErrorCode::kDegenerateSplit, "training split has fewer than two classes");
  }
  for (std::size_t j = 0; j < n_classes; ++j) {
    if (train.class_size(j) == 0) {
      throw Error(ErrorCode::kDegenerateSplit,
                  "class " + std::to_string(j) + " is absent from the training split");
    }
  }
  switch (train.dim()) {
    case 2: return train_with<2>(train, config, stream);
    case 8: return train_with<8>(train, config, stream);
    case 16: return train_with<16>(train, config, stream);
    default: return train_with<0>(train, config, stream);
  }
}

SplitBatches split_stratified(const EmbeddingBatch& batch, double train_fraction,
                              std::uint64_t key, std::uint64_t stream) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "train_fraction must lie in (0, 1)");
  }
  RandomStream rng(key, stream);
  const std::size_t d = batch.dim();
  std::vector<std::size_t> train_sizes;
  std::vector<std::size_t> test_sizes;
  std::vector<double> train_values;
  std::vector<double> test_values;
  for (std::size_t j = 0; j < batch.n_classes(); ++j) {
    const std::size_t kj = batch.class_size(j);
    const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(kj) * train_fraction));
    if (n_train == 0 || n_train == kj) {
      throw Error(ErrorCode::kDegenerateSplit,
                  "class " + std::to_string(j) + " with " + std::to_string(kj) +
                      " rows cannot be split at fraction " + std::to_string(train_fraction));
    }
    std::vector<std::size_t> perm(kj);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = kj; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    for (std::size_t q = 0; q < kj; ++q) {
      const auto row = batch.row(batch.class_begin(j) + perm[q]);
      auto& dst = q < n_train ? train_values : test_values;
      dst.insert(dst.end(), row.begin(), row.end());
    }
    train_sizes.push_back(n_train);
    test_sizes.push_back(kj - n_train);
  }
  return {EmbeddingBatch(std::move(train_sizes), d, std::move(train_values)),
          EmbeddingBatch(std::move(test_sizes), d, std::move(test_values))};
}

VarianceGrid svm_error_surface(const GridConfig& config, const SvmConfig& svm,
                               Threads threads) {
  validate(config);
  validate(svm);
  VarianceGrid grid = make_grid(config, {});
  const std::size_t n_inter = grid.n_inter();
  parallel_for(grid.n_intra() * n_inter, threads, [&](std::size_t cell) {
    const std::size_t i = cell / n_inter;
    const std::size_t j = cell % n_inter;
    try {
      SvmConfig cell_svm = svm;
      cell_svm.seed = derive_key(svm.seed, {kTrainTag, i, j});
      const std::uint64_t split_key = derive_key(svm.seed, {kSplitTag, i, j});
      std::vector<double> errors(config.n_repeats);
      for (std::size_t r = 0; r < config.n_repeats; ++r) {
        const EmbeddingBatch batch =
            sample_mixture(grid.intra_values[i], grid.inter_values[j], config, {i, j, r, 0});
        const SplitBatches split = split_stratified(batch, svm.train_fraction, split_key, r);
        errors[r] = train_linear_svm(split.train, cell_svm, r).error_rate(split.test);
      }
      summarize_draws(errors, &grid.values_mean[cell], &grid.values_std[cell]);
    } catch (const Error& e) {
      throw Error(e.code(), "cell (intra_index=" + std::to_string(i) +
                                ", inter_index=" + std::to_string(j) + "): " + e.detail());
    }
  });
  return grid;
}

double spearman_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "spearman needs two equal-length series of length >= 2");
  }
  const std::vector<double> ra = average_ranks(a);
  const std::vector<double> rb = average_ranks(b);
  const double mean = 0.5 * static_cast<double>(a.size() + 1);
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - mean) * (rb[i] - mean);
    saa += (ra[i] - mean) * (ra[i] - mean);
    sbb += (rb[i] - mean) * (rb[i] - mean);
  }
  if (saa == 0.0 || sbb == 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "spearman is undefined for a constant series");
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace icclab
