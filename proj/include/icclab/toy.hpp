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

// Desk-scale training of a small MLP encoder on synthetic labelled data,
// with and without the ICC regularizer, and held-out verification metrics.

#ifndef ICCLAB_TOY_HPP_
#define ICCLAB_TOY_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "icclab/autodiff.hpp"
#include "icclab/batch.hpp"
#include "icclab/losses.hpp"
#include "icclab/metrics.hpp"

namespace icclab {

// Class j emits x = signal_scale u_j + B n + noise_scale e, with u_j a unit
// direction per class, B a fixed input_dim x nuisance_dim matrix shared by
// all classes, n ~ N(0, nuisance_scale^2 I) per sample and e ~ N(0, I).
struct ToyDataConfig {
  std::size_t input_dim = 32;
  std::size_t n_classes = 20;
  // The first n_train_classes classes train the encoder; the rest are held
  // out for evaluation.
  std::size_t n_train_classes = 14;
  std::size_t samples_per_class = 200;
  double signal_scale = 1.0;
  std::size_t nuisance_dim = 8;
  double nuisance_scale = 1.0;
  double noise_scale = 0.3;
  std::uint64_t seed = 1;

  bool operator==(const ToyDataConfig&) const = default;
};

void validate(const ToyDataConfig& config);

struct ToyDataset {
  ToyDataConfig config;
  EmbeddingBatch train;    // inputs, class-major
  EmbeddingBatch heldout;  // inputs of the unseen classes
};

ToyDataset generate_toy_dataset(const ToyDataConfig& config);

enum class Activation { kRelu, kTanh };

struct EncoderConfig {
  // Input width first, embedding width last.
  std::vector<std::size_t> layer_widths{32, 64, 64, 16};
  Activation activation = Activation::kRelu;

  std::size_t embedding_dim() const { return layer_widths.back(); }
  bool operator==(const EncoderConfig&) const = default;
};

void validate(const EncoderConfig& config);

// MLP whose output rows are l2-normalized.
struct Encoder {
  EncoderConfig config;
  std::vector<ad::Matrix> weights;  // [in x out] per layer
  std::vector<ad::Matrix> biases;   // [1 x out] per layer

  // He initialisation for ReLU, Glorot for tanh; zero biases.
  static Encoder init(const EncoderConfig& config, std::uint64_t seed);

  // Unit-norm embeddings of the rows of x, without recording gradients.
  ad::Matrix embed(const ad::Matrix& x) const;
};

struct EncoderParams {
  std::vector<ad::Var> weights;
  std::vector<ad::Var> biases;
};

// Registers the encoder's parameters as leaves of `tape`.
EncoderParams bind_parameters(ad::Tape& tape, const Encoder& encoder);
ad::Var encoder_forward(const EncoderParams& params, Activation activation, ad::Var x);

// Differentiable losses on an [n * m x L] class-major embedding matrix.
// `w` and `b` are 1x1 similarity parameters (unused by SupCon and R_ICC).
ad::Var icc_regularizer_graph(ad::Var e, std::size_t n, std::size_t m,
                              double epsilon = kDenominatorEpsilon);
ad::Var contrastive_graph(LossKind kind, ad::Var e, std::size_t n, std::size_t m, ad::Var w,
                          ad::Var b, double temperature);
ad::Var loss_graph(const LossSpec& spec, ad::Var e, std::size_t n, std::size_t m, ad::Var w,
                   ad::Var b);

struct TrainConfig {
  LossSpec loss;
  std::size_t batch_classes = 8;
  std::size_t batch_samples_per_class = 10;
  std::size_t steps = 2000;
  double learning_rate = 1e-2;
  std::uint64_t seed = 1;
  std::vector<double> lambda_grid{0.0, 0.05, 0.1, 0.25, 0.5};

  bool operator==(const TrainConfig&) const = default;
};

void validate(const TrainConfig& config, const ToyDataConfig& data);

struct HeldoutMetrics {
  double icc = 0.0;
  double eer = 0.0;
  double min_dcf = 0.0;
  bool operator==(const HeldoutMetrics&) const = default;
};

struct EvalConfig {
  std::size_t n_trials = 10000;
  std::uint64_t seed = 1;
  DcfParams dcf;
};

// Half the trials pair two samples of one class, half pair two classes.
std::vector<Trial> sample_trials(const EmbeddingBatch& embeddings, std::size_t n_trials,
                                 std::uint64_t seed);

// ICC(1,1) in strict mode plus EER and minDCF of cosine-scored trials.
HeldoutMetrics heldout_metrics(const EmbeddingBatch& embeddings, const EvalConfig& eval);
HeldoutMetrics evaluate_heldout(const Encoder& encoder, const EmbeddingBatch& inputs,
                                const EvalConfig& eval);

// Rows of `inputs` mapped through the encoder, keeping the class layout.
EmbeddingBatch embed_batch(const Encoder& encoder, const EmbeddingBatch& inputs);

struct TrainReport {
  std::uint64_t seed = 0;
  std::string config_digest;
  LossKind loss_kind = LossKind::kGe2e;
  double lambda = 0.0;
  std::vector<double> loss_trace;
  HeldoutMetrics heldout;
  bool operator==(const TrainReport&) const = default;
};

// Plain SGD on the configured loss. The ICC term uses the relaxed
// denominator. Throws kDivergedLoss naming the step when the loss stops
// being finite.
TrainReport train_encoder(const ToyDataset& data, const EncoderConfig& encoder,
                          const TrainConfig& train, const EvalConfig& eval = {},
                          Encoder* trained = nullptr);

// Median held-out metrics of one lambda over several seeds.
struct LambdaOutcome {
  double lambda = 0.0;
  double median_icc = 0.0;
  double median_eer = 0.0;
};

// Index of the lambda > 0 with the highest median ICC among those whose
// median EER is at most max_eer_increase above the lambda = 0 entry, or the
// lambda = 0 entry when none qualifies. outcomes must contain lambda = 0.
std::size_t select_lambda(const std::vector<LambdaOutcome>& outcomes,
                          double max_eer_increase = 0.01);

double median(std::vector<double> values);

}  // namespace icclab

#endif  // ICCLAB_TOY_HPP_
