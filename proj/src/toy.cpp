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

#include "icclab/toy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "icclab/config_io.hpp"
#include "icclab/error.hpp"
#include "icclab/icc.hpp"
#include "icclab/rng.hpp"

namespace icclab {

namespace {

constexpr std::uint64_t kDataTag = 0x746f7964617461ULL;   // "toydata"
constexpr std::uint64_t kInitTag = 0x746f79696e6974ULL;   // "toyinit"
constexpr std::uint64_t kBatchTag = 0x746f796261746368ULL;  // "toybatch"
constexpr std::uint64_t kTrialTag = 0x746f79747269616cULL;  // "toytrial"
constexpr double kMinSimilarityScale = 1e-3;

[[noreturn]] void config_error(const std::string& pointer, const std::string& what) {
  throw Error(ErrorCode::kConfigError, pointer + ": " + what);
}

// The first k entries of a uniformly random permutation of [0, n).
std::vector<std::size_t> draw_without_replacement(RandomStream& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + rng.below(n - i)]);
  pool.resize(k);
  return pool;
}

ad::Matrix batch_matrix(const EmbeddingBatch& b) {
  return ad::Matrix(b.total_rows(), b.dim(), std::vector<double>(b.values().begin(), b.values().end()));
}

// Own-class indicator of an [n * m x n] similarity matrix.
ad::Matrix own_class_mask(std::size_t n, std::size_t m) {
  ad::Matrix mask(n * m, n);
  for (std::size_t r = 0; r < n * m; ++r) mask(r, r / m) = 1.0;
  return mask;
}

// Mean over rows of -S(i, target_i) + log sum_k S(i, k), targets given by
// the 0/1 matrix `target`.
ad::Var mean_cross_entropy(ad::Var s, const ad::Matrix& target) {
  ad::Tape& t = *s.tape;
  const ad::Var picked = ad::row_sum(ad::mul(s, t.constant(target)));
  return ad::mean_all(ad::sub(ad::logsumexp_rows(s), picked));
}

ad::Var ge2e_graph(ad::Var e, std::size_t n, std::size_t m, ad::Var w, ad::Var b) {
  ad::Tape& t = *e.tape;
  const std::vector<std::size_t> sizes(n, m);
  const ad::Matrix mask = own_class_mask(n, m);
  ad::Matrix others = mask;
  for (double& v : others.data) v = 1.0 - v;
  const ad::Var centroids = ad::group_mean(e, sizes);
  const ad::Var all = ad::matmul_nt(ad::normalize_rows(e), ad::normalize_rows(centroids));
  // Own centroid without the anchor: (m c_j - e_ji) / (m - 1).
  const ad::Var exclusive = ad::scale(
      ad::sub(ad::scale(ad::expand_groups(centroids, sizes), static_cast<double>(m)), e),
      1.0 / static_cast<double>(m - 1));
  const ad::Var own = ad::cosine_rows(e, exclusive);
  const ad::Var cosines = ad::add(ad::mul(all, t.constant(others)), ad::mul_col(t.constant(mask), own));
  return mean_cross_entropy(ad::shift_by(ad::scale_by(cosines, w), b), mask);
}

ad::Var angle_proto_graph(ad::Var e, std::size_t n, std::size_t m, ad::Var w, ad::Var b) {
  std::vector<std::size_t> queries;
  std::vector<std::size_t> rest;
  for (std::size_t j = 0; j < n; ++j) {
    queries.push_back(j * m);
    for (std::size_t i = 1; i < m; ++i) rest.push_back(j * m + i);
  }
  const std::vector<std::size_t> sizes(n, m - 1);
  const ad::Var q = ad::normalize_rows(ad::gather_rows(e, queries));
  const ad::Var p = ad::normalize_rows(ad::group_mean(ad::gather_rows(e, rest), sizes));
  ad::Matrix diag(n, n);
  for (std::size_t j = 0; j < n; ++j) diag(j, j) = 1.0;
  return mean_cross_entropy(ad::shift_by(ad::scale_by(ad::matmul_nt(q, p), w), b), diag);
}

ad::Var supcon_graph(ad::Var e, std::size_t n, std::size_t m, double temperature) {
  ad::Tape& t = *e.tape;
  const std::size_t rows = n * m;
  const ad::Var z = ad::normalize_rows(e);
  const ad::Var s = ad::scale(ad::matmul_nt(z, z), 1.0 / temperature);
  ad::Matrix not_self(rows, rows, 1.0);
  ad::Matrix positives(rows, rows);
  for (std::size_t i = 0; i < rows; ++i) {
    not_self(i, i) = 0.0;
    for (std::size_t p = 0; p < rows; ++p) {
      if (p != i && p / m == i / m) positives(i, p) = 1.0 / static_cast<double>(m - 1);
    }
  }
  const ad::Var mean_positive = ad::row_sum(ad::mul(s, t.constant(positives)));
  return ad::mean_all(ad::sub(ad::logsumexp_rows(s, not_self), mean_positive));
}

}  // namespace

// ---- data --------------------------------------------------------------

void validate(const ToyDataConfig& c) {
  if (c.input_dim == 0) config_error("/input_dim", "must be positive");
  if (c.n_train_classes < 2) config_error("/n_train_classes", "needs at least two classes");
  if (c.n_classes < c.n_train_classes + 2) {
    config_error("/n_classes", "must leave at least two held-out classes");
  }
  if (c.samples_per_class < 2) config_error("/samples_per_class", "must be at least 2");
  if (!(c.signal_scale > 0.0)) config_error("/signal_scale", "must be positive");
  if (!(c.nuisance_scale >= 0.0)) config_error("/nuisance_scale", "must be non-negative");
  if (!(c.noise_scale >= 0.0)) config_error("/noise_scale", "must be non-negative");
}

ToyDataset generate_toy_dataset(const ToyDataConfig& config) {
  validate(config);
  const std::size_t d = config.input_dim;
  const std::size_t q = config.nuisance_dim;
  const std::uint64_t key = derive_key(config.seed, {kDataTag});

  RandomStream direction_rng(key, 0);
  std::vector<double> directions(config.n_classes * d);
  for (std::size_t j = 0; j < config.n_classes; ++j) {
    double* u = directions.data() + j * d;
    double norm = 0.0;
    while (norm == 0.0) {
      direction_rng.fill_normal({u, d});
      for (std::size_t l = 0; l < d; ++l) norm += u[l] * u[l];
    }
    norm = std::sqrt(norm);
    for (std::size_t l = 0; l < d; ++l) u[l] /= norm;
  }
  std::vector<double> mixing(d * q);
  if (q > 0) RandomStream(key, 1).fill_normal(mixing, 1.0 / std::sqrt(static_cast<double>(q)));

  auto make_classes = [&](std::size_t first, std::size_t count) {
    const std::size_t m = config.samples_per_class;
    std::vector<double> values(count * m * d);
    std::vector<double> nuisance(q);
    std::vector<double> noise(d);
    for (std::size_t c = 0; c < count; ++c) {
      const std::size_t j = first + c;
      RandomStream rng(key, 2 + j);
      const double* u = directions.data() + j * d;
      for (std::size_t i = 0; i < m; ++i) {
        rng.fill_normal(nuisance, config.nuisance_scale);
        rng.fill_normal(noise, config.noise_scale);
        double* x = values.data() + (c * m + i) * d;
        for (std::size_t l = 0; l < d; ++l) {
          double s = config.signal_scale * u[l] + noise[l];
          for (std::size_t k = 0; k < q; ++k) s += mixing[l * q + k] * nuisance[k];
          x[l] = s;
        }
      }
    }
    return EmbeddingBatch(count, m, d, std::move(values));
  };

  ToyDataset data;
  data.config = config;
  data.train = make_classes(0, config.n_train_classes);
  data.heldout = make_classes(config.n_train_classes, config.n_classes - config.n_train_classes);
  return data;
}

// ---- encoder -----------------------------------------------------------

void validate(const EncoderConfig& c) {
  if (c.layer_widths.size() < 2) config_error("/layer_widths", "needs an input and an output width");
  for (std::size_t i = 0; i < c.layer_widths.size(); ++i) {
    if (c.layer_widths[i] == 0) config_error("/layer_widths/" + std::to_string(i), "must be positive");
  }
}

Encoder Encoder::init(const EncoderConfig& config, std::uint64_t seed) {
  validate(config);
  Encoder enc;
  enc.config = config;
  const std::uint64_t key = derive_key(seed, {kInitTag});
  for (std::size_t l = 0; l + 1 < config.layer_widths.size(); ++l) {
    const std::size_t fan_in = config.layer_widths[l];
    const std::size_t fan_out = config.layer_widths[l + 1];
    const double sd = config.activation == Activation::kRelu
                          ? std::sqrt(2.0 / static_cast<double>(fan_in))
                          : std::sqrt(2.0 / static_cast<double>(fan_in + fan_out));
    ad::Matrix w(fan_in, fan_out);
    RandomStream(key, l).fill_normal(w.data, sd);
    enc.weights.push_back(std::move(w));
    enc.biases.emplace_back(1, fan_out);
  }
  return enc;
}

EncoderParams bind_parameters(ad::Tape& tape, const Encoder& encoder) {
  EncoderParams p;
  for (std::size_t l = 0; l < encoder.weights.size(); ++l) {
    p.weights.push_back(tape.leaf(encoder.weights[l], true));
    p.biases.push_back(tape.leaf(encoder.biases[l], true));
  }
  return p;
}

ad::Var encoder_forward(const EncoderParams& params, Activation activation, ad::Var x) {
  ad::Var h = x;
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    h = ad::add_row(ad::matmul(h, params.weights[l]), params.biases[l]);
    if (l + 1 < params.weights.size()) h = activation == Activation::kRelu ? ad::relu(h) : ad::tanh(h);
  }
  return ad::normalize_rows(h);
}

ad::Matrix Encoder::embed(const ad::Matrix& x) const {
  ad::Tape tape;
  EncoderParams p;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    p.weights.push_back(tape.constant(weights[l]));
    p.biases.push_back(tape.constant(biases[l]));
  }
  return encoder_forward(p, config.activation, tape.constant(x)).value();
}

EmbeddingBatch embed_batch(const Encoder& encoder, const EmbeddingBatch& inputs) {
  const ad::Matrix e = encoder.embed(batch_matrix(inputs));
  return EmbeddingBatch(inputs.class_sizes(), e.cols, e.data);
}

// ---- losses ------------------------------------------------------------

ad::Var icc_regularizer_graph(ad::Var e, std::size_t n, std::size_t m, double epsilon) {
  if (n < 2 || m < 2 || e.rows() != n * m) {
    throw Error(ErrorCode::kInvalidArgument, "ICC graph needs an [n m x L] batch with n, m >= 2");
  }
  const std::vector<std::size_t> sizes(n, m);
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  const ad::Var means = ad::group_mean(e, sizes);
  const ad::Var within = ad::sub(e, ad::expand_groups(means, sizes));
  const ad::Var ms_w = ad::scale(ad::col_sum(ad::square(within)), 1.0 / (dn * (dm - 1.0)));
  const ad::Var grand = ad::scale(ad::col_sum(means), 1.0 / dn);
  const ad::Var between = ad::sub_row(means, grand);
  const ad::Var ms_b = ad::scale(ad::col_sum(ad::square(between)), dm / (dn - 1.0));
  const ad::Var num = ad::sub(ms_b, ms_w);
  const ad::Var den = ad::add_scalar(ad::add(ms_b, ad::scale(ms_w, dm - 1.0)), epsilon);
  return ad::add_scalar(ad::scale(ad::mean_all(ad::div(num, den)), -1.0), 1.0);
}

ad::Var contrastive_graph(LossKind kind, ad::Var e, std::size_t n, std::size_t m, ad::Var w,
                          ad::Var b, double temperature) {
  if (n < 2 || m < 2 || e.rows() != n * m) {
    throw Error(ErrorCode::kInvalidArgument, "contrastive graph needs an [n m x L] batch with n, m >= 2");
  }
  switch (kind) {
    case LossKind::kGe2e: return ge2e_graph(e, n, m, w, b);
    case LossKind::kAngleProto: return angle_proto_graph(e, n, m, w, b);
    case LossKind::kSupCon: return supcon_graph(e, n, m, temperature);
    default: break;
  }
  throw Error(ErrorCode::kInvalidArgument, "not a contrastive loss: " + std::string(loss_kind_name(kind)));
}

ad::Var loss_graph(const LossSpec& spec, ad::Var e, std::size_t n, std::size_t m, ad::Var w,
                   ad::Var b) {
  switch (spec.kind) {
    case LossKind::kIccReg:
      return icc_regularizer_graph(e, n, m);
    case LossKind::kCombined: {
      const ad::Var contr = ad::scale(contrastive_graph(spec.contrastive, e, n, m, w, b, spec.temperature), spec.alpha);
      // A zero weight leaves the contrastive objective untouched bit for bit.
      if (spec.lambda == 0.0) return contr;
      return ad::add(contr, ad::scale(icc_regularizer_graph(e, n, m), spec.lambda));
    }
    default:
      return contrastive_graph(spec.kind, e, n, m, w, b, spec.temperature);
  }
}

// ---- training ----------------------------------------------------------

void validate(const TrainConfig& c, const ToyDataConfig& data) {
  try {
    validate(c.loss);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfigError, "/loss" + e.detail());
  }
  if (c.loss.kind == LossKind::kIccReg) config_error("/loss/kind", "training needs a contrastive or combined loss");
  if (c.batch_classes < 2 || c.batch_classes > data.n_train_classes) {
    config_error("/batch_classes", "must lie in [2, n_train_classes]");
  }
  if (c.batch_samples_per_class < 2 || c.batch_samples_per_class > data.samples_per_class) {
    config_error("/batch_samples_per_class", "must lie in [2, samples_per_class]");
  }
  if (c.steps == 0) config_error("/steps", "must be positive");
  if (!(c.learning_rate > 0.0) || !std::isfinite(c.learning_rate)) {
    config_error("/learning_rate", "must be a positive finite number");
  }
  for (std::size_t k = 0; k < c.lambda_grid.size(); ++k) {
    if (!(c.lambda_grid[k] >= 0.0) || !std::isfinite(c.lambda_grid[k])) {
      config_error("/lambda_grid/" + std::to_string(k), "must be a non-negative number");
    }
  }
}

std::vector<Trial> sample_trials(const EmbeddingBatch& embeddings, std::size_t n_trials,
                                 std::uint64_t seed) {
  const std::size_t k = embeddings.n_classes();
  if (k < 2) throw Error(ErrorCode::kOneClassOnly, "trials need at least two classes");
  for (std::size_t j = 0; j < k; ++j) {
    if (embeddings.class_size(j) < 2) {
      throw Error(ErrorCode::kDegenerateClass, "trials need two samples in every class");
    }
  }
  RandomStream rng(derive_key(seed, {kTrialTag}), 0);
  const std::size_t d = embeddings.dim();
  auto cosine = [&](std::size_t r1, std::size_t r2) {
    const auto a = embeddings.row(r1);
    const auto b = embeddings.row(r2);
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t l = 0; l < d; ++l) {
      ab += a[l] * b[l];
      aa += a[l] * a[l];
      bb += b[l] * b[l];
    }
    return aa > 0.0 && bb > 0.0 ? ab / std::sqrt(aa * bb) : 0.0;
  };
  std::vector<Trial> trials;
  trials.reserve(n_trials);
  for (std::size_t t = 0; t < n_trials; ++t) {
    if (t % 2 == 0) {
      const std::size_t j = rng.below(k);
      const auto pick = draw_without_replacement(rng, embeddings.class_size(j), 2);
      trials.push_back({cosine(embeddings.class_begin(j) + pick[0], embeddings.class_begin(j) + pick[1]), true});
    } else {
      const auto classes = draw_without_replacement(rng, k, 2);
      const std::size_t r1 = embeddings.class_begin(classes[0]) + rng.below(embeddings.class_size(classes[0]));
      const std::size_t r2 = embeddings.class_begin(classes[1]) + rng.below(embeddings.class_size(classes[1]));
      trials.push_back({cosine(r1, r2), false});
    }
  }
  return trials;
}

HeldoutMetrics heldout_metrics(const EmbeddingBatch& embeddings, const EvalConfig& eval) {
  HeldoutMetrics m;
  m.icc = compute_icc(embeddings, IccMode::kAuto).mean_icc;
  const std::vector<Trial> trials = sample_trials(embeddings, eval.n_trials, eval.seed);
  m.eer = compute_eer(trials);
  m.min_dcf = compute_min_dcf(trials, eval.dcf);
  return m;
}

HeldoutMetrics evaluate_heldout(const Encoder& encoder, const EmbeddingBatch& inputs,
                                const EvalConfig& eval) {
  return heldout_metrics(embed_batch(encoder, inputs), eval);
}

namespace {

bool parameters_finite(const Encoder& enc) {
  auto finite = [](const ad::Matrix& m) {
    return std::all_of(m.data.begin(), m.data.end(), [](double v) { return std::isfinite(v); });
  };
  return std::all_of(enc.weights.begin(), enc.weights.end(), finite) &&
         std::all_of(enc.biases.begin(), enc.biases.end(), finite);
}

}  // namespace

TrainReport train_encoder(const ToyDataset& data, const EncoderConfig& encoder_config,
                          const TrainConfig& train, const EvalConfig& eval, Encoder* trained) {
  validate(data.config);
  validate(encoder_config);
  validate(train, data.config);
  if (encoder_config.layer_widths.front() != data.train.dim()) {
    throw Error(ErrorCode::kConfigError, "/layer_widths/0: must equal the input dimension");
  }
  const std::size_t n = train.batch_classes;
  const std::size_t m = train.batch_samples_per_class;
  const std::size_t in_dim = data.train.dim();

  Encoder enc = Encoder::init(encoder_config, train.seed);
  double w = train.loss.w;
  double b = train.loss.b;
  const std::uint64_t batch_key = derive_key(train.seed, {kBatchTag});

  TrainReport report;
  report.seed = train.seed;
  report.loss_kind = train.loss.kind == LossKind::kCombined ? train.loss.contrastive : train.loss.kind;
  report.lambda = train.loss.kind == LossKind::kCombined ? train.loss.lambda : 0.0;
  report.config_digest = config_digest({{"data", to_json(data.config)},
                                        {"encoder", to_json(encoder_config)},
                                        {"train", to_json(train)},
                                        {"eval", to_json(eval)}});
  report.loss_trace.reserve(train.steps);

  ad::Matrix x(n * m, in_dim);
  for (std::size_t step = 0; step < train.steps; ++step) {
    RandomStream rng(batch_key, step);
    const auto classes = draw_without_replacement(rng, data.train.n_classes(), n);
    for (std::size_t c = 0; c < n; ++c) {
      const std::size_t j = classes[c];
      const auto rows = draw_without_replacement(rng, data.train.class_size(j), m);
      for (std::size_t i = 0; i < m; ++i) {
        const auto src = data.train.row(data.train.class_begin(j) + rows[i]);
        std::copy(src.begin(), src.end(), &x.data[(c * m + i) * in_dim]);
      }
    }

    ad::Tape tape;
    const EncoderParams params = bind_parameters(tape, enc);
    const ad::Var wv = tape.leaf(ad::Matrix(1, 1, w), true);
    const ad::Var bv = tape.leaf(ad::Matrix(1, 1, b), true);
    const ad::Var e = encoder_forward(params, encoder_config.activation, tape.constant(x));
    const ad::Var loss = loss_graph(train.loss, e, n, m, wv, bv);
    const double value = loss.scalar();
    if (!std::isfinite(value)) {
      throw Error(ErrorCode::kDivergedLoss, "loss is " + std::to_string(value) + " at step " + std::to_string(step));
    }
    report.loss_trace.push_back(value);
    tape.backward(loss);

    const double lr = train.learning_rate;
    for (std::size_t l = 0; l < enc.weights.size(); ++l) {
      const ad::Matrix& gw = params.weights[l].grad();
      for (std::size_t i = 0; i < gw.size(); ++i) enc.weights[l].data[i] -= lr * gw.data[i];
      const ad::Matrix& gb = params.biases[l].grad();
      for (std::size_t i = 0; i < gb.size(); ++i) enc.biases[l].data[i] -= lr * gb.data[i];
    }
    w = std::max(kMinSimilarityScale, w - lr * wv.grad().data[0]);
    b -= lr * bv.grad().data[0];
    if (!parameters_finite(enc) || !std::isfinite(w) || !std::isfinite(b)) {
      throw Error(ErrorCode::kDivergedLoss, "parameters are not finite after step " + std::to_string(step));
    }
  }

  report.heldout = evaluate_heldout(enc, data.heldout, eval);
  if (trained) *trained = std::move(enc);
  return report;
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t h = values.size() / 2;
  return values.size() % 2 ? values[h] : 0.5 * (values[h - 1] + values[h]);
}

std::size_t select_lambda(const std::vector<LambdaOutcome>& outcomes, double max_eer_increase) {
  std::size_t base = outcomes.size();
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    if (outcomes[k].lambda == 0.0) base = k;
  }
  if (base == outcomes.size()) throw Error(ErrorCode::kInvalidArgument, "lambda grid must contain 0");
  std::size_t best = base;
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    if (outcomes[k].lambda == 0.0) continue;
    if (outcomes[k].median_eer > outcomes[base].median_eer + max_eer_increase) continue;
    if (best == base || outcomes[k].median_icc > outcomes[best].median_icc) best = k;
  }
  return best;
}

}  // namespace icclab
