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

#include "icclab/losses.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "icclab/error.hpp"
#include "icclab/kernels.hpp"

namespace icclab {
namespace {

void require_balanced_pairs(const EmbeddingBatch& batch, const char* what) {
  if (batch.n_classes() < 2) {
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + " needs at least 2 classes");
  }
  if (!batch.is_balanced()) {
    throw Error(ErrorCode::kImbalancedBatch, std::string(what) + " needs a balanced batch");
  }
  if (batch.class_size(0) < 2) {
    throw Error(ErrorCode::kDegenerateClass, std::string(what) + " needs M >= 2");
  }
}

// -logits[target] + log(sum exp(logits)). When the target is the largest
// logit the log1p form keeps full relative precision for tiny losses.
double cross_entropy(const double* logits, std::size_t n, std::size_t target) {
  double mx = logits[0];
  for (std::size_t k = 1; k < n; ++k) mx = std::max(mx, logits[k]);
  const double lt = logits[target];
  if (lt == mx) {
    double rest = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k != target) rest += std::exp(logits[k] - lt);
    }
    return std::log1p(rest);
  }
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += std::exp(logits[k] - mx);
  return (mx - lt) + std::log(s);
}

void require_nonzero(double sq_norm, const char* what, std::size_t index) {
  if (!(sq_norm > 0.0)) {
    throw Error(ErrorCode::kZeroVector,
                std::string(what) + " " + std::to_string(index) + " has zero norm");
  }
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  out.erase(std::remove_if(out.begin(), out.end(),
                           [](char c) { return c == '_' || c == '-'; }),
            out.end());
  return out;
}

}  // namespace

std::string_view loss_kind_name(LossKind kind) {
  switch (kind) {
    case LossKind::kGe2e: return "ge2e";
    case LossKind::kAngleProto: return "angleproto";
    case LossKind::kSupCon: return "supcon";
    case LossKind::kIccReg: return "icc";
    case LossKind::kCombined: return "combined";
  }
  return "unknown";
}

LossKind parse_loss_kind(std::string_view name) {
  const std::string n = lower(name);
  if (n == "ge2e") return LossKind::kGe2e;
  if (n == "angleproto" || n == "ap") return LossKind::kAngleProto;
  if (n == "supcon") return LossKind::kSupCon;
  if (n == "icc" || n == "iccreg" || n == "ricc") return LossKind::kIccReg;
  if (n == "combined") return LossKind::kCombined;
  throw Error(ErrorCode::kConfigError, "unknown loss kind '" + std::string(name) + "'");
}

void validate(const LossSpec& spec) {
  if (!(spec.alpha >= 0.0)) throw Error(ErrorCode::kConfigError, "/alpha: must be >= 0");
  if (!(spec.lambda >= 0.0)) throw Error(ErrorCode::kConfigError, "/lambda: must be >= 0");
  if (!(spec.temperature > 0.0)) {
    throw Error(ErrorCode::kConfigError, "/temperature: must be > 0");
  }
  if (!std::isfinite(spec.w)) throw Error(ErrorCode::kConfigError, "/w: must be finite");
  if (!std::isfinite(spec.b)) throw Error(ErrorCode::kConfigError, "/b: must be finite");
  if (spec.kind == LossKind::kCombined &&
      (spec.contrastive == LossKind::kIccReg || spec.contrastive == LossKind::kCombined)) {
    throw Error(ErrorCode::kConfigError,
                "/contrastive: combined loss needs ge2e, angleproto or supcon");
  }
}

double ge2e_loss(const EmbeddingBatch& batch, const LossSpec& spec) {
  require_balanced_pairs(batch, "GE2E");
  const auto& k = simd::kernels();
  const std::size_t n = batch.n_classes();
  const std::size_t m = batch.class_size(0);
  const std::size_t dim = batch.dim();
  const std::size_t rows = n * m;
  const double* e = batch.values().data();

  std::vector<double> sq(rows);
  k.row_sq_norms(e, rows, dim, sq.data());
  for (std::size_t r = 0; r < rows; ++r) require_nonzero(sq[r], "embedding", r);

  std::vector<double> sums(n * dim);
  std::vector<double> centroids(n * dim);
  for (std::size_t j = 0; j < n; ++j) {
    k.col_sum(batch.class_block(j).data(), m, dim, sums.data() + j * dim);
    for (std::size_t l = 0; l < dim; ++l) {
      centroids[j * dim + l] = sums[j * dim + l] / static_cast<double>(m);
    }
  }
  std::vector<double> cnorm(n);
  k.row_sq_norms(centroids.data(), n, dim, cnorm.data());
  for (std::size_t j = 0; j < n; ++j) require_nonzero(cnorm[j], "centroid", j);

  std::vector<double> dots(rows * n);
  k.gemm_nt(e, centroids.data(), dots.data(), rows, dim, n, false);

  std::vector<double> excl(dim);
  std::vector<double> logits(n);
  const double inv_m1 = 1.0 / static_cast<double>(m - 1);
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t r = j * m + i;
      const double* er = e + r * dim;
      // Centroid of class j without this sample.
      for (std::size_t l = 0; l < dim; ++l) {
        excl[l] = (sums[j * dim + l] - er[l]) * inv_m1;
      }
      const double ex_sq = k.dot(excl.data(), excl.data(), dim);
      require_nonzero(ex_sq, "exclusive centroid of sample", r);
      const double norm_e = std::sqrt(sq[r]);
      for (std::size_t c = 0; c < n; ++c) {
        const double cosv =
            c == j ? k.dot(er, excl.data(), dim) / (norm_e * std::sqrt(ex_sq))
                   : dots[r * n + c] / (norm_e * std::sqrt(cnorm[c]));
        logits[c] = spec.w * cosv + spec.b;
      }
      total += cross_entropy(logits.data(), n, j);
    }
  }
  return total / static_cast<double>(rows);
}

double angle_proto_loss(const EmbeddingBatch& batch, const LossSpec& spec) {
  require_balanced_pairs(batch, "AngleProto");
  const auto& k = simd::kernels();
  const std::size_t n = batch.n_classes();
  const std::size_t m = batch.class_size(0);
  const std::size_t dim = batch.dim();

  // Query: first sample of each class. Prototype: mean of the rest.
  std::vector<double> queries(n * dim);
  std::vector<double> protos(n * dim);
  for (std::size_t j = 0; j < n; ++j) {
    const double* block = batch.class_block(j).data();
    std::copy(block, block + dim, queries.begin() + static_cast<std::ptrdiff_t>(j * dim));
    k.col_sum(block + dim, m - 1, dim, protos.data() + j * dim);
    for (std::size_t l = 0; l < dim; ++l) {
      protos[j * dim + l] /= static_cast<double>(m - 1);
    }
  }
  std::vector<double> qn(n);
  std::vector<double> pn(n);
  k.row_sq_norms(queries.data(), n, dim, qn.data());
  k.row_sq_norms(protos.data(), n, dim, pn.data());
  for (std::size_t j = 0; j < n; ++j) {
    require_nonzero(qn[j], "query", j);
    require_nonzero(pn[j], "prototype", j);
  }
  std::vector<double> dots(n * n);
  k.gemm_nt(queries.data(), protos.data(), dots.data(), n, dim, n, false);

  std::vector<double> logits(n);
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t c = 0; c < n; ++c) {
      logits[c] = spec.w * dots[j * n + c] / std::sqrt(qn[j] * pn[c]) + spec.b;
    }
    total += cross_entropy(logits.data(), n, j);
  }
  return total / static_cast<double>(n);
}

double supcon_loss(const EmbeddingBatch& batch, const LossSpec& spec) {
  const auto& k = simd::kernels();
  const std::size_t rows = batch.total_rows();
  const std::size_t dim = batch.dim();
  if (rows < 3) throw Error(ErrorCode::kInvalidArgument, "SupCon needs at least 3 samples");
  for (std::size_t j = 0; j < batch.n_classes(); ++j) {
    if (batch.class_size(j) < 2) {
      throw Error(ErrorCode::kNoPositives,
                  "class " + std::to_string(j) + " has no positive pairs");
    }
  }
  std::vector<double> z(batch.values().begin(), batch.values().end());
  std::vector<double> sq(rows);
  k.row_sq_norms(z.data(), rows, dim, sq.data());
  for (std::size_t r = 0; r < rows; ++r) {
    require_nonzero(sq[r], "embedding", r);
    const double inv = 1.0 / std::sqrt(sq[r]);
    for (std::size_t l = 0; l < dim; ++l) z[r * dim + l] *= inv;
  }
  std::vector<double> sim(rows * rows);
  k.gemm_nt(z.data(), z.data(), sim.data(), rows, dim, rows, false);

  std::vector<std::size_t> label(rows);
  for (std::size_t j = 0; j < batch.n_classes(); ++j) {
    for (std::size_t r = batch.class_begin(j); r < batch.class_begin(j) + batch.class_size(j); ++r) {
      label[r] = j;
    }
  }
  const double inv_t = 1.0 / spec.temperature;
  double total = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    const double* s = sim.data() + i * rows;
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < rows; ++a) {
      if (a != i) mx = std::max(mx, s[a] * inv_t);
    }
    double denom = 0.0;
    for (std::size_t a = 0; a < rows; ++a) {
      if (a != i) denom += std::exp(s[a] * inv_t - mx);
    }
    const double lse = mx + std::log(denom);
    double pos_sum = 0.0;
    std::size_t n_pos = 0;
    for (std::size_t p = 0; p < rows; ++p) {
      if (p != i && label[p] == label[i]) {
        pos_sum += s[p] * inv_t - lse;
        ++n_pos;
      }
    }
    total += -pos_sum / static_cast<double>(n_pos);
  }
  return total / static_cast<double>(rows);
}

double contrastive_loss(const EmbeddingBatch& batch, LossKind kind,
                        const LossSpec& spec) {
  switch (kind) {
    case LossKind::kGe2e: return ge2e_loss(batch, spec);
    case LossKind::kAngleProto: return angle_proto_loss(batch, spec);
    case LossKind::kSupCon: return supcon_loss(batch, spec);
    default: break;
  }
  throw Error(ErrorCode::kConfigError,
              std::string(loss_kind_name(kind)) + " is not a contrastive loss");
}

double combined_loss(const EmbeddingBatch& batch, const LossSpec& spec,
                     IccOptions icc_options) {
  const double contr = contrastive_loss(batch, spec.contrastive, spec);
  const double reg = icc_regularizer(batch, icc_options);
  return combine_terms(contr, reg, spec);
}

double evaluate_loss(const EmbeddingBatch& batch, const LossSpec& spec,
                     IccOptions icc_options) {
  switch (spec.kind) {
    case LossKind::kIccReg: return icc_regularizer(batch, icc_options);
    case LossKind::kCombined: return combined_loss(batch, spec, icc_options);
    default: return contrastive_loss(batch, spec.kind, spec);
  }
}

}  // namespace icclab
