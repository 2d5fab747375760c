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

// Contrastive objectives evaluated on an EmbeddingBatch, and their
// combination with the ICC regularizer. All values use mean reduction over
// the per-sample (or per-query) terms.

#ifndef ICCLAB_LOSSES_HPP_
#define ICCLAB_LOSSES_HPP_

#include <string>
#include <string_view>

#include "icclab/batch.hpp"
#include "icclab/icc.hpp"

namespace icclab {

enum class LossKind { kGe2e, kAngleProto, kSupCon, kIccReg, kCombined };

std::string_view loss_kind_name(LossKind kind);
// Accepts the names produced by loss_kind_name plus common spellings
// ("icc", "iccreg", "angle_proto", ...). Throws kConfigError otherwise.
LossKind parse_loss_kind(std::string_view name);

struct LossSpec {
  LossKind kind = LossKind::kGe2e;
  // Contrastive term used when kind == kCombined.
  LossKind contrastive = LossKind::kGe2e;
  double alpha = 1.0;
  double lambda = 0.0;
  // Similarity S = w * cos + b for GE2E and AngleProto.
  double w = 10.0;
  double b = -5.0;
  // SupCon temperature.
  double temperature = 0.07;

  bool operator==(const LossSpec&) const = default;
};

// Throws kConfigError on alpha < 0, lambda < 0, temperature <= 0 or a
// combined spec whose contrastive term is not GE2E/AngleProto/SupCon.
void validate(const LossSpec& spec);

double ge2e_loss(const EmbeddingBatch& batch, const LossSpec& spec);
double angle_proto_loss(const EmbeddingBatch& batch, const LossSpec& spec);
double supcon_loss(const EmbeddingBatch& batch, const LossSpec& spec);

// The contrastive term named by `kind` (GE2E, AngleProto or SupCon).
double contrastive_loss(const EmbeddingBatch& batch, LossKind kind,
                        const LossSpec& spec);

// alpha * contrastive + lambda * regularizer.
inline double combine_terms(double contrastive, double regularizer,
                            const LossSpec& spec) {
  return spec.alpha * contrastive + spec.lambda * regularizer;
}

// alpha * L_contr + lambda * R_ICC.
double combined_loss(const EmbeddingBatch& batch, const LossSpec& spec,
                     IccOptions icc_options = {});

// Any kind, including the bare regularizer.
double evaluate_loss(const EmbeddingBatch& batch, const LossSpec& spec,
                     IccOptions icc_options = {});

}  // namespace icclab

#endif  // ICCLAB_LOSSES_HPP_
