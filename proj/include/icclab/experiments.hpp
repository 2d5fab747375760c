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

// Toy-scale comparison of each contrastive loss with and without the ICC
// regularizer: every (loss, lambda, seed) run, the per-lambda medians and
// the two summary rows per loss.

#ifndef ICCLAB_EXPERIMENTS_HPP_
#define ICCLAB_EXPERIMENTS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "icclab/config_io.hpp"
#include "icclab/error.hpp"
#include "icclab/parallel.hpp"
#include "icclab/toy.hpp"

namespace icclab {

// The seed drives the dataset, the initialisation, the batches and the
// trials. lambda = 0 trains on the contrastive term alone.
TrainReport run_toy(const ToyExperiment& exp, LossKind kind, double lambda, std::uint64_t seed,
                    Encoder* trained = nullptr);

struct RunOutcome {
  LossKind kind = LossKind::kGe2e;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::optional<TrainReport> report;
  // Set when the run failed.
  std::optional<ErrorCode> error_code;
  std::string error;
};

struct SummaryRow {
  LossKind kind = LossKind::kGe2e;
  bool regularized = false;
  double lambda = 0.0;
  double median_icc = 0.0;
  double median_eer = 0.0;
  double median_min_dcf = 0.0;
  std::size_t n_runs = 0;
};

struct Comparison {
  std::vector<RunOutcome> runs;  // kind-major, then lambda, then seed
  std::vector<SummaryRow> rows;  // per kind: lambda = 0, then the selected lambda
  std::size_t n_failed = 0;
};

// Runs every kind over the lambda grid and the seeds; failures are recorded
// per run and the remaining runs continue. The selected lambda is chosen on
// the medians of the held-out metrics.
Comparison compare_regularization(const ToyExperiment& exp, Threads threads = Threads::serial(),
                                  double max_eer_increase = 0.01);

std::string summary_markdown(const Comparison& c);
std::string summary_csv(const Comparison& c);
Json to_json(const TrainReport& r);

}  // namespace icclab

#endif  // ICCLAB_EXPERIMENTS_HPP_
