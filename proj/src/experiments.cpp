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

#include "icclab/experiments.hpp"

#include <cstdio>
#include <sstream>

#include "icclab/csv_io.hpp"

namespace icclab {

namespace {

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * v);
  return buf;
}

std::string fixed(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string display_name(LossKind k) {
  switch (k) {
    case LossKind::kGe2e: return "GE2E";
    case LossKind::kAngleProto: return "AngleProto";
    case LossKind::kSupCon: return "SupCon";
    default: return std::string(loss_kind_name(k));
  }
}

SummaryRow summarize(const std::vector<const TrainReport*>& reports, LossKind kind, double lambda,
                     bool regularized) {
  SummaryRow row;
  row.kind = kind;
  row.regularized = regularized;
  row.lambda = lambda;
  std::vector<double> icc, eer, dcf;
  for (const TrainReport* r : reports) {
    icc.push_back(r->heldout.icc);
    eer.push_back(r->heldout.eer);
    dcf.push_back(r->heldout.min_dcf);
  }
  row.n_runs = reports.size();
  if (!reports.empty()) {
    row.median_icc = median(icc);
    row.median_eer = median(eer);
    row.median_min_dcf = median(dcf);
  }
  return row;
}

}  // namespace

TrainReport run_toy(const ToyExperiment& exp, LossKind kind, double lambda, std::uint64_t seed,
                    Encoder* trained) {
  ToyDataConfig data = exp.data;
  data.seed = seed;
  TrainConfig train = exp.train;
  train.seed = seed;
  train.loss.kind = LossKind::kCombined;
  train.loss.contrastive = kind;
  train.loss.lambda = lambda;
  EvalConfig eval = exp.eval;
  eval.seed = seed;
  return train_encoder(generate_toy_dataset(data), exp.encoder, train, eval, trained);
}

Comparison compare_regularization(const ToyExperiment& exp, Threads threads, double max_eer_increase) {
  const auto& lambdas = exp.train.lambda_grid;
  bool has_zero = false;
  for (double l : lambdas) has_zero = has_zero || l == 0.0;
  if (!has_zero) throw Error(ErrorCode::kConfigError, "/toy/train/lambda_grid: must contain 0");

  Comparison c;
  for (LossKind kind : exp.kinds) {
    for (double lambda : lambdas) {
      for (std::uint64_t seed : exp.seeds) {
        RunOutcome& run = c.runs.emplace_back();
        run.kind = kind;
        run.lambda = lambda;
        run.seed = seed;
      }
    }
  }
  parallel_for(c.runs.size(), threads, [&](std::size_t k) {
    RunOutcome& run = c.runs[k];
    try {
      run.report = run_toy(exp, run.kind, run.lambda, run.seed);
    } catch (const Error& e) {
      run.error_code = e.code();
      run.error = e.what();
    }
  });

  for (LossKind kind : exp.kinds) {
    std::vector<LambdaOutcome> outcomes;
    std::vector<std::vector<const TrainReport*>> per_lambda;
    for (double lambda : lambdas) {
      std::vector<const TrainReport*> ok;
      for (const RunOutcome& r : c.runs) {
        if (r.kind == kind && r.lambda == lambda && r.report) ok.push_back(&*r.report);
      }
      // A lambda without a single finished run cannot be selected.
      if (ok.empty() && lambda != 0.0) continue;
      const SummaryRow s = summarize(ok, kind, lambda, lambda != 0.0);
      outcomes.push_back({lambda, s.median_icc, s.median_eer});
      per_lambda.push_back(std::move(ok));
    }
    std::size_t base = 0;
    while (outcomes[base].lambda != 0.0) ++base;
    c.rows.push_back(summarize(per_lambda[base], kind, 0.0, false));
    if (per_lambda[base].empty()) {
      c.rows.push_back(summarize({}, kind, 0.0, true));
      continue;
    }
    const std::size_t best = select_lambda(outcomes, max_eer_increase);
    c.rows.push_back(summarize(per_lambda[best], kind, outcomes[best].lambda, true));
  }
  for (const RunOutcome& r : c.runs) c.n_failed += !r.report;
  return c;
}

std::string summary_markdown(const Comparison& c) {
  std::ostringstream s;
  s << "| Loss | lambda | ICC | EER (%) | minDCF | runs |\n";
  s << "|---|---|---|---|---|---|\n";
  for (const SummaryRow& r : c.rows) {
    s << "| " << display_name(r.kind) << (r.regularized ? " + ICC" : "") << " | " << fixed(r.lambda, 2) << " | "
      << fixed(r.median_icc, 4) << " | " << percent(r.median_eer) << " | " << fixed(r.median_min_dcf, 4) << " | "
      << r.n_runs << " |\n";
  }
  return s.str();
}

std::string summary_csv(const Comparison& c) {
  std::ostringstream s;
  s << "loss,regularized,lambda,median_icc,median_eer,median_min_dcf,n_runs\n";
  for (const SummaryRow& r : c.rows) {
    s << loss_kind_name(r.kind) << ',' << (r.regularized ? 1 : 0) << ',' << format_double(r.lambda) << ','
      << format_double(r.median_icc) << ',' << format_double(r.median_eer) << ','
      << format_double(r.median_min_dcf) << ',' << r.n_runs << '\n';
  }
  return s.str();
}

Json to_json(const TrainReport& r) {
  return {{"seed", r.seed},
          {"config_digest", r.config_digest},
          {"loss_kind", std::string(loss_kind_name(r.loss_kind))},
          {"lambda", r.lambda},
          {"loss_trace", r.loss_trace},
          {"heldout", {{"icc", r.heldout.icc}, {"eer", r.heldout.eer}, {"min_dcf", r.heldout.min_dcf}}}};
}

}  // namespace icclab
