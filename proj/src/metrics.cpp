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

#include "icclab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "icclab/error.hpp"

namespace icclab {

namespace {

void count_classes(std::span<const Trial> trials, double* pos, double* neg) {
  *pos = 0.0;
  *neg = 0.0;
  for (const Trial& t : trials) {
    if (!std::isfinite(t.score)) throw Error(ErrorCode::kInvalidArgument, "trial score is not finite");
    (t.same_class ? *pos : *neg) += 1.0;
  }
  if (*pos == 0.0 || *neg == 0.0) {
    throw Error(ErrorCode::kOneClassOnly, "need both target and non-target trials, got " +
                                              std::to_string(static_cast<long>(*pos)) + " and " +
                                              std::to_string(static_cast<long>(*neg)));
  }
}

}  // namespace

std::vector<OperatingPoint> roc_points(std::span<const Trial> trials) {
  double pos = 0.0;
  double neg = 0.0;
  count_classes(trials, &pos, &neg);
  std::vector<Trial> sorted(trials.begin(), trials.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const Trial& a, const Trial& b) { return a.score > b.score; });
  std::vector<OperatingPoint> points;
  points.push_back({std::numeric_limits<double>::infinity(), 0.0, 1.0});
  double accepted_pos = 0.0;
  double accepted_neg = 0.0;
  std::size_t k = 0;
  while (k < sorted.size()) {
    const double threshold = sorted[k].score;
    for (; k < sorted.size() && sorted[k].score == threshold; ++k) {
      (sorted[k].same_class ? accepted_pos : accepted_neg) += 1.0;
    }
    points.push_back({threshold, accepted_neg / neg, 1.0 - accepted_pos / pos});
  }
  return points;
}

double compute_eer(std::span<const Trial> trials) {
  const std::vector<OperatingPoint> points = roc_points(trials);
  // FAR - FRR starts at -1 and ends at +1.
  for (std::size_t k = 1; k < points.size(); ++k) {
    const double d1 = points[k].false_accept - points[k].false_reject;
    if (d1 < 0.0) continue;
    const double d0 = points[k - 1].false_accept - points[k - 1].false_reject;
    const double t = -d0 / (d1 - d0);
    return points[k - 1].false_accept + t * (points[k].false_accept - points[k - 1].false_accept);
  }
  return points.back().false_accept;
}

double compute_min_dcf(std::span<const Trial> trials, DcfParams params) {
  if (!(params.p_target > 0.0 && params.p_target < 1.0) || !(params.c_miss > 0.0) ||
      !(params.c_fa > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "DCF needs 0 < p_target < 1 and positive costs");
  }
  const double miss_weight = params.c_miss * params.p_target;
  const double fa_weight = params.c_fa * (1.0 - params.p_target);
  double best = std::numeric_limits<double>::infinity();
  for (const OperatingPoint& p : roc_points(trials)) {
    best = std::min(best, miss_weight * p.false_reject + fa_weight * p.false_accept);
  }
  return best / std::min(miss_weight, fa_weight);
}

}  // namespace icclab
