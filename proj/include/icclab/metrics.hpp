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

// Verification metrics over scored trials.

#ifndef ICCLAB_METRICS_HPP_
#define ICCLAB_METRICS_HPP_

#include <span>
#include <vector>

namespace icclab {

struct Trial {
  double score = 0.0;
  bool same_class = false;
};

// A point of the ROC sweep: trials scoring >= threshold are accepted.
struct OperatingPoint {
  double threshold = 0.0;
  double false_accept = 0.0;
  double false_reject = 0.0;
};

// Operating points from "accept nothing" (FAR 0, FRR 1) to "accept all",
// one per distinct score; tied scores move together.
std::vector<OperatingPoint> roc_points(std::span<const Trial> trials);

// Equal error rate, interpolated linearly between the two adjacent
// operating points where FAR - FRR changes sign. Throws kOneClassOnly.
double compute_eer(std::span<const Trial> trials);

struct DcfParams {
  double p_target = 0.05;
  double c_miss = 1.0;
  double c_fa = 1.0;
};

// min over thresholds of (c_miss p P_miss + c_fa (1 - p) P_fa), divided by
// min(c_miss p, c_fa (1 - p)). Throws kOneClassOnly.
double compute_min_dcf(std::span<const Trial> trials, DcfParams params = {});

}  // namespace icclab

#endif  // ICCLAB_METRICS_HPP_
