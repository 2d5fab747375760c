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

// Monte Carlo loss landscapes over generative (intra-class variance,
// inter-class variance) coordinates, steepest-descent tracing on the
// resulting surfaces, and lambda sweeps of (1 - lambda) GE2E + lambda R_ICC.

#ifndef ICCLAB_LANDSCAPE_HPP_
#define ICCLAB_LANDSCAPE_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "icclab/batch.hpp"
#include "icclab/losses.hpp"
#include "icclab/parallel.hpp"

namespace icclab {

// Arithmetic range start, start + step, ..., stop (inclusive).
struct Axis {
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;

  std::size_t size() const;
  double value(std::size_t i) const { return start + static_cast<double>(i) * step; }
  std::vector<double> values() const;
  bool operator==(const Axis&) const = default;
};

struct GridConfig {
  Axis intra{0.02, 2.0, 0.02};
  Axis inter{0.01, 0.60, 0.01};
  std::size_t dims = 8;
  std::size_t n_classes = 4;
  std::size_t n_samples_total = 400;
  std::size_t n_repeats = 100;
  std::uint64_t seed = 20240521;

  std::size_t samples_per_class() const { return n_samples_total / n_classes; }
  bool operator==(const GridConfig&) const = default;
};

// Throws kConfigError naming the offending field as a JSON pointer.
void validate(const GridConfig& config);

// Identifies one Monte Carlo draw. The random stream of a draw is a pure
// function of (seed, intra_index, inter_index, repeat, variant).
struct DrawKey {
  std::size_t intra_index = 0;
  std::size_t inter_index = 0;
  std::size_t repeat = 0;
  // 0 for the shared batches; other values give independent batches.
  std::uint64_t variant = 0;
};

// Gaussian mixture: class centroids ~ N(0, inter_var I), samples =
// centroid + N(0, intra_var I). Balanced, class-major.
EmbeddingBatch sample_mixture(double intra_var, double inter_var,
                              const GridConfig& config, const DrawKey& key);

struct VarianceGrid {
  GridConfig config;
  LossSpec loss;
  std::vector<double> intra_values;
  std::vector<double> inter_values;
  // Row-major [intra x inter].
  std::vector<double> values_mean;
  std::vector<double> values_std;
  std::size_t n_repeats = 0;

  std::size_t n_intra() const { return intra_values.size(); }
  std::size_t n_inter() const { return inter_values.size(); }
  double mean_at(std::size_t i, std::size_t j) const { return values_mean[i * n_inter() + j]; }
  double std_at(std::size_t i, std::size_t j) const { return values_std[i * n_inter() + j]; }
  // Monte Carlo standard error of a cell mean.
  double stderr_at(std::size_t i, std::size_t j) const;
};

// Empty grid over the config's axes.
VarianceGrid make_grid(const GridConfig& config, const LossSpec& loss);

// Mean and sample standard deviation of the loss over n_repeats draws per
// cell. Cells run in parallel; results do not depend on the schedule.
VarianceGrid evaluate_surface(const GridConfig& config, const LossSpec& loss,
                              Threads threads = Threads::serial());

// One grid per lambda of (1 - lambda) * L_GE2E + lambda * R_ICC. With
// shared_batches every lambda sees the same draws, so each cell is an exact
// per-draw convex combination of the two base surfaces. `base` supplies the
// GE2E similarity parameters.
std::vector<VarianceGrid> lambda_sweep(const GridConfig& config,
                                       const std::vector<double>& lambdas,
                                       const LossSpec& base = {},
                                       bool shared_batches = true,
                                       Threads threads = Threads::serial());

// R_ICC(M inter + intra, intra): the regularizer evaluated at the expected
// one-way ANOVA mean squares. n_repeats is 0 and values_std is zero.
VarianceGrid expected_mean_square_surface(const GridConfig& config);

// Reduce / summarise per-draw values into cell mean and sample std.
void summarize_draws(const std::vector<double>& draws, double* mean, double* sd);

enum class Termination { kConverged, kHitBoundary, kMaxSteps };
std::string_view termination_name(Termination t);

struct PathPoint {
  double intra = 0.0;
  double inter = 0.0;
  double value = 0.0;
};

struct DescentPath {
  PathPoint start;
  std::vector<PathPoint> points;  // points[0] is the start
  Termination termination = Termination::kMaxSteps;
};

// Bilinear interpolation of values_mean; (intra, inter) must lie inside the
// grid's bounding box.
double interpolate(const VarianceGrid& grid, double intra, double inter);

// Central-difference gradient of the interpolated surface with one axis
// step per coordinate (one-sided at the box edges).
std::array<double, 2> surface_gradient(const VarianceGrid& grid, double intra,
                                       double inter);

// Half the smaller axis step.
double default_descent_step(const VarianceGrid& grid);

// Normalised-gradient steps of fixed length. Stops when the next point
// leaves the grid (kHitBoundary), when the gradient norm drops below 1e-6
// or the next point would not lower the interpolated value (kConverged), or
// after max_steps steps.
DescentPath trace_descent(const VarianceGrid& grid, double start_intra,
                          double start_inter, double step,
                          std::size_t max_steps = 10000);

// The four start points of the shipped figure recipe.
std::vector<std::array<double, 2>> default_descent_starts();

}  // namespace icclab

#endif  // ICCLAB_LANDSCAPE_HPP_
