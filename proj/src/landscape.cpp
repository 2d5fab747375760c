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

#include "icclab/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "icclab/error.hpp"
#include "icclab/icc.hpp"
#include "icclab/rng.hpp"

namespace icclab {

namespace {

constexpr std::uint64_t kMixtureTag = 0x6d69787475726531ULL;  // "mixture1"
constexpr double kGradientFloor = 1e-6;

[[noreturn]] void config_error(const std::string& pointer, const std::string& what) {
  throw Error(ErrorCode::kConfigError, pointer + ": " + what);
}

void validate_axis(const Axis& axis, const std::string& pointer) {
  if (!(axis.step > 0.0) || !std::isfinite(axis.step)) {
    config_error(pointer + "/step", "must be a positive finite number");
  }
  if (!std::isfinite(axis.start) || !std::isfinite(axis.stop)) {
    config_error(pointer, "bounds must be finite");
  }
  if (axis.stop < axis.start) config_error(pointer + "/stop", "must not be below start");
  if (!(axis.start > 0.0)) config_error(pointer + "/start", "variances must be positive");
}

std::string cell_label(const VarianceGrid& grid, std::size_t i, std::size_t j) {
  return "cell (intra_index=" + std::to_string(i) + ", inter_index=" + std::to_string(j) +
         ", intra_var=" + std::to_string(grid.intra_values[i]) +
         ", inter_var=" + std::to_string(grid.inter_values[j]) + ")";
}

// Runs fn(i, j) over every cell; a failure is rethrown with the cell named.
template <typename Fn>
void for_each_cell(const VarianceGrid& grid, Threads threads, Fn&& fn) {
  const std::size_t n_inter = grid.n_inter();
  parallel_for(grid.n_intra() * n_inter, threads, [&](std::size_t c) {
    const std::size_t i = c / n_inter;
    const std::size_t j = c % n_inter;
    try {
      fn(i, j);
    } catch (const Error& e) {
      throw Error(e.code(), cell_label(grid, i, j) + ": " + e.detail());
    }
  });
}

double axis_lo(const std::vector<double>& v) { return v.front(); }
double axis_hi(const std::vector<double>& v) { return v.back(); }

bool inside(const VarianceGrid& grid, double intra, double inter) {
  return intra >= axis_lo(grid.intra_values) && intra <= axis_hi(grid.intra_values) &&
         inter >= axis_lo(grid.inter_values) && inter <= axis_hi(grid.inter_values);
}

// Index of the lower vertex of the interval holding x and the fractional
// offset inside it.
std::pair<std::size_t, double> locate(const std::vector<double>& axis, double x) {
  const std::size_t n = axis.size();
  if (n == 1) return {0, 0.0};
  const double step = (axis.back() - axis.front()) / static_cast<double>(n - 1);
  double t = (x - axis.front()) / step;
  t = std::clamp(t, 0.0, static_cast<double>(n - 1));
  std::size_t k = std::min(static_cast<std::size_t>(t), n - 2);
  return {k, t - static_cast<double>(k)};
}

double axis_step(const std::vector<double>& axis) {
  if (axis.size() < 2) return 0.0;
  return (axis.back() - axis.front()) / static_cast<double>(axis.size() - 1);
}

}  // namespace

std::size_t Axis::size() const {
  return static_cast<std::size_t>(std::llround((stop - start) / step)) + 1;
}

std::vector<double> Axis::values() const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = value(i);
  return out;
}

void validate(const GridConfig& config) {
  validate_axis(config.intra, "/intra_axis");
  validate_axis(config.inter, "/inter_axis");
  if (config.dims == 0) config_error("/dims", "must be positive");
  if (config.n_classes < 2) config_error("/n_classes", "needs at least two classes");
  if (config.n_samples_total % config.n_classes != 0) {
    config_error("/n_samples_total", "must be divisible by n_classes");
  }
  if (config.samples_per_class() < 2) {
    config_error("/n_samples_total", "needs at least two samples per class");
  }
  if (config.n_repeats == 0) config_error("/n_repeats", "must be positive");
}

EmbeddingBatch sample_mixture(double intra_var, double inter_var,
                              const GridConfig& config, const DrawKey& key) {
  if (!(intra_var > 0.0) || !(inter_var > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "mixture variances must be positive");
  }
  const std::size_t n = config.n_classes;
  const std::size_t m = config.samples_per_class();
  const std::size_t dim = config.dims;

  RandomStream rng(derive_key(config.seed, {kMixtureTag, key.intra_index, key.inter_index,
                                            key.variant}),
                   key.repeat);
  std::vector<double> centroids(n * dim);
  rng.fill_normal(centroids, std::sqrt(inter_var));
  std::vector<double> values(n * m * dim);
  rng.fill_normal(values, std::sqrt(intra_var));
  for (std::size_t j = 0; j < n; ++j) {
    const double* c = centroids.data() + j * dim;
    for (std::size_t r = 0; r < m; ++r) {
      double* row = values.data() + (j * m + r) * dim;
      for (std::size_t d = 0; d < dim; ++d) row[d] += c[d];
    }
  }
  return EmbeddingBatch(n, m, dim, std::move(values));
}

double VarianceGrid::stderr_at(std::size_t i, std::size_t j) const {
  if (n_repeats == 0) return 0.0;
  return std_at(i, j) / std::sqrt(static_cast<double>(n_repeats));
}

VarianceGrid make_grid(const GridConfig& config, const LossSpec& loss) {
  VarianceGrid grid;
  grid.config = config;
  grid.loss = loss;
  grid.intra_values = config.intra.values();
  grid.inter_values = config.inter.values();
  grid.values_mean.assign(grid.n_intra() * grid.n_inter(), 0.0);
  grid.values_std.assign(grid.values_mean.size(), 0.0);
  grid.n_repeats = config.n_repeats;
  return grid;
}

void summarize_draws(const std::vector<double>& draws, double* mean, double* sd) {
  const std::size_t n = draws.size();
  double sum = 0.0;
  for (double v : draws) sum += v;
  const double mu = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double v : draws) ss += (v - mu) * (v - mu);
  *mean = mu;
  *sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
}

VarianceGrid evaluate_surface(const GridConfig& config, const LossSpec& loss,
                              Threads threads) {
  validate(config);
  validate(loss);
  VarianceGrid grid = make_grid(config, loss);
  for_each_cell(grid, threads, [&](std::size_t i, std::size_t j) {
    std::vector<double> draws(config.n_repeats);
    for (std::size_t r = 0; r < config.n_repeats; ++r) {
      const EmbeddingBatch batch =
          sample_mixture(grid.intra_values[i], grid.inter_values[j], config, {i, j, r, 0});
      draws[r] = evaluate_loss(batch, loss);
    }
    const std::size_t c = i * grid.n_inter() + j;
    summarize_draws(draws, &grid.values_mean[c], &grid.values_std[c]);
  });
  return grid;
}

std::vector<VarianceGrid> lambda_sweep(const GridConfig& config,
                                       const std::vector<double>& lambdas,
                                       const LossSpec& base, bool shared_batches,
                                       Threads threads) {
  validate(config);
  std::vector<LossSpec> specs;
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    const double lambda = lambdas[k];
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
      config_error("/lambdas/" + std::to_string(k), "must lie in [0, 1]");
    }
    LossSpec spec = base;
    spec.kind = LossKind::kCombined;
    spec.contrastive = LossKind::kGe2e;
    spec.alpha = 1.0 - lambda;
    spec.lambda = lambda;
    validate(spec);
    specs.push_back(spec);
  }
  LossSpec ge2e = base;
  ge2e.kind = LossKind::kGe2e;

  std::vector<VarianceGrid> grids;
  for (const LossSpec& spec : specs) grids.push_back(make_grid(config, spec));
  if (grids.empty()) return grids;

  for_each_cell(grids.front(), threads, [&](std::size_t i, std::size_t j) {
    const double intra = grids.front().intra_values[i];
    const double inter = grids.front().inter_values[j];
    std::vector<double> contr(config.n_repeats);
    std::vector<double> reg(config.n_repeats);
    std::vector<double> draws(config.n_repeats);
    const std::size_t c = i * grids.front().n_inter() + j;
    if (shared_batches) {
      for (std::size_t r = 0; r < config.n_repeats; ++r) {
        const EmbeddingBatch batch = sample_mixture(intra, inter, config, {i, j, r, 0});
        contr[r] = contrastive_loss(batch, LossKind::kGe2e, ge2e);
        reg[r] = icc_regularizer(batch);
      }
      for (std::size_t k = 0; k < specs.size(); ++k) {
        for (std::size_t r = 0; r < config.n_repeats; ++r) {
          draws[r] = combine_terms(contr[r], reg[r], specs[k]);
        }
        summarize_draws(draws, &grids[k].values_mean[c], &grids[k].values_std[c]);
      }
    } else {
      for (std::size_t k = 0; k < specs.size(); ++k) {
        for (std::size_t r = 0; r < config.n_repeats; ++r) {
          const EmbeddingBatch batch =
              sample_mixture(intra, inter, config, {i, j, r, k + 1});
          draws[r] = evaluate_loss(batch, specs[k]);
        }
        summarize_draws(draws, &grids[k].values_mean[c], &grids[k].values_std[c]);
      }
    }
  });
  return grids;
}

VarianceGrid expected_mean_square_surface(const GridConfig& config) {
  validate(config);
  LossSpec spec;
  spec.kind = LossKind::kIccReg;
  VarianceGrid grid = make_grid(config, spec);
  grid.n_repeats = 0;
  const std::size_t m = config.samples_per_class();
  for (std::size_t i = 0; i < grid.n_intra(); ++i) {
    for (std::size_t j = 0; j < grid.n_inter(); ++j) {
      const double w = grid.intra_values[i];
      const double b = static_cast<double>(m) * grid.inter_values[j] + w;
      grid.values_mean[i * grid.n_inter() + j] = 1.0 - icc_from_mean_squares(b, w, m);
    }
  }
  return grid;
}

std::string_view termination_name(Termination t) {
  switch (t) {
    case Termination::kConverged: return "converged";
    case Termination::kHitBoundary: return "hit_boundary";
    case Termination::kMaxSteps: return "max_steps";
  }
  return "unknown";
}

double interpolate(const VarianceGrid& grid, double intra, double inter) {
  const auto [i, u] = locate(grid.intra_values, intra);
  const auto [j, v] = locate(grid.inter_values, inter);
  const std::size_t i1 = std::min(i + 1, grid.n_intra() - 1);
  const std::size_t j1 = std::min(j + 1, grid.n_inter() - 1);
  const double f00 = grid.mean_at(i, j);
  const double f01 = grid.mean_at(i, j1);
  const double f10 = grid.mean_at(i1, j);
  const double f11 = grid.mean_at(i1, j1);
  return (1.0 - u) * ((1.0 - v) * f00 + v * f01) + u * ((1.0 - v) * f10 + v * f11);
}

std::array<double, 2> surface_gradient(const VarianceGrid& grid, double intra,
                                       double inter) {
  auto partial = [&](const std::vector<double>& axis, double x, auto&& f) {
    const double h = axis_step(axis);
    if (h == 0.0) return 0.0;
    const double lo = std::max(axis_lo(axis), x - h);
    const double hi = std::min(axis_hi(axis), x + h);
    return (f(hi) - f(lo)) / (hi - lo);
  };
  const double d_intra = partial(grid.intra_values, intra,
                                 [&](double x) { return interpolate(grid, x, inter); });
  const double d_inter = partial(grid.inter_values, inter,
                                 [&](double y) { return interpolate(grid, intra, y); });
  return {d_intra, d_inter};
}

double default_descent_step(const VarianceGrid& grid) {
  const double a = axis_step(grid.intra_values);
  const double b = axis_step(grid.inter_values);
  if (a == 0.0) return 0.5 * b;
  if (b == 0.0) return 0.5 * a;
  return 0.5 * std::min(a, b);
}

DescentPath trace_descent(const VarianceGrid& grid, double start_intra,
                          double start_inter, double step, std::size_t max_steps) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw Error(ErrorCode::kInvalidArgument, "descent step must be positive");
  }
  if (!std::isfinite(start_intra) || !std::isfinite(start_inter) ||
      !inside(grid, start_intra, start_inter)) {
    throw Error(ErrorCode::kStartOutOfBounds,
                "start (" + std::to_string(start_intra) + ", " + std::to_string(start_inter) +
                    ") lies outside the grid");
  }
  DescentPath path;
  path.start = {start_intra, start_inter, interpolate(grid, start_intra, start_inter)};
  path.points.push_back(path.start);
  PathPoint p = path.start;
  for (std::size_t s = 0; s < max_steps; ++s) {
    const auto g = surface_gradient(grid, p.intra, p.inter);
    const double norm = std::hypot(g[0], g[1]);
    if (norm < kGradientFloor) {
      path.termination = Termination::kConverged;
      return path;
    }
    PathPoint next{p.intra - step * g[0] / norm, p.inter - step * g[1] / norm, 0.0};
    if (!inside(grid, next.intra, next.inter)) {
      path.termination = Termination::kHitBoundary;
      return path;
    }
    next.value = interpolate(grid, next.intra, next.inter);
    if (next.value > p.value) {
      path.termination = Termination::kConverged;
      return path;
    }
    path.points.push_back(next);
    p = next;
  }
  path.termination = Termination::kMaxSteps;
  return path;
}

std::vector<std::array<double, 2>> default_descent_starts() {
  return {{0.10, 0.05}, {0.10, 0.30}, {1.50, 0.05}, {1.50, 0.30}};
}

}  // namespace icclab
