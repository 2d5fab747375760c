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

#include "icclab/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "icclab/config_io.hpp"
#include "icclab/csv_io.hpp"
#include "icclab/experiments.hpp"
#include "icclab/icc.hpp"
#include "icclab/landscape.hpp"
#include "icclab/manifest.hpp"
#include "icclab/svg.hpp"
#include "icclab/svm.hpp"

namespace icclab {

namespace fs = std::filesystem;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParseError:
    case ErrorCode::kConfigError:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kIoError:
      return kExitParse;
    case ErrorCode::kStartOutOfBounds:
    case ErrorCode::kDivergedLoss:
      return kExitPartial;
    default:
      return kExitDegenerate;
  }
}

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string threads;
  std::string out = "out";
  std::string format = "csv";
};

Threads resolve_threads(const Globals& g) {
  if (!g.threads.empty()) return Threads::parse(g.threads);
  if (std::getenv("ICC_LAB_THREADS")) return Threads::from_environment();
  return Threads::automatic();
}

// Short decimal for file names and titles.
std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

struct Writer {
  explicit Writer(fs::path d) : dir(std::move(d)) {}

  fs::path dir;
  std::vector<std::string> outputs;

  void file(const std::string& name, std::string_view text) {
    write_text_file(dir / name, text);
    outputs.push_back(name);
  }
};

std::string grid_csv(const VarianceGrid& g) {
  std::ostringstream s;
  write_grid_csv(s, g);
  return s.str();
}

Json grid_json(const GridConfig& grid) { return to_json(grid); }

// ---- icc -------------------------------------------------------------------

struct IccArgs {
  std::string input;
  std::string mode = "auto";
  bool strict = false;
};

int cmd_icc(const Globals& g, const IccArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<std::string> names;
  std::istringstream in(read_text_file(a.input));
  const EmbeddingBatch batch = read_batch_csv(in, &names);
  IccMode mode = IccMode::kAuto;
  if (a.mode == "balanced") {
    mode = IccMode::kBalanced;
  } else if (a.mode == "imbalanced") {
    mode = IccMode::kImbalanced;
  }
  // Without --strict a degenerate dimension falls back to the epsilon guard;
  // well-defined batches report the exact statistic either way.
  IccReport report;
  bool guarded = false;
  try {
    report = compute_icc(batch, mode);
  } catch (const Error& e) {
    if (a.strict || e.code() != ErrorCode::kDegenerateDimension) throw;
    report = compute_icc(batch, mode, kRelaxedIcc);
    guarded = true;
  }
  // Mean squares are defined for equal class sizes only.
  std::vector<VarianceDecomposition> ms;
  if (batch.is_balanced()) ms = variance_decomposition_all(batch);
  const std::size_t dims = report.per_dimension.size();
  if (g.format == "json") {
    Json per_dim = Json::array();
    for (std::size_t l = 0; l < dims; ++l) {
      Json d{{"dimension", l}, {"icc", report.per_dimension[l]}};
      if (!ms.empty()) {
        d["ms_b"] = ms[l].ms_b;
        d["ms_w"] = ms[l].ms_w;
      }
      per_dim.push_back(d);
    }
    out << Json{{"mode", a.mode},
                {"strict", a.strict},
                {"epsilon_guard", guarded},
                {"n_classes", batch.n_classes()},
                {"n_rows", batch.total_rows()},
                {"per_dimension", per_dim},
                {"mean_icc", report.mean_icc},
                {"r_icc", report.regularizer_value}}
               .dump(2)
        << '\n';
  } else {
    out << "dimension,ms_b,ms_w,icc\n";
    for (std::size_t l = 0; l < dims; ++l) {
      out << l << ',' << (ms.empty() ? "" : format_double(ms[l].ms_b)) << ','
          << (ms.empty() ? "" : format_double(ms[l].ms_w)) << ',' << format_double(report.per_dimension[l]) << '\n';
    }
    out << "mean,,," << format_double(report.mean_icc) << '\n';
    out << "r_icc,,," << format_double(report.regularizer_value) << '\n';
  }
  if (guarded) err << "note: a dimension has a zero denominator; values use the epsilon guard\n";
  return kExitOk;
}

// ---- landscape ---------------------------------------------------------------

struct LandscapeArgs {
  std::string config;
  std::string loss = "icc";
  double lambda = 0.5;
  bool shared_batches = true;
};

int cmd_landscape(const Globals& g, const LandscapeArgs& a, std::ostream& out) {
  ExperimentConfig cfg = load_experiment(a.config);
  if (g.seed) cfg.grid.seed = *g.seed;
  const Threads threads = resolve_threads(g);
  const LossKind kind = parse_loss_kind(a.loss);
  VarianceGrid grid;
  std::string name;
  if (kind == LossKind::kCombined) {
    grid = lambda_sweep(cfg.grid, {a.lambda}, cfg.loss, a.shared_batches, threads).front();
    name = "combined_lambda" + short_number(a.lambda);
  } else {
    LossSpec spec = cfg.loss;
    spec.kind = kind;
    grid = evaluate_surface(cfg.grid, spec, threads);
    name = std::string(loss_kind_name(kind));
  }
  Writer w(g.out);
  w.file("landscape_" + name + ".csv", grid_csv(grid));
  PlotOptions plot;
  plot.title = name;
  w.file("landscape_" + name + ".svg", render_contour_svg(grid, {}, plot));
  append_manifest(w.dir, {"landscape",
                          {{"grid", grid_json(cfg.grid)},
                           {"loss", to_json(grid.loss)},
                           {"shared_batches", a.shared_batches}},
                          cfg.grid.seed, kToolVersion, w.outputs});
  for (const auto& f : w.outputs) out << "wrote " << (w.dir / f).string() << '\n';
  return kExitOk;
}

// ---- paths -------------------------------------------------------------------

struct PathsArgs {
  std::string grid;
  std::string config;
  std::string starts;
  // Unset values come from the configuration's paths section.
  std::optional<double> step;
  std::optional<std::size_t> max_steps;
};

std::vector<std::array<double, 2>> parse_starts(const std::string& text) {
  std::vector<std::array<double, 2>> starts;
  std::string item;
  std::istringstream s(text);
  while (std::getline(s, item, ';')) {
    const auto fields = split_csv_line(item);
    if (fields.size() != 2) {
      throw Error(ErrorCode::kParseError, "--starts: expected 'intra,inter' pairs separated by ';', got '" + item + "'");
    }
    std::array<double, 2> p{};
    for (int k = 0; k < 2; ++k) {
      try {
        std::size_t used = 0;
        p[k] = std::stod(fields[k], &used);
        if (used != fields[k].size()) throw std::invalid_argument("trailing text");
      } catch (const std::exception&) {
        throw Error(ErrorCode::kParseError, "--starts: '" + fields[k] + "' is not a number");
      }
    }
    starts.push_back(p);
  }
  return starts;
}

int cmd_paths(const Globals& g, const PathsArgs& a, std::ostream& out, std::ostream& err) {
  std::istringstream in(read_text_file(a.grid));
  const VarianceGrid grid = read_grid_csv(in);
  const PathsConfig cfg = load_experiment(a.config).paths;
  const auto starts = a.starts.empty() ? cfg.starts : parse_starts(a.starts);
  const double requested = a.step.value_or(cfg.step);
  const double step = requested > 0.0 ? requested : default_descent_step(grid);
  const std::size_t max_steps = a.max_steps.value_or(cfg.max_steps);
  Writer w(g.out);
  std::vector<DescentPath> paths;
  std::vector<std::string> failures;
  out << "start,start_intra,start_inter,end_intra,end_inter,steps,termination\n";
  for (std::size_t k = 0; k < starts.size(); ++k) {
    try {
      const DescentPath p = trace_descent(grid, starts[k][0], starts[k][1], step, max_steps);
      std::ostringstream csv;
      write_path_csv(csv, p);
      w.file("path_" + std::to_string(k) + ".csv", csv.str());
      const PathPoint& end = p.points.back();
      out << k << ',' << format_double(p.start.intra) << ',' << format_double(p.start.inter) << ','
          << format_double(end.intra) << ',' << format_double(end.inter) << ',' << p.points.size() - 1 << ','
          << termination_name(p.termination) << '\n';
      paths.push_back(p);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kStartOutOfBounds) throw;
      failures.push_back("start " + std::to_string(k) + " (" + short_number(starts[k][0]) + ", " +
                         short_number(starts[k][1]) + "): " + e.what());
    }
  }
  PlotOptions plot;
  plot.title = fs::path(a.grid).stem().string();
  w.file("paths.svg", render_contour_svg(grid, paths, plot));
  Json starts_json = Json::array();
  for (const auto& s : starts) starts_json.push_back({s[0], s[1]});
  append_manifest(w.dir, {"paths",
                          {{"grid_csv", a.grid}, {"starts", starts_json}, {"step", step}, {"max_steps", max_steps}},
                          g.seed.value_or(0), kToolVersion, w.outputs});
  if (!failures.empty()) {
    err << failures.size() << " of " << starts.size() << " starts failed:\n";
    for (const auto& f : failures) err << "  " << f << '\n';
    return kExitPartial;
  }
  return kExitOk;
}

// ---- svm-contour ---------------------------------------------------------------

struct SvmArgs {
  std::string config;
  std::string compare_grid;
};

int cmd_svm_contour(const Globals& g, const SvmArgs& a, std::ostream& out) {
  ExperimentConfig cfg = load_experiment(a.config);
  if (g.seed) cfg.grid.seed = *g.seed;
  const VarianceGrid grid = svm_error_surface(cfg.grid, cfg.svm, resolve_threads(g));
  Writer w(g.out);
  w.file("svm_error.csv", grid_csv(grid));
  PlotOptions plot;
  plot.title = "svm error rate";
  w.file("svm_error.svg", render_contour_svg(grid, {}, plot));
  append_manifest(w.dir, {"svm-contour", {{"grid", grid_json(cfg.grid)}, {"svm", to_json(cfg.svm)}},
                          cfg.grid.seed, kToolVersion, w.outputs});
  for (const auto& f : w.outputs) out << "wrote " << (w.dir / f).string() << '\n';

  fs::path reference = a.compare_grid;
  if (reference.empty() && fs::exists(w.dir / "landscape_icc.csv")) reference = w.dir / "landscape_icc.csv";
  if (!reference.empty()) {
    std::istringstream in(read_text_file(reference));
    const VarianceGrid icc = read_grid_csv(in);
    if (icc.values_mean.size() != grid.values_mean.size()) {
      throw Error(ErrorCode::kInvalidArgument, reference.string() + " has a different grid shape");
    }
    out << "spearman_vs_icc," << format_double(spearman_correlation(grid.values_mean, icc.values_mean)) << '\n';
  }
  return kExitOk;
}

// ---- sweep ---------------------------------------------------------------------

struct SweepArgs {
  std::string config;
  std::vector<double> lambdas;
  bool shared_batches = true;
};

int cmd_sweep(const Globals& g, const SweepArgs& a, std::ostream& out) {
  ExperimentConfig cfg = load_experiment(a.config);
  if (g.seed) cfg.grid.seed = *g.seed;
  const std::vector<double> lambdas = a.lambdas.empty() ? cfg.sweep.lambdas : a.lambdas;
  const auto grids = lambda_sweep(cfg.grid, lambdas, cfg.loss, a.shared_batches, resolve_threads(g));
  Writer w(g.out);
  std::vector<std::string> titles;
  for (std::size_t k = 0; k < grids.size(); ++k) {
    w.file("sweep_lambda_" + short_number(lambdas[k]) + ".csv", grid_csv(grids[k]));
    titles.push_back("lambda = " + short_number(lambdas[k]));
  }
  PlotOptions plot;
  plot.width = 360.0;
  plot.height = 300.0;
  w.file("sweep_panel.svg", render_panel_svg(grids, titles, 3, plot));
  append_manifest(w.dir, {"sweep",
                          {{"grid", grid_json(cfg.grid)},
                           {"loss", to_json(cfg.loss)},
                           {"lambdas", lambdas},
                           {"shared_batches", a.shared_batches}},
                          cfg.grid.seed, kToolVersion, w.outputs});
  for (const auto& f : w.outputs) out << "wrote " << (w.dir / f).string() << '\n';
  return kExitOk;
}

// ---- train ---------------------------------------------------------------------

struct TrainArgs {
  std::string config;
  bool compare = false;
  std::string kind;
  std::optional<double> lambda;
};

std::string report_name(LossKind kind, double lambda, std::uint64_t seed) {
  return std::string(loss_kind_name(kind)) + "_lambda" + short_number(lambda) + "_seed" + std::to_string(seed);
}

int cmd_train(const Globals& g, const TrainArgs& a, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg = load_experiment(a.config);
  ToyExperiment& toy = cfg.toy;
  Writer w(g.out);
  if (!a.compare) {
    LossKind kind = toy.train.loss.kind == LossKind::kCombined ? toy.train.loss.contrastive : toy.train.loss.kind;
    if (!a.kind.empty()) kind = parse_loss_kind(a.kind);
    if (kind != LossKind::kGe2e && kind != LossKind::kAngleProto && kind != LossKind::kSupCon) {
      throw Error(ErrorCode::kConfigError, "--kind: must be ge2e, angleproto or supcon");
    }
    const double lambda = a.lambda.value_or(toy.train.loss.lambda);
    const std::uint64_t seed = g.seed.value_or(toy.seeds.front());
    const TrainReport r = run_toy(toy, kind, lambda, seed);
    const std::string name = report_name(kind, lambda, seed);
    w.file("train_" + name + ".json", to_json(r).dump(2) + "\n");
    std::ostringstream trace;
    write_loss_trace_csv(trace, r.loss_trace);
    w.file("loss_trace_" + name + ".csv", trace.str());
    append_manifest(w.dir, {"train",
                            {{"toy", to_json(cfg)["toy"]}, {"kind", loss_kind_name(kind)}, {"lambda", lambda}},
                            seed, kToolVersion, w.outputs});
    if (g.format == "json") {
      out << Json{{"loss", loss_kind_name(kind)}, {"lambda", lambda}, {"seed", seed},
                  {"icc", r.heldout.icc}, {"eer", r.heldout.eer}, {"min_dcf", r.heldout.min_dcf}}.dump(2) << '\n';
    } else {
      out << "loss,lambda,seed,icc,eer,min_dcf\n"
          << loss_kind_name(kind) << ',' << format_double(lambda) << ',' << seed << ','
          << format_double(r.heldout.icc) << ',' << format_double(r.heldout.eer) << ','
          << format_double(r.heldout.min_dcf) << '\n';
    }
    return kExitOk;
  }

  if (g.seed) {
    // Consecutive seeds from the given one, as many as configured.
    for (std::size_t k = 0; k < toy.seeds.size(); ++k) toy.seeds[k] = *g.seed + k;
  }
  const Comparison c = compare_regularization(toy, resolve_threads(g));
  for (const RunOutcome& r : c.runs) {
    if (r.report) w.file("reports/" + report_name(r.kind, r.lambda, r.seed) + ".json", to_json(*r.report).dump(2) + "\n");
  }
  w.file("summary.md", summary_markdown(c));
  w.file("summary.csv", summary_csv(c));
  append_manifest(w.dir, {"train --compare", {{"toy", to_json(cfg)["toy"]}}, toy.seeds.front(), kToolVersion,
                          w.outputs});
  if (g.format == "json") {
    Json rows = Json::array();
    for (const SummaryRow& r : c.rows) {
      rows.push_back({{"loss", loss_kind_name(r.kind)}, {"regularized", r.regularized}, {"lambda", r.lambda},
                      {"median_icc", r.median_icc}, {"median_eer", r.median_eer},
                      {"median_min_dcf", r.median_min_dcf}, {"n_runs", r.n_runs}});
    }
    out << rows.dump(2) << '\n';
  } else {
    out << summary_csv(c);
  }
  if (c.n_failed > 0) {
    err << c.n_failed << " of " << c.runs.size() << " runs failed:\n";
    for (const RunOutcome& r : c.runs) {
      if (!r.report) err << "  " << report_name(r.kind, r.lambda, r.seed) << ": " << r.error << '\n';
    }
    return kExitPartial;
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Repeatability experiments: ICC statistics, variance landscapes, SVM probes and toy training."};
  app.name("icc-lab");
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Seed override (64-bit)");
  app.add_option("--threads", g.threads, "Worker threads: a positive integer or 'auto' (default: ICC_LAB_THREADS, else auto)");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--format", g.format, "Console output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  IccArgs icc;
  auto* c_icc = app.add_subcommand("icc", "ICC(1,1) of an embedding batch CSV");
  c_icc->add_option("input", icc.input, "Batch CSV (class_id,sample_id,e_0,...)")->required();
  c_icc->add_option("--mode", icc.mode)->check(CLI::IsMember({"balanced", "imbalanced", "auto"}))->capture_default_str();
  c_icc->add_flag("--strict", icc.strict, "Reject zero denominators instead of adding epsilon");

  LandscapeArgs land;
  auto* c_land = app.add_subcommand("landscape", "Loss surface over the intra/inter variance grid");
  c_land->add_option("config", land.config, "Experiment JSON (defaults when omitted)");
  c_land->add_option("--loss", land.loss, "ge2e, angleproto, supcon, icc or combined")->capture_default_str();
  c_land->add_option("--lambda", land.lambda, "Weight of the regularizer for --loss combined")->capture_default_str();
  c_land->add_flag("--shared-batches,!--independent-batches", land.shared_batches,
                   "Evaluate both terms of a combined loss on the same draws");

  PathsArgs paths;
  auto* c_paths = app.add_subcommand("paths", "Steepest-descent paths on a grid CSV");
  c_paths->add_option("grid", paths.grid, "Grid CSV")->required();
  c_paths->add_option("--config", paths.config, "Experiment JSON whose paths section gives the defaults");
  c_paths->add_option("--starts", paths.starts, "'intra,inter;intra,inter;...' (default: paths.starts)");
  c_paths->add_option("--step", paths.step, "Step length (default: paths.step; 0 selects half the smaller axis step)");
  c_paths->add_option("--max-steps", paths.max_steps, "Step limit per path (default: paths.max_steps)");

  SvmArgs svm;
  auto* c_svm = app.add_subcommand("svm-contour", "Linear SVM error rate over the variance grid");
  c_svm->add_option("config", svm.config, "Experiment JSON (defaults when omitted)");
  c_svm->add_option("--compare-grid", svm.compare_grid,
                    "Grid CSV to rank-correlate against (default: <out>/landscape_icc.csv when present)");

  SweepArgs sweep;
  auto* c_sweep = app.add_subcommand("sweep", "(1 - lambda) GE2E + lambda R_ICC surfaces");
  c_sweep->add_option("config", sweep.config, "Experiment JSON (defaults when omitted)");
  c_sweep->add_option("--lambdas", sweep.lambdas, "Comma-separated values in [0, 1]")->delimiter(',');
  c_sweep->add_flag("--shared-batches,!--independent-batches", sweep.shared_batches,
                    "Evaluate both terms on the same draws");

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "Toy encoder training and the with/without-regularizer comparison");
  c_train->add_option("config", train.config, "Experiment JSON (defaults when omitted)");
  c_train->add_flag("--compare", train.compare, "Every loss, lambda and seed, with a summary table");
  c_train->add_option("--kind", train.kind, "Contrastive loss of a single run");
  c_train->add_option("--lambda", train.lambda, "Regularizer weight of a single run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitParse;
  }

  try {
    if (*c_icc) return cmd_icc(g, icc, out, err);
    if (*c_land) return cmd_landscape(g, land, out);
    if (*c_paths) return cmd_paths(g, paths, out, err);
    if (*c_svm) return cmd_svm_contour(g, svm, out);
    if (*c_sweep) return cmd_sweep(g, sweep, out);
    if (*c_train) return cmd_train(g, train, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitParse;
  }
  return kExitParse;
}

}  // namespace icclab
