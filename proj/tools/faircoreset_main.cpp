#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "faircoreset/harness.hpp"
#include "faircoreset/pipeline.hpp"

using namespace faircoreset;

namespace {

struct InputOpts {
  std::string input;
  std::vector<std::string> features;
  std::vector<std::string> groups;
  bool normalize = false;
};

void add_input_opts(CLI::App* cmd, InputOpts& io, bool required = true) {
  auto* in = cmd->add_option("--input", io.input, "dataset CSV path");
  if (required) in->required();
  cmd->add_option("--features", io.features, "feature column names")
      ->delimiter(',')
      ->required(required);
  cmd->add_option("--groups", io.groups, "categorical group column names")->delimiter(',');
  cmd->add_flag("--normalize", io.normalize, "min-max normalize features to [0,1]");
}

Dataset load_dataset(const InputOpts& io, int* dropped = nullptr) {
  BenchConfig cfg;
  cfg.input = io.input;
  cfg.feature_columns = io.features;
  cfg.group_columns = io.groups;
  CsvLoad loaded = load_csv(cfg);
  if (dropped) *dropped = loaded.dropped_rows;
  return io.normalize ? normalize_minmax(loaded.dataset) : loaded.dataset;
}

int run_build(const InputOpts& io, const CoresetParams& params, const std::string& output) {
  int dropped = 0;
  Dataset data = load_dataset(io, &dropped);
  CoresetArtifact art = build_fair_coreset(data, params);
  save_coreset(art, output);
  double total_ms = 0.0;
  for (const auto& l : art.build_log) total_ms += l.elapsed_ms;
  std::printf("coreset: %zu points from %zu (gamma=%d, dropped rows=%d)\n",
              art.points.size(), data.size(), data.gamma(), dropped);
  for (const auto& l : art.build_log)
    std::printf("  profile %d: n=%d opt=%.6g lines=%d batches=%d points=%d%s\n", l.profile,
                l.n, l.opt_estimate, l.m_lines, l.batch_count, l.points_emitted,
                l.degenerate ? " (degenerate)" : "");
  std::printf("build time: %.1f ms; wrote %s and %s.json\n", total_ms, output.c_str(),
              output.c_str());
  return 0;
}

int run_eval(const InputOpts& io, const std::string& coreset_path,
             const std::string& constraint_path, const std::string& centers_path, int z) {
  ProfileConstraint f = load_constraint_csv(constraint_path);
  CenterSet c = load_centers_csv(centers_path);
  WeightedPointSet set;
  if (!coreset_path.empty()) {
    set = load_coreset(coreset_path).points;
  } else {
    set = as_weighted(load_dataset(io));
  }
  AssignmentPlan plan = evaluate_objective(set, f, c, z);
  std::printf("%.17g\n", plan.objective);
  return 0;
}

int run_bench(BenchConfig& cfg) {
  BenchReport report = run_benchmark(cfg);
  std::printf("n=%d d=%d gamma=%d groups=%d dropped=%d trials=%d\n", report.n, report.dim,
              report.gamma, report.group_count, report.dropped_rows, cfg.trials);
  std::printf("%8s %8s %12s %12s %10s %10s %10s\n", "epsilon", "size", "err_ours",
              "err_uniform", "T_S(ms)", "T_C(ms)", "T_X(ms)");
  for (const auto& r : report.rows)
    std::printf("%8.3f %8d %11.3f%% %11.3f%% %10.2f %10.2f %10.2f\n", r.epsilon, r.size,
                100.0 * r.err_ours, 100.0 * r.err_uniform, r.t_s_ms, r.t_c_ms, r.t_x_ms);
  if (!cfg.output.empty())
    std::printf("wrote %s.json and %s.csv\n", cfg.output.c_str(), cfg.output.c_str());
  return 0;
}

int run_validate(const InputOpts& io, const std::string& artifact_path) {
  Dataset data = load_dataset(io);
  CoresetArtifact art = load_coreset(artifact_path);
  std::vector<std::string> issues;

  if (art.source_checksum != 0 && art.source_checksum != dataset_checksum(data))
    issues.push_back("checksum mismatch: artifact was built from a different dataset");
  for (std::size_t i = 0; i < art.points.size(); ++i) {
    if (!(art.points.weights[i] > 0.0))
      issues.push_back("point " + std::to_string(i) + ": nonpositive weight");
    if (art.points.points[i].dim() != data.dim())
      issues.push_back("point " + std::to_string(i) + ": dimension mismatch");
    for (double v : art.points.points[i].coords)
      if (!std::isfinite(v)) {
        issues.push_back("point " + std::to_string(i) + ": non-finite coordinate");
        break;
      }
    int t = art.points.profile_of[i];
    if (t < 0 || t >= data.gamma())
      issues.push_back("point " + std::to_string(i) + ": profile id out of range");
  }
  std::vector<double> want = data.profile_masses();
  std::vector<double> have = art.points.profile_masses(data.gamma());
  for (int t = 0; t < data.gamma(); ++t)
    if (std::abs(want[static_cast<std::size_t>(t)] - have[static_cast<std::size_t>(t)]) >
        1e-9 * std::max(want[static_cast<std::size_t>(t)], 1.0))
      issues.push_back("profile " + std::to_string(t) + ": weight not conserved (" +
                       std::to_string(have[static_cast<std::size_t>(t)]) + " vs " +
                       std::to_string(want[static_cast<std::size_t>(t)]) + ")");
  for (const auto& l : art.build_log)
    if (!l.degenerate && l.budget > 0.0 && l.projection_cost > l.budget * (1.0 + 1e-9))
      issues.push_back("profile " + std::to_string(l.profile) +
                       ": projection cost exceeds the line budget");

  if (issues.empty()) {
    std::printf("OK: %zu coreset points validate against %zu dataset points\n",
                art.points.size(), data.size());
    return 0;
  }
  for (const auto& s : issues) std::fprintf(stderr, "violation: %s\n", s.c_str());
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coresets for fair k-median/k-means clustering under assignment constraints"};
  app.require_subcommand(1);

  InputOpts build_io;
  CoresetParams params;
  std::string build_output;
  auto* build = app.add_subcommand("build", "construct a coreset artifact from a dataset CSV");
  add_input_opts(build, build_io);
  build->add_option("--k", params.k, "number of clusters")->required();
  build->add_option("--z", params.z, "1 = k-median, 2 = k-means")->required();
  build->add_option("--epsilon", params.epsilon, "target relative error in (0,1)")->required();
  build->add_option("--seed", params.seed, "RNG seed");
  build->add_option("--scale", params.projection_budget_scale,
                    "projection budget scale for z=2");
  build->add_option("--output", build_output, "artifact CSV path")->required();

  InputOpts eval_io;
  std::string eval_coreset, eval_constraint, eval_centers;
  int eval_z = 1;
  auto* eval = app.add_subcommand("eval", "evaluate the fair clustering objective exactly");
  add_input_opts(eval, eval_io, false);
  eval->add_option("--coreset", eval_coreset, "coreset artifact CSV (alternative to --input)");
  eval->add_option("--constraint", eval_constraint, "constraint CSV (cluster,profile,mass)")
      ->required();
  eval->add_option("--centers", eval_centers, "centers CSV (one row per center)")->required();
  eval->add_option("--z", eval_z, "1 = k-median, 2 = k-means")->required();

  BenchConfig bench_cfg;
  auto* bench = app.add_subcommand("bench", "run the accuracy/time benchmark protocol");
  bench->add_option("--input", bench_cfg.input, "dataset CSV path")->required();
  bench->add_option("--features", bench_cfg.feature_columns, "feature column names")
      ->delimiter(',')
      ->required();
  bench->add_option("--groups", bench_cfg.group_columns, "categorical group column names")
      ->delimiter(',');
  bench->add_option("--k", bench_cfg.k, "number of clusters");
  bench->add_option("--z", bench_cfg.z, "1 = k-median, 2 = k-means");
  bench->add_option("--epsilons", bench_cfg.epsilons, "epsilon values")
      ->delimiter(',')
      ->required();
  bench->add_option("--trials", bench_cfg.trials, "number of (F,C) samples per row");
  bench->add_flag("--normalize", bench_cfg.normalize, "min-max normalize features");
  bench->add_option("--seed", bench_cfg.seed, "RNG seed");
  bench->add_option("--scale", bench_cfg.projection_budget_scale,
                    "projection budget scale for z=2");
  bench->add_option("--output", bench_cfg.output, "report path stem (writes .json and .csv)");

  InputOpts val_io;
  std::string val_artifact;
  auto* validate = app.add_subcommand("validate", "check artifact invariants against a dataset");
  add_input_opts(validate, val_io);
  validate->add_option("--artifact", val_artifact, "coreset artifact CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (build->parsed()) return run_build(build_io, params, build_output);
    if (eval->parsed()) {
      if (eval_coreset.empty() && eval_io.input.empty())
        throw std::runtime_error("eval needs --coreset or --input");
      if (eval_coreset.empty() && eval_io.features.empty())
        throw std::runtime_error("eval on a dataset needs --features");
      return run_eval(eval_io, eval_coreset, eval_constraint, eval_centers, eval_z);
    }
    if (bench->parsed()) return run_bench(bench_cfg);
    if (validate->parsed()) return run_validate(val_io, val_artifact);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
