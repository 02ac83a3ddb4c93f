#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "faircoreset/core.hpp"
#include "faircoreset/fairflow.hpp"
#include "faircoreset/pipeline.hpp"

namespace faircoreset {

struct BenchConfig {
  std::string input;
  std::vector<std::string> feature_columns;
  std::vector<std::string> group_columns;  // categorical; one group per category
  int k = 3;
  int z = 1;
  std::vector<double> epsilons;
  int trials = 500;
  bool normalize = false;
  std::uint64_t seed = 0;
  double projection_budget_scale = 1.0;
  std::string output;  // report path stem; empty = no files

  bool operator==(const BenchConfig&) const = default;
};

struct CsvLoad {
  Dataset dataset;
  int dropped_rows = 0;  // rows with missing or non-numeric selected values
  std::vector<std::string> group_labels;  // "<column>=<category>" per group id
};

/// Parse the configured CSV: feature columns as doubles, group columns as
/// categories (a point's profile is its category set across columns).
/// Throws "column not found: <name>" and errors on zero usable rows.
CsvLoad load_csv(const BenchConfig& config);

/// Per-dimension affine map onto [0,1]; constant dimensions map to 0.
Dataset normalize_minmax(const Dataset& d);

/// Uniformly random composition of each profile's mass into k nonnegative
/// integer parts (stars and bars); always feasible for the given masses.
ProfileConstraint sample_constraint(const std::vector<double>& profile_masses, int k,
                                    std::uint64_t seed);
ProfileConstraint sample_constraint(const Dataset& d, int k, std::uint64_t seed);
ProfileConstraint sample_constraint(const WeightedPointSet& s, int gamma, int k,
                                    std::uint64_t seed);

/// k distinct data points drawn uniformly without replacement.
CenterSet sample_centers(const Dataset& d, int k, std::uint64_t seed);

struct EmpiricalErrorResult {
  double max_err = 0.0;
  std::vector<double> errors;  // per kept trial
  double t_x_ms = 0.0;         // mean evaluation time on the full set
  double t_s_ms = 0.0;         // mean evaluation time on the coreset
  int skipped = 0;             // trials with zero full-set objective
};

/// max over sampled (F, C) of |K_z(S,F,C)/K_z(X,F,C) - 1|. Trials share the
/// per-trial seed (seed xor trial index) so runs are reproducible and
/// parallel/serial results agree. Throws when every trial degenerates.
EmpiricalErrorResult empirical_error(const Dataset& x, const WeightedPointSet& s, int k, int z,
                                     int trials, std::uint64_t seed);

struct BenchRow {
  double epsilon = 0.0;
  int size = 0;
  double err_ours = 0.0;
  double err_uniform = 0.0;
  double t_s_ms = 0.0;
  double t_c_ms = 0.0;
  double t_x_ms = 0.0;
  int trials = 0;
  int skipped_ours = 0;
  int skipped_uniform = 0;

  bool operator==(const BenchRow&) const = default;
};

struct BenchReport {
  BenchConfig config;
  int n = 0;
  int dim = 0;
  int gamma = 0;
  int group_count = 0;
  int dropped_rows = 0;
  std::string note;  // sampling conventions
  std::vector<BenchRow> rows;

  bool operator==(const BenchReport&) const = default;
};

/// The full protocol: build our coreset per epsilon (timed), size-match the
/// uniform baseline, measure both empirical errors on shared (F, C) samples,
/// and emit one row per epsilon. Writes `<output>.json` and `<output>.csv`
/// when an output stem is configured.
BenchReport run_benchmark(const BenchConfig& config);

std::string report_to_json(const BenchReport& r);
BenchReport report_from_json(const std::string& text);
std::string report_to_csv(const BenchReport& r);

/// Constraint file for `eval`: CSV with header `cluster,profile,mass`, one
/// row per nonzero quota. Cluster/profile counts come from the maxima seen.
ProfileConstraint load_constraint_csv(const std::string& path);

/// Center file for `eval`: header row plus one row of d feature values per
/// center.
CenterSet load_centers_csv(const std::string& path);

}  // namespace faircoreset
