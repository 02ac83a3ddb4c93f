#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "faircoreset/core.hpp"

namespace faircoreset {

/// Per-profile construction record kept with the artifact.
struct ProfileBuildLog {
  int profile = 0;
  int n = 0;
  double opt_estimate = 0.0;
  double budget = 0.0;           // line projection budget (0 on degenerate path)
  int m_lines = 0;
  double projection_cost = 0.0;
  int rejected_m = 0;            // line count that last violated the budget
  double rejected_cost = 0.0;
  int fallback_lines = 0;
  int batch_count = 0;
  int points_emitted = 0;
  bool degenerate = false;       // opt 0: emitted distinct locations directly
  double elapsed_ms = 0.0;

  bool operator==(const ProfileBuildLog&) const = default;
};

struct CoresetArtifact {
  WeightedPointSet points;
  CoresetParams params;
  std::string method;            // "fair" or "uniform"
  std::vector<ProfileBuildLog> build_log;
  std::uint64_t source_checksum = 0;

  bool operator==(const CoresetArtifact&) const = default;
};

/// True when two artifacts describe the same build, ignoring wall-clock
/// fields (used by determinism checks).
bool same_build(const CoresetArtifact& a, const CoresetArtifact& b);

/// Order-independent fingerprint of points, profile tags and group layout.
std::uint64_t dataset_checksum(const Dataset& d);

/// The profile-decomposed construction: per profile class, estimate the
/// unconstrained optimum, build lines within the projection budget, project,
/// run the 1-D coreset per line and lift the result back. Output points are
/// tagged with their source profile; per-profile weight is conserved.
CoresetArtifact build_fair_coreset(const Dataset& d, const CoresetParams& params);

/// Baseline: per-profile uniform samples, sizes by largest-remainder
/// proportional rounding (at least one per class), weights n_t / s_t.
CoresetArtifact uniform_coreset(const Dataset& d, int total_size, std::uint64_t seed);

/// CSV points file (header `weight,profile,feature_0..`) plus a JSON sidecar
/// `<path>.json` carrying params, build log and checksum. Doubles are printed
/// with 17 significant digits so round-trips are exact.
void save_coreset(const CoresetArtifact& a, const std::string& path);

/// Inverse of save_coreset. Malformed rows raise errors naming the line.
CoresetArtifact load_coreset(const std::string& path);

}  // namespace faircoreset
