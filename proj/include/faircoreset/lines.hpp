#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "faircoreset/core.hpp"
#include "faircoreset/line_coreset.hpp"

namespace faircoreset {

/// An (infinite) line: origin + t * direction, ||direction|| = 1.
struct Line {
  Point origin;
  std::vector<double> direction;
};

struct ProjectionEntry {
  int line = 0;          // index of the nearest line (ties -> lowest index)
  double position = 0.0; // signed offset along the line
  double residual = 0.0; // distance from the point to its projection
};

using ProjectionMap = std::vector<ProjectionEntry>;

struct ApproxClustering {
  CenterSet centers;
  std::vector<int> assignment;  // per point, nearest-center index
  double cost = 0.0;            // unconstrained K_z(X, centers)
};

/// Constant-factor heuristic clustering used only for OPT upper bounds:
/// greedy d^z seeding plus Lloyd refinement (mean updates for z=2,
/// coordinate-wise median for z=1). Deterministic given the seed.
ApproxClustering approx_cluster(std::span<const Point> pts, int k, int z, std::uint64_t seed);

/// Line through the weighted centroid along the top principal direction;
/// minimizes the weighted sum of squared point-line distances. Pass an empty
/// weights span for unit weights.
Line fit_principal_line(std::span<const Point> pts, std::span<const double> weights);

struct LineBuildResult {
  std::vector<Line> lines;
  double projection_cost = 0.0;  // sum of residual^{z'} over points, z' = z
  double budget = 0.0;
  int rejected_m = 0;            // last line count that violated the budget
  double rejected_cost = 0.0;
  int fallback_lines = 0;        // per-point rescue lines added after net caps
};

/// Finds lines whose total projection cost (residual for z=1, squared
/// residual for z=2) is within the budget. z=2 doubles the line count with a
/// line-Lloyd refit until the budget holds; z=1 grows adaptive rays from the
/// approximate cluster centers with an explicit direction net as fallback.
LineBuildResult build_lines(std::span<const Point> pts, int k, int z, double budget,
                            double epsilon, std::uint64_t seed);

struct ProjectionResult {
  std::vector<LineDataset> per_line;  // aligned with the input line list
  ProjectionMap map;                  // aligned with the input points
};

/// Assign every point to its nearest line and record sorted per-line
/// positions (ties on distance go to the lowest line index).
ProjectionResult project(std::span<const Point> pts, const std::vector<Line>& lines);

}  // namespace faircoreset
