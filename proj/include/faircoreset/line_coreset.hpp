#pragma once

#include <span>
#include <utility>
#include <vector>

#include "faircoreset/core.hpp"

namespace faircoreset {

/// Points of one line, stored as sorted scalar positions plus the affine
/// map (origin + position * direction) back into the ambient space.
struct LineDataset {
  std::vector<double> positions;     // sorted ascending
  Point origin;
  std::vector<double> direction;     // unit norm
  std::vector<int> source_indices;   // per position, index into the parent set

  std::size_t size() const { return positions.size(); }
};

/// Contiguous index range [begin, end) of a LineDataset with its moment stats.
struct Batch {
  int begin = 0;
  int end = 0;
  double mean = 0.0;
  double err = 0.0;  // Delta_z of the batch

  int count() const { return end - begin; }
};

/// Left-to-right greedy maximal batches: a batch keeps absorbing the next
/// point while Delta_z stays <= xi (equality keeps extending).
std::vector<Batch> partition_batches(const LineDataset& l, double xi, int z);

/// One weighted point per batch (batch mean, weight |B|) with
/// xi = epsilon * opt_estimate / (30 k). Output points are 1-D positions.
WeightedPointSet median_line_coreset(const LineDataset& l, int k, double opt_estimate,
                                     double epsilon);

/// At most two weighted points inside [min, max] matching the batch's total
/// weight, mean and second moment exactly. Zero-variance batches collapse to
/// a single point.
std::vector<std::pair<double, double>> two_point_moment_match(std::span<const double> batch);

/// Two points per batch via two_point_moment_match with
/// xi = epsilon^2 * opt_estimate / (200 k^2). Output points are 1-D positions.
WeightedPointSet means_line_coreset(const LineDataset& l, int k, double opt_estimate,
                                    double epsilon);

/// Map 1-D coreset positions back onto the line in ambient coordinates.
Point lift_to_ambient(const LineDataset& l, double position);

}  // namespace faircoreset
