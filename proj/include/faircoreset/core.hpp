#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace faircoreset {

/// A point in R^d. Coordinates are plain doubles in feature units.
struct Point {
  std::vector<double> coords;

  Point() = default;
  explicit Point(std::vector<double> c) : coords(std::move(c)) {}
  Point(std::initializer_list<double> c) : coords(c) {}

  std::size_t dim() const { return coords.size(); }
  double operator[](std::size_t i) const { return coords[i]; }
  double& operator[](std::size_t i) { return coords[i]; }

  bool operator==(const Point& o) const { return coords == o.coords; }
};

/// The sorted set of group indices a point belongs to. Two profiles are the
/// same profile iff their sets are equal.
struct GroupProfile {
  std::vector<int> member_groups;  // sorted ascending, unique, each < l

  bool operator==(const GroupProfile& o) const { return member_groups == o.member_groups; }
  bool contains(int group) const;
};

/// n points, each tagged with the id of its (deduplicated) group profile.
struct Dataset {
  std::vector<Point> points;
  std::vector<int> profile_of;          // per point, index into profiles
  std::vector<GroupProfile> profiles;   // distinct profiles, size Gamma
  int group_count = 0;                  // l

  std::size_t size() const { return points.size(); }
  std::size_t dim() const { return points.empty() ? 0 : points[0].dim(); }
  int gamma() const { return static_cast<int>(profiles.size()); }

  /// Point counts per profile class, indexed by profile id.
  std::vector<double> profile_masses() const;
};

/// Points with positive real weights; the working representation of a coreset.
struct WeightedPointSet {
  std::vector<Point> points;
  std::vector<double> weights;
  std::vector<int> profile_of;

  std::size_t size() const { return points.size(); }
  double total_weight() const;
  std::vector<double> profile_masses(int gamma) const;

  bool operator==(const WeightedPointSet& o) const {
    return points == o.points && weights == o.weights && profile_of == o.profile_of;
  }
};

struct CenterSet {
  std::vector<Point> centers;

  int k() const { return static_cast<int>(centers.size()); }
};

struct CoresetParams {
  double epsilon = 0.1;               // in (0,1)
  int k = 1;
  int z = 1;                          // 1 = k-median, 2 = k-means
  std::uint64_t seed = 0;
  double projection_budget_scale = 1.0;

  bool operator==(const CoresetParams& o) const {
    return epsilon == o.epsilon && k == o.k && z == o.z && seed == o.seed &&
           projection_budget_scale == o.projection_budget_scale;
  }
};

/// Throws std::invalid_argument if the fields are out of range.
void check_params(const CoresetParams& p);

double sq_dist(const Point& a, const Point& b);
double dist(const Point& a, const Point& b);
/// d(a,b)^z for z in {1,2}.
double dist_pow(const Point& a, const Point& b, int z);

/// Weight-normalized centroid: sum w(p)*p / sum w(p).
/// Throws std::invalid_argument("empty set") on empty or zero-weight input.
Point weighted_mean(const WeightedPointSet& s);

/// sum w(p) * d(p, mean)^z. Same error behaviour as weighted_mean.
double moment_error(const WeightedPointSet& s, int z);

/// Diagnostic pass over a dataset; returns one message per violation,
/// empty on valid input. Never throws.
std::vector<std::string> validate_dataset(const Dataset& d);

/// View a dataset as a unit-weight point set.
WeightedPointSet as_weighted(const Dataset& d);

}  // namespace faircoreset
