#include "faircoreset/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace faircoreset {

bool GroupProfile::contains(int group) const {
  return std::binary_search(member_groups.begin(), member_groups.end(), group);
}

std::vector<double> Dataset::profile_masses() const {
  std::vector<double> m(profiles.size(), 0.0);
  for (int p : profile_of) m[static_cast<std::size_t>(p)] += 1.0;
  return m;
}

double WeightedPointSet::total_weight() const {
  double t = 0.0;
  for (double w : weights) t += w;
  return t;
}

std::vector<double> WeightedPointSet::profile_masses(int gamma) const {
  std::vector<double> m(static_cast<std::size_t>(gamma), 0.0);
  for (std::size_t i = 0; i < weights.size(); ++i)
    m[static_cast<std::size_t>(profile_of[i])] += weights[i];
  return m;
}

void check_params(const CoresetParams& p) {
  if (!(p.epsilon > 0.0 && p.epsilon < 1.0))
    throw std::invalid_argument("epsilon must be in (0,1)");
  if (p.k < 1) throw std::invalid_argument("k must be positive");
  if (p.z != 1 && p.z != 2) throw std::invalid_argument("z must be 1 or 2");
  if (!(p.projection_budget_scale > 0.0))
    throw std::invalid_argument("projection_budget_scale must be positive");
}

double sq_dist(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.coords.size(); ++i) {
    double d = a.coords[i] - b.coords[i];
    s += d * d;
  }
  return s;
}

double dist(const Point& a, const Point& b) { return std::sqrt(sq_dist(a, b)); }

double dist_pow(const Point& a, const Point& b, int z) {
  return z == 2 ? sq_dist(a, b) : dist(a, b);
}

Point weighted_mean(const WeightedPointSet& s) {
  double total = s.total_weight();
  if (s.points.empty() || total <= 0.0) throw std::invalid_argument("empty set");
  Point mean;
  mean.coords.assign(s.points[0].dim(), 0.0);
  for (std::size_t i = 0; i < s.points.size(); ++i)
    for (std::size_t j = 0; j < mean.coords.size(); ++j)
      mean.coords[j] += s.weights[i] * s.points[i].coords[j];
  for (double& c : mean.coords) c /= total;
  return mean;
}

double moment_error(const WeightedPointSet& s, int z) {
  Point mean = weighted_mean(s);
  double err = 0.0;
  for (std::size_t i = 0; i < s.points.size(); ++i)
    err += s.weights[i] * dist_pow(s.points[i], mean, z);
  return err;
}

std::vector<std::string> validate_dataset(const Dataset& d) {
  std::vector<std::string> issues;
  std::size_t dim = d.dim();
  for (std::size_t i = 0; i < d.points.size(); ++i) {
    if (d.points[i].dim() != dim)
      issues.push_back("point " + std::to_string(i) + ": dimension mismatch");
    for (double c : d.points[i].coords)
      if (!std::isfinite(c)) {
        issues.push_back("point " + std::to_string(i) + ": non-finite coordinate");
        break;
      }
  }
  if (d.profile_of.size() != d.points.size())
    issues.push_back("profile_of size does not match point count");
  std::vector<int> hits(d.profiles.size(), 0);
  for (std::size_t i = 0; i < d.profile_of.size(); ++i) {
    int p = d.profile_of[i];
    if (p < 0 || p >= d.gamma())
      issues.push_back("point " + std::to_string(i) + ": profile id out of range");
    else
      ++hits[static_cast<std::size_t>(p)];
  }
  for (std::size_t t = 0; t < d.profiles.size(); ++t) {
    const auto& g = d.profiles[t].member_groups;
    if (g.empty()) issues.push_back("profile " + std::to_string(t) + ": empty group set");
    if (!std::is_sorted(g.begin(), g.end()) ||
        std::adjacent_find(g.begin(), g.end()) != g.end())
      issues.push_back("profile " + std::to_string(t) + ": groups not sorted unique");
    for (int gi : g)
      if (gi < 0 || gi >= d.group_count)
        issues.push_back("profile " + std::to_string(t) + ": group index out of range");
    if (hits[t] == 0) issues.push_back("profile " + std::to_string(t) + ": no points");
  }
  for (std::size_t t = 0; t < d.profiles.size(); ++t)
    for (std::size_t u = t + 1; u < d.profiles.size(); ++u)
      if (d.profiles[t] == d.profiles[u])
        issues.push_back("profiles " + std::to_string(t) + " and " + std::to_string(u) +
                         " are duplicates");
  return issues;
}

WeightedPointSet as_weighted(const Dataset& d) {
  WeightedPointSet s;
  s.points = d.points;
  s.weights.assign(d.points.size(), 1.0);
  s.profile_of = d.profile_of;
  return s;
}

}  // namespace faircoreset
