#pragma once

#include <vector>

#include "faircoreset/core.hpp"

namespace faircoreset {

/// Per-cluster, per-profile mass quotas. quotas[i][t] is the mass of profile
/// t that cluster i must receive; a column must sum to the total weight of
/// its profile in the evaluated set.
struct ProfileConstraint {
  std::vector<std::vector<double>> quotas;  // k rows, Gamma columns

  int k() const { return static_cast<int>(quotas.size()); }
  int profile_count() const { return quotas.empty() ? 0 : static_cast<int>(quotas[0].size()); }
  std::vector<double> column_sums() const;
};

struct FlowEntry {
  int point;     // index into the evaluated set
  int cluster;
  double mass;
};

/// Optimal (possibly fractional) assignment and its objective value.
struct AssignmentPlan {
  std::vector<FlowEntry> flows;
  double objective = 0.0;
};

struct TransportResult {
  std::vector<std::vector<double>> flow;  // m x k
  double cost = 0.0;
};

/// Exact minimum-cost transportation plan for an m x k cost matrix.
/// Successive shortest paths with potentials; integral inputs yield an
/// integral flow. Throws "unbalanced" when sums differ by more than 1e-9
/// relative, and rejects negative or non-finite entries.
TransportResult solve_transportation(const std::vector<std::vector<double>>& costs,
                                     const std::vector<double>& supplies,
                                     const std::vector<double>& demands);

/// Optimal fair (k,z)-clustering value of S under constraint F and centers C.
/// The problem decomposes into one transportation subproblem per profile;
/// plans are merged in profile order. Throws std::invalid_argument
/// ("infeasible constraint") when a quota column does not balance the
/// profile's mass.
AssignmentPlan evaluate_objective(const WeightedPointSet& s, const ProfileConstraint& f,
                                  const CenterSet& c, int z);

/// Test oracle: exact minimum over all integral assignments respecting F.
/// Guarded to n <= 12 and unit weights.
double brute_force_objective(const Dataset& x, const ProfileConstraint& f,
                             const CenterSet& c, int z);

/// Collapse profile-level quotas to the k x l group-level matrix:
/// F_group[i][j] = sum over profiles t containing group j of quotas[i][t].
/// Requires integral quotas.
std::vector<std::vector<long long>> group_level_view(const ProfileConstraint& f,
                                                     const std::vector<GroupProfile>& profiles,
                                                     int l);

}  // namespace faircoreset
