#include <doctest.h>

#include <cmath>

#include "faircoreset/fairflow.hpp"
#include "faircoreset/rng.hpp"
#include "oracles.hpp"

using namespace faircoreset;

namespace {

ProfileConstraint quotas(std::vector<std::vector<double>> q) { return ProfileConstraint{std::move(q)}; }

CenterSet centers_1d(std::vector<double> xs) {
  CenterSet c;
  for (double x : xs) c.centers.push_back(Point{x});
  return c;
}

// Random instance for the oracle-equivalence property.
struct SmallInstance {
  Dataset x;
  ProfileConstraint f;
  CenterSet c;
  int z;
};

SmallInstance random_instance(Rng& rng, int max_n, int max_k, int max_gamma) {
  SmallInstance inst;
  std::size_t n = 1 + rng.below(static_cast<std::uint64_t>(max_n));
  int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_k)));
  int gamma = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_gamma)));
  if (gamma > static_cast<int>(n)) gamma = static_cast<int>(n);
  std::size_t dim = 1 + rng.below(2);
  inst.z = 1 + static_cast<int>(rng.below(2));
  for (std::size_t i = 0; i < n; ++i) {
    Point p;
    for (std::size_t j = 0; j < dim; ++j) p.coords.push_back(rng.uniform01() * 8 - 4);
    inst.x.points.push_back(std::move(p));
    inst.x.profile_of.push_back(i < static_cast<std::size_t>(gamma)
                                    ? static_cast<int>(i)
                                    : static_cast<int>(rng.below(static_cast<std::uint64_t>(gamma))));
  }
  for (int t = 0; t < gamma; ++t) inst.x.profiles.push_back(GroupProfile{{t}});
  inst.x.group_count = gamma;

  inst.f.quotas.assign(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(gamma), 0.0));
  std::vector<double> masses = inst.x.profile_masses();
  for (int t = 0; t < gamma; ++t) {
    long long left = static_cast<long long>(masses[static_cast<std::size_t>(t)]);
    for (int i = 0; i < k - 1; ++i) {
      long long take = static_cast<long long>(rng.below(static_cast<std::uint64_t>(left + 1)));
      inst.f.quotas[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] = static_cast<double>(take);
      left -= take;
    }
    inst.f.quotas[static_cast<std::size_t>(k) - 1][static_cast<std::size_t>(t)] = static_cast<double>(left);
  }
  for (int i = 0; i < k; ++i) {
    Point p;
    for (std::size_t j = 0; j < dim; ++j) p.coords.push_back(rng.uniform01() * 8 - 4);
    inst.c.centers.push_back(std::move(p));
  }
  return inst;
}

}  // namespace

TEST_SUITE("fairflow") {

TEST_CASE("solve_transportation forced and brute-checked cases") {
  auto r1 = solve_transportation({{0.0}, {1.0}}, {1, 1}, {2});
  CHECK(r1.cost == doctest::Approx(1.0));

  auto r2 = solve_transportation({{0, 3}, {1, 2}, {3, 0}}, {1, 1, 1}, {2, 1});
  CHECK(r2.cost == doctest::Approx(1.0));  // brute force over the 3 vertex assignments
  CHECK(r2.flow[0][0] == doctest::Approx(1.0));
  CHECK(r2.flow[2][1] == doctest::Approx(1.0));

  auto r3 = solve_transportation({{5, 7}, {2, 9}}, {0, 0}, {0, 0});
  CHECK(r3.cost == 0.0);
  CHECK(r3.flow[0][0] == 0.0);
}

TEST_CASE("solve_transportation input validation") {
  CHECK_THROWS_WITH_AS(solve_transportation({{1.0}}, {2}, {1}), "unbalanced",
                       std::invalid_argument);
  CHECK_THROWS_AS(solve_transportation({{1.0}}, {-1}, {-1}), std::invalid_argument);
  CHECK_THROWS_AS(solve_transportation({{-1.0}}, {1}, {1}), std::invalid_argument);
}

TEST_CASE("solve_transportation returns integral flows for integral inputs") {
  Rng rng(99);
  for (int rep = 0; rep < 60; ++rep) {
    std::size_t m = 1 + rng.below(7), k = 1 + rng.below(4);
    std::vector<std::vector<double>> costs(m, std::vector<double>(k));
    std::vector<double> supplies(m), demands(k, 0.0);
    long long total = 0;
    for (std::size_t i = 0; i < m; ++i) {
      supplies[i] = static_cast<double>(rng.below(4));
      total += static_cast<long long>(supplies[i]);
      for (std::size_t j = 0; j < k; ++j) costs[i][j] = rng.uniform01() * 9;
    }
    long long left = total;
    for (std::size_t j = 0; j + 1 < k; ++j) {
      long long take = static_cast<long long>(rng.below(static_cast<std::uint64_t>(left + 1)));
      demands[j] = static_cast<double>(take);
      left -= take;
    }
    demands[k - 1] = static_cast<double>(left);

    auto res = solve_transportation(costs, supplies, demands);
    for (const auto& row : res.flow)
      for (double fl : row) CHECK(fl == std::round(fl));
    double ref = oracles::spfa_transport_cost(costs, supplies, demands);
    CHECK(res.cost == doctest::Approx(ref).epsilon(1e-9));
  }
}

TEST_CASE("solve_transportation matches the independent solver on fractional data") {
  Rng rng(123);
  for (int rep = 0; rep < 60; ++rep) {
    std::size_t m = 1 + rng.below(40), k = 1 + rng.below(5);
    std::vector<std::vector<double>> costs(m, std::vector<double>(k));
    std::vector<double> supplies(m), demands(k, 0.0);
    double total = 0;
    for (std::size_t i = 0; i < m; ++i) {
      supplies[i] = rng.uniform01() * 2;
      total += supplies[i];
      for (std::size_t j = 0; j < k; ++j) costs[i][j] = rng.uniform01() * 9;
    }
    double left = total;
    for (std::size_t j = 0; j + 1 < k; ++j) {
      double take = rng.uniform01() * left;
      demands[j] = take;
      left -= take;
    }
    demands[k - 1] = left;

    auto res = solve_transportation(costs, supplies, demands);
    double ref = oracles::spfa_transport_cost(costs, supplies, demands);
    CHECK(res.cost == doctest::Approx(ref).epsilon(1e-9));
    // per-supplier outflow = supply, per-consumer inflow = demand
    for (std::size_t i = 0; i < m; ++i) {
      double out = 0;
      for (std::size_t j = 0; j < k; ++j) out += res.flow[i][j];
      CHECK(out == doctest::Approx(supplies[i]).epsilon(1e-9));
    }
    for (std::size_t j = 0; j < k; ++j) {
      double in = 0;
      for (std::size_t i = 0; i < m; ++i) in += res.flow[i][j];
      CHECK(in == doctest::Approx(demands[j]).epsilon(1e-9));
    }
  }
}

TEST_CASE("evaluate_objective line examples") {
  Dataset x = oracles::dataset_from_positions({0, 1, 3});
  WeightedPointSet xw = as_weighted(x);

  auto plan = evaluate_objective(xw, quotas({{2}, {1}}), centers_1d({0, 3}), 1);
  CHECK(plan.objective == doctest::Approx(1.0));

  plan = evaluate_objective(xw, quotas({{3}, {0}}), centers_1d({0, 3}), 2);
  CHECK(plan.objective == doctest::Approx(10.0));

  WeightedPointSet single = oracles::weighted_1d({{5.0, 1.0}});
  plan = evaluate_objective(single, quotas({{1}}), centers_1d({5}), 1);
  CHECK(plan.objective == doctest::Approx(0.0));
  plan = evaluate_objective(single, quotas({{1}}), centers_1d({5}), 2);
  CHECK(plan.objective == doctest::Approx(0.0));
}

TEST_CASE("evaluate_objective rejects infeasible constraints") {
  Dataset x = oracles::dataset_from_positions({0, 1, 3});
  CHECK_THROWS_WITH_AS(
      evaluate_objective(as_weighted(x), quotas({{2}, {2}}), centers_1d({0, 3}), 1),
      "infeasible constraint", std::invalid_argument);
}

TEST_CASE("evaluate_objective plan respects flow conservation") {
  Rng rng(5);
  for (int rep = 0; rep < 30; ++rep) {
    auto inst = random_instance(rng, 10, 3, 2);
    AssignmentPlan plan = evaluate_objective(as_weighted(inst.x), inst.f, inst.c, inst.z);
    std::vector<double> outflow(inst.x.size(), 0.0);
    std::vector<std::vector<double>> inflow(static_cast<std::size_t>(inst.f.k()),
                                            std::vector<double>(static_cast<std::size_t>(inst.x.gamma()), 0.0));
    double recomputed = 0.0;
    for (const auto& fl : plan.flows) {
      outflow[static_cast<std::size_t>(fl.point)] += fl.mass;
      inflow[static_cast<std::size_t>(fl.cluster)]
            [static_cast<std::size_t>(inst.x.profile_of[static_cast<std::size_t>(fl.point)])] += fl.mass;
      recomputed += fl.mass * dist_pow(inst.x.points[static_cast<std::size_t>(fl.point)],
                                       inst.c.centers[static_cast<std::size_t>(fl.cluster)], inst.z);
    }
    for (double o : outflow) CHECK(o == doctest::Approx(1.0).epsilon(1e-9));
    for (int i = 0; i < inst.f.k(); ++i)
      for (int t = 0; t < inst.x.gamma(); ++t)
        CHECK(inflow[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] ==
              doctest::Approx(inst.f.quotas[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)])
                  .epsilon(1e-9));
    CHECK(recomputed == doctest::Approx(plan.objective).epsilon(1e-9));
  }
}

TEST_CASE("oracle equivalence on random small instances") {
  Rng rng(42);
  for (int rep = 0; rep < 120; ++rep) {
    auto inst = random_instance(rng, 10, 3, 2);
    double lp = evaluate_objective(as_weighted(inst.x), inst.f, inst.c, inst.z).objective;
    double brute = brute_force_objective(inst.x, inst.f, inst.c, inst.z);
    CHECK(lp == doctest::Approx(brute).epsilon(1e-9));
  }
}

TEST_CASE("brute_force_objective guards") {
  Dataset big = oracles::dataset_from_positions({0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
  CHECK_THROWS_WITH_AS(brute_force_objective(big, quotas({{13}}), centers_1d({0}), 1),
                       "oracle guard", std::invalid_argument);

  Dataset x = oracles::dataset_from_positions({0, 1, 3});
  CHECK(brute_force_objective(x, quotas({{3}}), centers_1d({1}), 1) == doctest::Approx(3.0));
  CHECK_THROWS_AS(brute_force_objective(x, quotas({{2}}), centers_1d({1}), 1),
                  std::invalid_argument);
}

TEST_CASE("k-means contiguity: LP objective equals the sorted-block cost") {
  Rng rng(77);
  for (int rep = 0; rep < 60; ++rep) {
    std::size_t n = 2 + rng.below(9);
    int k = 1 + static_cast<int>(rng.below(3));
    std::vector<double> xs;
    for (std::size_t i = 0; i < n; ++i) xs.push_back(rng.uniform01() * 10);
    std::sort(xs.begin(), xs.end());
    Dataset x;
    for (double v : xs) {
      x.points.push_back({v, 0.0});
      x.profile_of.push_back(0);
    }
    x.profiles.push_back(GroupProfile{{0}});
    x.group_count = 1;

    // centers sorted by their projection onto the data line (the x-axis)
    std::vector<Point> cs;
    for (int i = 0; i < k; ++i) cs.push_back({rng.uniform01() * 10, rng.uniform01() * 6 - 3});
    std::sort(cs.begin(), cs.end(),
              [](const Point& a, const Point& b) { return a.coords[0] < b.coords[0]; });
    CenterSet c{cs};

    auto comp = oracles::compositions(static_cast<long long>(n), k);
    const auto& f_parts = comp[rng.below(comp.size())];
    ProfileConstraint f;
    f.quotas.assign(static_cast<std::size_t>(k), std::vector<double>(1, 0.0));
    double block_cost = 0.0;
    std::size_t at = 0;
    for (int i = 0; i < k; ++i) {
      f.quotas[static_cast<std::size_t>(i)][0] = static_cast<double>(f_parts[static_cast<std::size_t>(i)]);
      for (long long j = 0; j < f_parts[static_cast<std::size_t>(i)]; ++j, ++at)
        block_cost += sq_dist(x.points[at], c.centers[static_cast<std::size_t>(i)]);
    }
    double lp = evaluate_objective(as_weighted(x), f, c, 2).objective;
    CHECK(lp == doctest::Approx(block_cost).epsilon(1e-9));
  }
}

TEST_CASE("k-median: some optimal plan uses at most 2k-1 intervals") {
  Rng rng(101);
  for (int rep = 0; rep < 40; ++rep) {
    std::size_t n = 2 + rng.below(7);
    int k = 2 + static_cast<int>(rng.below(2));
    std::vector<double> xs;
    for (std::size_t i = 0; i < n; ++i) xs.push_back(rng.uniform01() * 10);
    std::sort(xs.begin(), xs.end());
    Dataset x;
    for (double v : xs) {
      x.points.push_back({v, 0.0});
      x.profile_of.push_back(0);
    }
    x.profiles.push_back(GroupProfile{{0}});
    x.group_count = 1;
    CenterSet c;
    for (int i = 0; i < k; ++i) c.centers.push_back({rng.uniform01() * 10, rng.uniform01() * 4 - 2});
    auto comp = oracles::compositions(static_cast<long long>(n), k);
    const auto& parts = comp[rng.below(comp.size())];
    ProfileConstraint f;
    f.quotas.assign(static_cast<std::size_t>(k), std::vector<double>(1, 0.0));
    for (int i = 0; i < k; ++i)
      f.quotas[static_cast<std::size_t>(i)][0] = static_cast<double>(parts[static_cast<std::size_t>(i)]);

    double best = std::numeric_limits<double>::infinity();
    oracles::for_each_assignment(x, f, [&](const std::vector<int>& a) {
      double cost = 0;
      for (std::size_t i = 0; i < a.size(); ++i)
        cost += dist(x.points[i], c.centers[static_cast<std::size_t>(a[i])]);
      best = std::min(best, cost);
    });
    int min_intervals = 1 << 20;
    oracles::for_each_assignment(x, f, [&](const std::vector<int>& a) {
      double cost = 0;
      for (std::size_t i = 0; i < a.size(); ++i)
        cost += dist(x.points[i], c.centers[static_cast<std::size_t>(a[i])]);
      if (cost <= best + 1e-9) min_intervals = std::min(min_intervals, oracles::contiguous_intervals(a));
    });
    CHECK(min_intervals <= 2 * k - 1);
  }
}

TEST_CASE("LP optimum is convex in the constraint") {
  Rng rng(31);
  for (int rep = 0; rep < 40; ++rep) {
    std::size_t n = 4 + rng.below(6);
    int k = 2;
    std::vector<double> xs;
    for (std::size_t i = 0; i < n; ++i) xs.push_back(rng.uniform01() * 10);
    Dataset x = oracles::dataset_from_positions(xs);
    WeightedPointSet xw = as_weighted(x);
    CenterSet c = centers_1d({rng.uniform01() * 10, rng.uniform01() * 10});
    int z = 1 + static_cast<int>(rng.below(2));

    auto comp = oracles::compositions(static_cast<long long>(n), k);
    const auto& p1 = comp[rng.below(comp.size())];
    const auto& p2 = comp[rng.below(comp.size())];
    auto make_f = [&](double a0, double a1) {
      ProfileConstraint f;
      f.quotas = {{a0}, {a1}};
      return f;
    };
    double v1 = evaluate_objective(xw, make_f(static_cast<double>(p1[0]), static_cast<double>(p1[1])), c, z).objective;
    double v2 = evaluate_objective(xw, make_f(static_cast<double>(p2[0]), static_cast<double>(p2[1])), c, z).objective;
    double mid = evaluate_objective(
                     xw, make_f(0.5 * static_cast<double>(p1[0] + p2[0]), 0.5 * static_cast<double>(p1[1] + p2[1])), c, z)
                     .objective;
    CHECK(mid <= 0.5 * (v1 + v2) + 1e-9 * (1.0 + std::abs(v1) + std::abs(v2)));
  }
}

TEST_CASE("group_level_view") {
  std::vector<GroupProfile> profiles = {GroupProfile{{0}}, GroupProfile{{0, 1}}};
  auto view = group_level_view(quotas({{1, 1}, {0, 2}}), profiles, 2);
  CHECK(view[0][0] == 2);
  CHECK(view[1][0] == 2);
  CHECK(view[0][1] == 1);
  CHECK(view[1][1] == 2);

  std::vector<GroupProfile> single = {GroupProfile{{0}}};
  auto v2 = group_level_view(quotas({{2}, {1}}), single, 1);
  CHECK(v2[0][0] == 2);
  CHECK(v2[1][0] == 1);

  auto v3 = group_level_view(quotas({{0, 0}, {0, 0}}), profiles, 2);
  CHECK(v3[0][0] == 0);
  CHECK(v3[1][1] == 0);

  CHECK_THROWS_AS(group_level_view(quotas({{0.5, 0.5}, {0.5, 1.5}}), profiles, 2),
                  std::invalid_argument);
}

}  // TEST_SUITE
