#include <doctest.h>

#include <cmath>
#include <limits>

#include "faircoreset/core.hpp"
#include "faircoreset/rng.hpp"
#include "oracles.hpp"

using namespace faircoreset;

namespace {

WeightedPointSet set_of(std::vector<Point> pts, std::vector<double> ws) {
  WeightedPointSet s;
  s.points = std::move(pts);
  s.weights = std::move(ws);
  s.profile_of.assign(s.points.size(), 0);
  return s;
}

}  // namespace

TEST_SUITE("core") {

TEST_CASE("weighted_mean basic values") {
  CHECK(weighted_mean(set_of({{0.0}, {2.0}}, {1, 1})).coords[0] == doctest::Approx(1.0));
  CHECK(weighted_mean(set_of({{0.0}, {4.0}}, {3, 1})).coords[0] == doctest::Approx(1.0));
  Point p = weighted_mean(set_of({{5.0, 5.0}}, {2}));
  CHECK(p.coords[0] == doctest::Approx(5.0));
  CHECK(p.coords[1] == doctest::Approx(5.0));
}

TEST_CASE("weighted_mean errors on empty or zero weight") {
  CHECK_THROWS_WITH_AS(weighted_mean(WeightedPointSet{}), "empty set", std::invalid_argument);
  CHECK_THROWS_AS(weighted_mean(set_of({{1.0}}, {0.0})), std::invalid_argument);
}

TEST_CASE("moment_error examples") {
  CHECK(moment_error(set_of({{0.0}, {2.0}}, {1, 1}), 1) == doctest::Approx(2.0));
  CHECK(moment_error(set_of({{0.0}, {2.0}}, {1, 1}), 2) == doctest::Approx(2.0));
  CHECK(moment_error(set_of({{0.0}, {4.0}}, {2, 1}), 2) == doctest::Approx(32.0 / 3.0));
}

TEST_CASE("mean is translation-equivariant, moments transform as expected") {
  Rng rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    std::size_t n = 1 + rng.below(8);
    WeightedPointSet s;
    for (std::size_t i = 0; i < n; ++i) {
      s.points.push_back({rng.uniform01() * 10 - 5, rng.uniform01() * 10 - 5});
      s.weights.push_back(0.1 + rng.uniform01() * 3);
      s.profile_of.push_back(0);
    }
    double tx = rng.uniform01() * 4 - 2, ty = rng.uniform01() * 4 - 2;
    double scale = 0.5 + rng.uniform01() * 2;

    WeightedPointSet shifted = s, scaled = s;
    for (auto& p : shifted.points) {
      p.coords[0] += tx;
      p.coords[1] += ty;
    }
    for (auto& p : scaled.points) {
      p.coords[0] *= scale;
      p.coords[1] *= scale;
    }
    Point m = weighted_mean(s), ms = weighted_mean(shifted);
    CHECK(ms.coords[0] == doctest::Approx(m.coords[0] + tx).epsilon(1e-9));
    CHECK(ms.coords[1] == doctest::Approx(m.coords[1] + ty).epsilon(1e-9));
    for (int z : {1, 2}) {
      double base = moment_error(s, z);
      CHECK(moment_error(shifted, z) == doctest::Approx(base).epsilon(1e-9));
      double factor = z == 2 ? scale * scale : scale;
      CHECK(moment_error(scaled, z) == doctest::Approx(base * factor).epsilon(1e-9));
    }
  }
}

TEST_CASE("parallel-axis identity for z=2 splits") {
  Rng rng(13);
  for (int rep = 0; rep < 50; ++rep) {
    std::size_t n = 2 + rng.below(10);
    WeightedPointSet s;
    for (std::size_t i = 0; i < n; ++i) {
      s.points.push_back({rng.uniform01() * 6, rng.uniform01() * 6});
      s.weights.push_back(0.2 + rng.uniform01());
      s.profile_of.push_back(0);
    }
    std::size_t cut = 1 + rng.below(n - 1);
    WeightedPointSet s1, s2;
    for (std::size_t i = 0; i < n; ++i) {
      auto& part = i < cut ? s1 : s2;
      part.points.push_back(s.points[i]);
      part.weights.push_back(s.weights[i]);
      part.profile_of.push_back(0);
    }
    Point mu = weighted_mean(s), mu1 = weighted_mean(s1), mu2 = weighted_mean(s2);
    double lhs = moment_error(s, 2);
    double rhs = moment_error(s1, 2) + moment_error(s2, 2) +
                 s1.total_weight() * sq_dist(mu1, mu) + s2.total_weight() * sq_dist(mu2, mu);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("validate_dataset flags specific violations") {
  Dataset d;
  d.points = {{0.0, 1.0}, {1.0, 2.0}, {2.0, 0.0}};
  d.profile_of = {0, 0, 0};
  d.profiles = {GroupProfile{{0}}};
  d.group_count = 1;
  CHECK(validate_dataset(d).empty());

  Dataset bad_nan = d;
  bad_nan.points[1].coords[0] = std::numeric_limits<double>::quiet_NaN();
  auto issues = validate_dataset(bad_nan);
  REQUIRE(issues.size() == 1);
  CHECK(issues[0].find("point 1") != std::string::npos);

  Dataset bad_profile = d;
  bad_profile.profile_of[2] = 5;
  issues = validate_dataset(bad_profile);
  REQUIRE(issues.size() == 1);
  CHECK(issues[0].find("point 2") != std::string::npos);
}

TEST_CASE("params validation") {
  CoresetParams p;
  p.epsilon = 0.2;
  p.k = 2;
  p.z = 1;
  CHECK_NOTHROW(check_params(p));
  p.epsilon = 1.0;
  CHECK_THROWS_AS(check_params(p), std::invalid_argument);
  p.epsilon = 0.2;
  p.z = 3;
  CHECK_THROWS_AS(check_params(p), std::invalid_argument);
}

}  // TEST_SUITE
