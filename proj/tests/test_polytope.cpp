#include <doctest.h>

#include <random>

#include "dfot/error.hpp"
#include "dfot/experiments.hpp"
#include "dfot/polytope.hpp"
#include "oracles.hpp"

using dfot::FeasibleRegion;
using dfot::Vector;

namespace {

FeasibleRegion triangle() { return FeasibleRegion::from_rows({{0, 0}, {1, 0}, {0, 1}}); }

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

}  // namespace

TEST_CASE("oracle picks the minimizing extreme point") {
  const auto s = triangle();
  CHECK(s.oracle(v2(1, 2)).index == 0);
  CHECK(s.oracle(v2(1, 2)).decision.isApprox(v2(0, 0)));
  const auto r = s.oracle(v2(-1, 1));
  CHECK(r.index == 1);
  CHECK(r.decision.isApprox(v2(1, 0)));
  CHECK(s.value(v2(1, 2)) == 0.0);
}

TEST_CASE("oracle ties go to the lowest index") {
  const auto s = triangle();
  // w_1'x = w_2'x = -1 < 0.
  CHECK(s.region_index(v2(-1, -1)) == 1);
  // All three objectives zero.
  CHECK(s.region_index(v2(0, 0)) == 0);
  // Within tolerance counts as a tie.
  CHECK(s.region_index(v2(-1, -1 - 5e-10)) == 1);
  CHECK(s.region_index(v2(-1, -1 - 1e-6)) == 2);
}

TEST_CASE("spo loss on the triangle") {
  const auto s = triangle();
  CHECK(s.spo_loss(v2(-1, 1), v2(1, -1)) == doctest::Approx(2.0));
  CHECK(s.spo_loss(v2(0.3, -2), v2(0.3, -2)) == 0.0);
  // Same region, different points.
  CHECK(s.spo_loss(v2(1, 2), v2(3, 0.5)) == 0.0);
}

TEST_CASE("reduced costs are nonnegative with a zero at the oracle choice") {
  const auto s = triangle();
  const Vector c = s.reduced_costs(v2(0.5, -1.5));
  CHECK(c.minCoeff() == 0.0);
  CHECK(c[2] == 0.0);
  CHECK(c[0] == doctest::Approx(1.5));
  CHECK(c[1] == doctest::Approx(2.0));
}

TEST_CASE("diameter") {
  CHECK(triangle().diameter() == doctest::Approx(std::sqrt(2.0)));
  CHECK(FeasibleRegion::from_rows({{3.0}}).diameter() == 0.0);
}

TEST_CASE("invalid regions are rejected") {
  CHECK_THROWS_AS(FeasibleRegion(dfot::Matrix(0, 2)), dfot::InvalidInput);
  CHECK_THROWS_AS(FeasibleRegion::from_rows({{0, 0}, {1}}), dfot::InvalidInput);
  CHECK_THROWS_AS(FeasibleRegion::from_rows({{0, 0}, {0, 0}}), dfot::InvalidInput);
  CHECK_THROWS_AS(FeasibleRegion::from_rows({{0, NAN}}), dfot::InvalidInput);
  CHECK_THROWS_AS(triangle().oracle(Vector::Zero(3)), dfot::InvalidInput);
}

TEST_CASE("care-plan region follows the dominant cost coordinate") {
  const auto s = dfot::care_plan_region();
  Vector y(4);
  y << -1.0, -0.1, -0.1, -0.1;
  CHECK(s.oracle(y).decision.isApprox((Vector(4) << 6, 2, 2, 0).finished()));
  y << -0.1, -1.0, -0.1, -0.1;
  CHECK(s.oracle(y).index == 2);
  y << -0.1, -0.1, -1.0, -0.1;
  CHECK(s.oracle(y).index == 3);
}

TEST_CASE("properties on random regions") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> dim(1, 4);
  std::uniform_int_distribution<int> verts(2, 8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = dim(rng);
    const FeasibleRegion s(oracle::random_points(rng, verts(rng), d, 2.0));
    const Vector x = oracle::random_points(rng, 1, d).row(0).transpose();
    const Vector y = oracle::random_points(rng, 1, d).row(0).transpose();
    // Scale invariance of the selection.
    CHECK(s.region_index(x) == s.region_index(2.0 * x));
    CHECK(s.region_index(x) == static_cast<std::size_t>(oracle::argmin_vertex(s.extreme_points(), x)));
    // Concavity of z.
    const double t = unit(rng);
    CHECK(s.value((1 - t) * x + t * y) >= (1 - t) * s.value(x) + t * s.value(y) - 1e-12);
    // Loss matches the scan oracle and its bounds.
    const double loss = s.spo_loss(x, y);
    CHECK(loss == doctest::Approx(oracle::spo(s.extreme_points(), x, y)).epsilon(1e-12));
    CHECK(loss >= 0.0);
    CHECK(loss <= y.norm() * s.diameter() + 1e-12);
    CHECK(s.value(Vector::Zero(d)) == 0.0);
  }
}

TEST_CASE("region index is locally constant away from boundaries") {
  std::mt19937_64 rng(11);
  int checked = 0;
  for (int trial = 0; trial < 300 && checked < 100; ++trial) {
    const FeasibleRegion s(oracle::random_points(rng, 5, 3, 1.0));
    const Vector x = oracle::random_points(rng, 1, 3).row(0).transpose();
    Vector obj = s.extreme_points() * x;
    std::sort(obj.data(), obj.data() + obj.size());
    const double gap = obj[1] - obj[0];
    if (gap < 1e-3) continue;
    // |w'delta| <= |delta| * max|w| keeps the ranking.
    const double radius = 0.49 * gap / s.extreme_points().rowwise().norm().maxCoeff();
    const Vector delta = oracle::random_points(rng, 1, 3).row(0).transpose().normalized() * radius;
    CHECK(s.region_index(x + delta) == s.region_index(x));
    ++checked;
  }
  CHECK(checked == 100);
}
