#include <doctest.h>

#include <random>

#include "dfot/dfdist.hpp"
#include "dfot/error.hpp"
#include "oracles.hpp"

using dfot::DiscreteMeasure;
using dfot::DFMode;
using dfot::FeasibleRegion;
using dfot::Matrix;
using dfot::OptimisticMethod;
using dfot::Vector;

namespace {

FeasibleRegion triangle() { return FeasibleRegion::from_rows({{0, 0}, {1, 0}, {0, 1}}); }

DiscreteMeasure atoms(std::vector<std::vector<double>> pts, std::vector<double> w) {
  Matrix p(static_cast<Eigen::Index>(pts.size()), static_cast<Eigen::Index>(pts[0].size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t c = 0; c < pts[i].size(); ++c) {
      p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = pts[i][c];
    }
  }
  return DiscreteMeasure(p, Eigen::Map<Vector>(w.data(), static_cast<Eigen::Index>(w.size())));
}

struct Built {
  FeasibleRegion region;
  DiscreteMeasure mu;
  DiscreteMeasure nu;
};

Built build(const oracle::Instance& inst) {
  return Built{FeasibleRegion(inst.vertices), DiscreteMeasure(inst.x, inst.a), DiscreteMeasure(inst.y, inst.b)};
}

}  // namespace

TEST_CASE("SPO cost matrix matches the scan oracle") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 40; ++t) {
    const auto inst = oracle::random_instance(rng, 4, 8, 12);
    const auto b = build(inst);
    const Matrix c = dfot::spo_cost_matrix(b.region, b.mu, b.nu);
    CHECK((c - oracle::spo_matrix(inst.vertices, inst.x, inst.y)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("optimistic and robust match vertex enumeration on small supports") {
  std::mt19937_64 rng(8080);
  for (int t = 0; t < 60; ++t) {
    const auto b = build(oracle::random_instance(rng, 4, 8, 3));
    const Matrix c = oracle::spo_matrix(b.region.extreme_points(), b.mu.points(), b.nu.points());
    CHECK(dfot::optimistic(b.region, b.mu, b.nu).value ==
          doctest::Approx(oracle::vertex_min(b.mu.weights(), b.nu.weights(), c)).epsilon(1e-9));
    CHECK(dfot::robust(b.region, b.mu, b.nu).value ==
          doctest::Approx(oracle::vertex_max(b.mu.weights(), b.nu.weights(), c)).epsilon(1e-9));
  }
}

TEST_CASE("singletons have one coupling") {
  const auto s = triangle();
  const auto x = atoms({{-1, 1}}, {1.0});
  const auto y = atoms({{1, -1}}, {1.0});
  CHECK(dfot::optimistic(s, x, y).value == doctest::Approx(2.0));
  CHECK(dfot::robust(s, x, y).value == doctest::Approx(2.0));
  CHECK(dfot::regret(s, x, y) == doctest::Approx(2.0));
  CHECK(dfot::optimistic(s, x, x).value == 0.0);
}

TEST_CASE("hand-computed two-atom instance") {
  const auto s = triangle();
  // mu: (-1,1) in region 1 and (1,-1) in region 2; nu the same atoms.
  const auto mu = atoms({{-1, 1}, {1, -1}}, {0.5, 0.5});
  const auto nu = atoms({{-1, 1}, {1, -1}}, {0.25, 0.75});
  // l(x1, y2) = 2 and l(x2, y1) = 2.
  CHECK(dfot::regret(s, mu, nu) == doctest::Approx(0.5 * 0.75 * 2 + 0.5 * 0.25 * 2));
  CHECK(dfot::optimistic(s, mu, nu).value == doctest::Approx(0.25 * 2));
  CHECK(dfot::robust(s, mu, nu).value == doctest::Approx(0.5 * 2 + 0.25 * 2));
}

TEST_CASE("zero distance cases") {
  const auto s = triangle();
  const auto mu = atoms({{1, 2}, {-1, 1}, {0.5, -3}}, {0.2, 0.5, 0.3});
  CHECK(dfot::optimistic(s, mu, mu).value == doctest::Approx(0.0).epsilon(1e-15));
  for (auto kind : {dfot::SymmetricKind::kAdditive, dfot::SymmetricKind::kJensenShannon}) {
    CHECK(dfot::symmetric(s, mu, mu, kind, DFMode::kOptimistic) == doctest::Approx(0.0).epsilon(1e-15));
  }
  // Same region everywhere makes every coupling free.
  const auto a = atoms({{1, 2}, {3, 0.5}}, {0.5, 0.5});
  const auto b = atoms({{2, 2}, {0.1, 0.2}, {4, 4}}, {0.2, 0.3, 0.5});
  CHECK(dfot::optimistic(s, a, b).value == 0.0);
  CHECK(dfot::robust(s, a, b).value == 0.0);
  CHECK(dfot::robust(s, a, a).value == 0.0);
  for (auto kind : {dfot::SymmetricKind::kAdditive, dfot::SymmetricKind::kJensenShannon}) {
    CHECK(dfot::symmetric(s, a, a, kind, DFMode::kRobust) == 0.0);
  }
  // Per-atom rescaling.
  Matrix scaled = mu.points();
  scaled.row(0) *= 3.0;
  scaled.row(1) *= 0.1;
  scaled.row(2) *= 12.0;
  CHECK(dfot::optimistic(s, mu, DiscreteMeasure(scaled, mu.weights())).value == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("divergence of special couplings") {
  std::mt19937_64 rng(12);
  const auto b = build(oracle::random_instance(rng, 3, 5, 10));
  const auto product = dfot::Coupling::product(b.mu.weights(), b.nu.weights());
  CHECK(dfot::df_divergence(b.region, b.mu, b.nu, product) == doctest::Approx(dfot::regret(b.region, b.mu, b.nu)));
  const dfot::Coupling identity(Matrix(b.mu.weights().asDiagonal()), b.mu.weights(), b.mu.weights());
  CHECK(dfot::df_divergence(b.region, b.mu, b.mu, identity) == 0.0);
  Matrix broken = product.plan();
  broken(0, 0) += 1e-6;
  CHECK_THROWS_AS(dfot::df_divergence(b.region, b.mu, b.nu, dfot::Coupling(broken, b.mu.weights(), b.nu.weights())),
                  dfot::InvalidInput);
}

TEST_CASE("direct and reduction agree on a 10x12 instance") {
  std::mt19937_64 rng(77);
  const FeasibleRegion s(oracle::random_points(rng, 5, 3, 1.5));
  const DiscreteMeasure mu(oracle::random_points(rng, 10, 3), oracle::random_simplex(rng, 10));
  const DiscreteMeasure nu(oracle::random_points(rng, 12, 3), oracle::random_simplex(rng, 12));
  const auto direct = dfot::optimistic(s, mu, nu, OptimisticMethod::kDirect);
  const auto red = dfot::optimistic(s, mu, nu, OptimisticMethod::kReduction);
  CHECK(direct.method == dfot::DFMethod::kDirectLP);
  CHECK(red.method == dfot::DFMethod::kReduction);
  CHECK(std::abs(direct.value - red.value) <= 1e-9);
  CHECK(red.reduced_coupling.has_value());
  CHECK(std::abs(dfot::df_divergence(s, mu, nu, red.coupling) - direct.value) <= 1e-9);
}

TEST_CASE("ordering, symmetry and bounds on random instances") {
  std::mt19937_64 rng(5150);
  for (int t = 0; t < 40; ++t) {
    const auto b = build(oracle::random_instance(rng, 4, 8, 15));
    const double opt = dfot::optimistic(b.region, b.mu, b.nu).value;
    const double reg = dfot::regret(b.region, b.mu, b.nu);
    const double rob = dfot::robust(b.region, b.mu, b.nu).value;
    CHECK(opt >= -1e-12);
    CHECK(opt <= reg + 1e-9);
    CHECK(reg <= rob + 1e-9);
    if (b.mu.size() <= 3 && b.nu.size() <= 3) {
      const Matrix c = oracle::spo_matrix(b.region.extreme_points(), b.mu.points(), b.nu.points());
      CHECK(opt == doctest::Approx(oracle::vertex_min(b.mu.weights(), b.nu.weights(), c)).epsilon(1e-9));
      CHECK(rob == doctest::Approx(oracle::vertex_max(b.mu.weights(), b.nu.weights(), c)).epsilon(1e-9));
    }
    for (auto kind : {dfot::SymmetricKind::kAdditive, dfot::SymmetricKind::kJensenShannon}) {
      for (auto mode : {DFMode::kOptimistic, DFMode::kRobust}) {
        CHECK(dfot::symmetric(b.region, b.mu, b.nu, kind, mode) ==
              doctest::Approx(dfot::symmetric(b.region, b.nu, b.mu, kind, mode)).epsilon(1e-10));
      }
    }
    CHECK(dfot::symmetric(b.region, b.mu, b.nu, dfot::SymmetricKind::kAdditive, DFMode::kOptimistic) >= opt - 1e-12);
    CHECK(rob <= b.region.diameter() * (b.nu.points().rowwise().norm().transpose() * b.nu.weights())(0) + 1e-8);
  }
}

TEST_CASE("lift of a reduced plan") {
  const auto s = triangle();
  // All mu atoms in region 0: the lift is rank one.
  const auto mu = atoms({{1, 2}, {2, 1}, {0.5, 0.5}}, {0.5, 0.3, 0.2});
  Matrix reduced = Matrix::Zero(3, 2);
  reduced(0, 0) = 0.4;
  reduced(0, 1) = 0.6;
  const dfot::Coupling plan(reduced, reduced.rowwise().sum(), reduced.colwise().sum().transpose());
  const auto lifted = dfot::lift_coupling(s, mu, plan);
  Matrix expect(3, 2);
  expect << 0.2, 0.3, 0.12, 0.18, 0.08, 0.12;
  CHECK((lifted.plan() - expect).cwiseAbs().maxCoeff() <= 1e-15);
  // Wrong row masses are rejected.
  reduced(0, 0) = 0.3;
  CHECK_THROWS_AS(dfot::lift_coupling(s, mu, dfot::Coupling(reduced, Vector::Zero(3), Vector::Zero(2))),
                  dfot::InvalidInput);
}

TEST_CASE("dual certificate") {
  std::mt19937_64 rng(91);
  for (int t = 0; t < 30; ++t) {
    const auto b = build(oracle::random_instance(rng, 4, 8, 20));
    const auto red = dfot::optimistic(b.region, b.mu, b.nu, OptimisticMethod::kReduction);
    const double direct = dfot::optimistic(b.region, b.mu, b.nu, OptimisticMethod::kDirect).value;
    const double cert = dfot::dual_certificate(b.region, b.mu, b.nu, red.dual->f);
    CHECK(std::abs(cert - direct) <= 1e-6);
    // Any f gives a lower bound; f = 0 is the pointwise-min bound.
    const Vector zero = Vector::Zero(static_cast<Eigen::Index>(b.region.size()));
    const double lower = dfot::dual_certificate(b.region, b.mu, b.nu, zero);
    double expect = 0.0;
    for (std::size_t j = 0; j < b.nu.size(); ++j) expect += b.nu.weight(j) * b.region.reduced_costs(b.nu.point(j)).minCoeff();
    CHECK(lower == doctest::Approx(expect));
    CHECK(lower <= direct + 1e-12);
    const Vector shifted = red.dual->f.array() + 2.5;
    CHECK(std::abs(dfot::dual_certificate(b.region, b.mu, b.nu, shifted) - cert) <= 1e-12);
  }
  CHECK_THROWS_AS(dfot::dual_certificate(triangle(), atoms({{1, 1}}, {1}), atoms({{1, 1}}, {1}), Vector::Zero(2)),
                  dfot::InvalidInput);
}

TEST_CASE("entropic DF distances") {
  std::mt19937_64 rng(404);
  const auto b = build(oracle::random_instance(rng, 3, 5, 8));
  const double opt = dfot::optimistic(b.region, b.mu, b.nu).value;
  const double reg = dfot::regret(b.region, b.mu, b.nu);
  const double rob = dfot::robust(b.region, b.mu, b.nu).value;
  double prev_lo = -INFINITY;
  double prev_hi = INFINITY;
  for (double eps : {0.1, 0.2, 0.5, 1.0, 2.0, 5.0}) {
    const auto lo = dfot::entropic_df(b.region, b.mu, b.nu, eps, DFMode::kOptimistic);
    const auto hi = dfot::entropic_df(b.region, b.mu, b.nu, eps, DFMode::kRobust);
    CHECK(lo.entropic->converged);
    CHECK(hi.entropic->converged);
    CHECK(lo.method == dfot::DFMethod::kEntropic);
    CHECK(lo.value >= prev_lo - 1e-6);
    CHECK(hi.value <= prev_hi + 1e-6);
    CHECK(opt <= lo.value + 1e-9);
    CHECK(lo.value <= reg + 1e-9);
    CHECK(reg <= hi.value + 1e-9);
    CHECK(hi.value <= rob + 1e-9);
    prev_lo = lo.value;
    prev_hi = hi.value;
  }
  CHECK(dfot::entropic_df(b.region, b.mu, b.nu, 1e3, DFMode::kOptimistic).value == doctest::Approx(reg).epsilon(1e-2));
  CHECK(dfot::entropic_df(b.region, b.mu, b.nu, 1e3, DFMode::kRobust).value == doctest::Approx(reg).epsilon(1e-2));
}

TEST_CASE("dimension mismatches are rejected") {
  const auto s = triangle();
  const auto a = atoms({{1, 2, 3}}, {1.0});
  const auto b = atoms({{1, 2}}, {1.0});
  CHECK_THROWS_AS(dfot::optimistic(s, a, b), dfot::InvalidInput);
  CHECK_THROWS_AS(dfot::regret(s, b, a), dfot::InvalidInput);
}
