#include <doctest.h>

#include <random>

#include "dfot/error.hpp"
#include "dfot/io.hpp"
#include "dfot/transport.hpp"
#include "fixture_loader.hpp"
#include "oracles.hpp"

using dfot::Matrix;
using dfot::Sense;
using dfot::Vector;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Matrix index_cost(int n, int p) {
  Matrix c(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) c(i, j) = std::pow(std::abs(i - j), p);
  }
  return c;
}

void check_feasible(const dfot::Coupling& c, const Vector& a, const Vector& b, double tol) {
  CHECK(c.min_entry() >= 0.0);
  CHECK((c.plan().rowwise().sum() - a).cwiseAbs().maxCoeff() <= tol);
  CHECK((c.plan().colwise().sum().transpose() - b).cwiseAbs().maxCoeff() <= tol);
}

}  // namespace

TEST_CASE("index-distance transport on mixture weights") {
  const Vector a = vec({0.25, 0.25, 0.5});
  const Vector b = Vector::Constant(3, 1.0 / 3);
  CHECK(dfot::solve_exact(a, b, index_cost(3, 1)).value == doctest::Approx(0.25));
  CHECK(dfot::solve_exact(a, b, index_cost(3, 2)).value == doctest::Approx(0.25));
  // Squared cost rules out routing mass two steps through the middle.
  const Vector c = vec({0.1, 0.1, 0.8});
  CHECK(std::sqrt(dfot::solve_exact(c, b, index_cost(3, 2)).value) ==
        doctest::Approx(0.9832).epsilon(1e-4));
}

TEST_CASE("identical supports give the identity plan") {
  std::mt19937_64 rng(1);
  const Matrix pts = oracle::random_points(rng, 6, 2);
  const Vector a = oracle::random_simplex(rng, 6);
  const auto r = dfot::solve_exact(a, a, dfot::distance_cost(pts, pts, 2));
  CHECK(r.value == doctest::Approx(0.0).epsilon(1e-15));
  CHECK((Matrix(r.plan.plan()) - Matrix(a.asDiagonal())).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("exact solver matches vertex enumeration on rational fixtures") {
  for (const auto& inst : fixtures::rational_transport()) {
    const auto lo = dfot::solve_exact(inst.a, inst.b, inst.cost);
    const auto hi = dfot::solve_exact(inst.a, inst.b, inst.cost, Sense::kMaximize);
    CHECK(lo.value == doctest::Approx(oracle::vertex_min(inst.a, inst.b, inst.cost)).epsilon(1e-12));
    CHECK(hi.value == doctest::Approx(oracle::vertex_max(inst.a, inst.b, inst.cost)).epsilon(1e-12));
    check_feasible(lo.plan, inst.a, inst.b, 1e-12);
    check_feasible(hi.plan, inst.a, inst.b, 1e-12);
  }
}

TEST_CASE("exact solver on random instances") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> size(1, 25);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const int n = size(rng);
    const int m = size(rng);
    Vector a = oracle::random_simplex(rng, n);
    Vector b = oracle::random_simplex(rng, m);
    Matrix c(n, m);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) c(i, j) = std::round(4 * unit(rng)) / 2;  // heavy ties
    }
    for (Sense sense : {Sense::kMinimize, Sense::kMaximize}) {
      const auto r = dfot::solve_exact(a, b, c, sense);
      check_feasible(r.plan, a, b, 1e-9);
      CHECK(r.value == doctest::Approx((c.array() * r.plan.plan().array()).sum()).epsilon(1e-12));
      // Strong duality.
      CHECK(std::abs(r.value - (r.dual_row.dot(a) + r.dual_col.dot(b))) <= 1e-7);
      // Dual feasibility.
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
          const double slack = c(i, j) - r.dual_row[i] - r.dual_col[j];
          if (sense == Sense::kMinimize) {
            CHECK(slack >= -1e-9);
          } else {
            CHECK(slack <= 1e-9);
          }
        }
      }
      // No worse than product or diagonal plans.
      const double product = a.dot(c * b);
      if (sense == Sense::kMinimize) {
        CHECK(r.value <= product + 1e-12);
      } else {
        CHECK(r.value >= product - 1e-12);
      }
    }
    if (n <= 3 && m <= 3) {
      CHECK(dfot::solve_exact(a, b, c).value == doctest::Approx(oracle::vertex_min(a, b, c)).epsilon(1e-9));
    }
  }
}

TEST_CASE("lexicographic tie-breaking keeps the primary optimum") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 30; ++t) {
    const int n = 8;
    Vector a = oracle::random_simplex(rng, n);
    Vector b = oracle::random_simplex(rng, n);
    const Matrix primary = Matrix::Zero(n, n);
    const Matrix pts_a = oracle::random_points(rng, n, 2);
    const Matrix pts_b = oracle::random_points(rng, n, 2);
    const Matrix secondary = dfot::distance_cost(pts_a, pts_b, 2);
    const auto lex = dfot::solve_exact_lex(a, b, primary, secondary);
    const auto direct = dfot::solve_exact(a, b, secondary);
    CHECK(lex.value == 0.0);
    // With a flat primary the secondary is solved exactly.
    CHECK((secondary.array() * lex.plan.plan().array()).sum() == doctest::Approx(direct.value).epsilon(1e-10));
  }
}

TEST_CASE("exact solver rejects bad inputs") {
  CHECK_THROWS_AS(dfot::solve_exact(vec({0.5, 0.5}), vec({0.5, 0.6}), Matrix::Zero(2, 2)), dfot::Infeasible);
  CHECK_THROWS_AS(dfot::solve_exact(vec({0.5, 0.5}), vec({1.0}), Matrix::Zero(2, 2)), dfot::InvalidInput);
  CHECK_THROWS_AS(dfot::solve_exact(vec({1.5, -0.5}), vec({1.0}), Matrix::Zero(2, 1)), dfot::InvalidInput);
  Matrix bad = Matrix::Zero(1, 1);
  bad(0, 0) = NAN;
  CHECK_THROWS_AS(dfot::solve_exact(vec({1.0}), vec({1.0}), bad), dfot::InvalidInput);
}

TEST_CASE("entropic solver limits") {
  std::mt19937_64 rng(8);
  const Vector a = oracle::random_simplex(rng, 5);
  const Vector b = oracle::random_simplex(rng, 5);
  const Matrix c = dfot::distance_cost(oracle::random_points(rng, 5, 2), oracle::random_points(rng, 5, 2), 1);

  const auto big = dfot::solve_entropic(a, b, c, 1e3);
  CHECK(big.converged);
  CHECK(big.kl_to_product <= 1e-3);

  const auto zero = dfot::solve_entropic(a, b, Matrix::Zero(5, 5), 0.3);
  CHECK((zero.plan.plan() - a * b.transpose()).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(zero.value_regularized == doctest::Approx(0.0).epsilon(1e-15));

  const double exact = dfot::solve_exact(a, b, c).value;
  for (double eps : {0.1, 0.01, 0.001}) {
    const auto r = dfot::solve_entropic(a, b, c, eps);
    CHECK(r.converged);
    CHECK(r.marginal_error <= 1e-8);
    CHECK(r.value_plain >= exact - 1e-9);
    CHECK(r.value_plain <= exact + eps * std::log(25.0) + 1e-6);
  }
  const double exact_max = dfot::solve_exact(a, b, c, Sense::kMaximize).value;
  const auto r = dfot::solve_entropic(a, b, c, 0.01, Sense::kMaximize);
  CHECK(r.value_plain <= exact_max + 1e-9);
  CHECK(r.value_plain >= exact_max - 0.01 * std::log(25.0) - 1e-6);
  CHECK(r.value_regularized == doctest::Approx(r.value_plain - 0.01 * r.kl_to_product));
  CHECK_THROWS_AS(dfot::solve_entropic(a, b, c, 0.0), dfot::InvalidInput);
}

TEST_CASE("Wasserstein distances") {
  const auto x = dfot::from_samples(std::vector<std::vector<double>>{{0, 0}});
  const auto y = dfot::from_samples(std::vector<std::vector<double>>{{3, 4}});
  CHECK(dfot::w_p(x, y, 1) == doctest::Approx(5.0));
  CHECK(dfot::w_p(x, y, 2) == doctest::Approx(5.0));
  CHECK(dfot::w_p(y, y, 2) == 0.0);
  Matrix types(3, 1);
  types << 1, 2, 3;
  const dfot::DiscreteMeasure p(types, vec({0.2, 0.2, 0.6}));
  const dfot::DiscreteMeasure q(types, Vector::Constant(3, 1.0 / 3));
  CHECK(dfot::w_p(p, q, 1) == doctest::Approx(0.4));
  CHECK(dfot::w_p(p, q, 2) == doctest::Approx(0.6325).epsilon(1e-4));
  CHECK_THROWS_AS(dfot::w_p(x, q, 1), dfot::InvalidInput);
  CHECK_THROWS_AS(dfot::w_p(x, y, 3), dfot::InvalidInput);
}

TEST_CASE("plan exports round-trip") {
  Matrix plan(2, 3);
  plan << 0.1, 0.0, 0.2, 0.3, 0.25, 0.15;
  const dfot::Coupling c(plan, plan.rowwise().sum(), plan.colwise().sum().transpose());
  const auto back = dfot::parse_plan_csv(dfot::plan_to_csv(c), 2, 3);
  CHECK(back.plan() == plan);
  CHECK(dfot::plan_to_dense_json(c).find("\"rows\":2") != std::string::npos);
}
