#pragma once

#include <cstddef>
#include <string>

#include "dfot/measures.hpp"

namespace dfot {

// Transport plan with rows indexed by the first measure (mu) and columns by
// the second (nu): plan * 1 = row_marginal, plan' * 1 = col_marginal.
class Coupling {
 public:
  Coupling() = default;
  Coupling(Matrix plan, Vector row_marginal, Vector col_marginal);

  // Product coupling a (x) b.
  static Coupling product(const Vector& a, const Vector& b);

  const Matrix& plan() const { return plan_; }
  const Vector& row_marginal() const { return row_marginal_; }
  const Vector& col_marginal() const { return col_marginal_; }
  std::size_t rows() const { return static_cast<std::size_t>(plan_.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(plan_.cols()); }

  // Largest per-entry deviation of the plan's row/column sums from the
  // stored marginals.
  double marginal_error() const;
  // Smallest plan entry (negative values indicate an invalid plan).
  double min_entry() const { return plan_.size() == 0 ? 0.0 : plan_.minCoeff(); }

 private:
  Matrix plan_;
  Vector row_marginal_;
  Vector col_marginal_;
};

enum class Sense { kMinimize, kMaximize };

struct TransportResult {
  double value = 0.0;
  Coupling plan;
  Vector dual_row;  // f over rows
  Vector dual_col;  // g over columns
  std::size_t pivots = 0;
};

// Exact transportation simplex. For kMinimize the potentials satisfy
// f_i + g_j <= C_ij with equality on the support; for kMaximize the
// inequality is reversed. Throws Infeasible if sum(a) and sum(b) differ by
// more than 1e-8 and InvalidInput on shape or finiteness problems.
TransportResult solve_exact(const Vector& a, const Vector& b, const Matrix& cost,
                            Sense sense = Sense::kMinimize);

// Same, but among optimal plans for `cost` returns one minimizing
// `secondary` (lexicographic objective). Potentials refer to `cost`.
TransportResult solve_exact_lex(const Vector& a, const Vector& b, const Matrix& cost,
                                const Matrix& secondary, Sense sense = Sense::kMinimize);

struct EntropicOptions {
  double tolerance = 1e-9;       // L1 marginal error at which to stop
  std::size_t max_iterations = 10000;
};

struct EntropicResult {
  Coupling plan;
  // Sum C Pi + eps KL (min) or Sum C Pi - eps KL (max).
  double value_regularized = 0.0;
  double value_plain = 0.0;  // Sum C Pi
  double kl_to_product = 0.0;
  bool converged = false;
  double marginal_error = 0.0;  // L1, max over the two marginals
  std::size_t iterations = 0;
};

// Log-domain Sinkhorn for inf <C,Pi> + eps KL(Pi || a (x) b); the maximize
// variant solves the minimization with -C and restores signs.
EntropicResult solve_entropic(const Vector& a, const Vector& b, const Matrix& cost, double epsilon,
                              Sense sense = Sense::kMinimize, const EntropicOptions& options = {});

// ||x_i - y_j||^p
Matrix distance_cost(const Matrix& x, const Matrix& y, int p);

// p-Wasserstein distance (p in {1, 2}) between discrete measures.
double w_p(const DiscreteMeasure& mu, const DiscreteMeasure& nu, int p);

// Plan export: CSV triplets "i,j,mass" (nonzero entries) and dense JSON.
std::string plan_to_csv(const Coupling& plan);
std::string plan_to_dense_json(const Coupling& plan);

}  // namespace dfot
