// Log-domain Sinkhorn for entropic transport relative to the product
// coupling: Pi_ij = a_i b_j exp((f_i + g_j - C_ij) / eps).

#include <cmath>
#include <limits>
#include <vector>

#include "dfot/error.hpp"
#include "dfot/transport.hpp"

namespace dfot {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(const std::vector<double>& terms) {
  double hi = kNegInf;
  for (double t : terms) hi = std::max(hi, t);
  if (hi == kNegInf) return kNegInf;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - hi);
  return hi + std::log(s);
}

Vector safe_log(const Vector& w) {
  Vector out(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) out[i] = w[i] > 0.0 ? std::log(w[i]) : kNegInf;
  return out;
}

constexpr std::size_t kNewtonSteps = 50;

// Rows made exact for given g: f_i = -eps log sum_j b_j exp((g_j - C_ij)/eps).
void exact_rows(const Vector& log_b, const Matrix& c, double eps, const Vector& g, Vector* f) {
  std::vector<double> terms(static_cast<std::size_t>(c.cols()));
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
      terms[static_cast<std::size_t>(j)] = log_b[j] + (g[j] - c(i, j)) / eps;
    }
    (*f)[i] = -eps * log_sum_exp(terms);
  }
}

Matrix plan_of(const Vector& log_a, const Vector& log_b, const Matrix& c, double eps, const Vector& f,
               const Vector& g) {
  Matrix p(c.rows(), c.cols());
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
      p(i, j) = std::exp(log_a[i] + log_b[j] + (f[i] + g[j] - c(i, j)) / eps);
    }
  }
  return p;
}

// Semi-dual objective sum_j b_j g_j + sum_i a_i f_i(g) (concave in g).
double semi_dual(const Vector& log_a, const Vector& log_b, const Vector& f, const Vector& g) {
  double v = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    if (log_a[i] != kNegInf) v += std::exp(log_a[i]) * f[i];
  }
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    if (log_b[j] != kNegInf) v += std::exp(log_b[j]) * g[j];
  }
  return v;
}

// Newton ascent on the semi-dual, for instances where alternating updates
// mix slowly. Returns the number of steps taken.
std::size_t newton_polish(const Vector& log_a, const Vector& log_b, const Matrix& c, double eps,
                          double tol, std::size_t budget, Vector* f, Vector* g) {
  const Eigen::Index m = c.cols();
  const Vector a = log_a.array().exp();
  const Vector b = log_b.array().exp();
  exact_rows(log_b, c, eps, *g, f);
  std::size_t steps = 0;
  for (; steps < std::min(budget, kNewtonSteps); ++steps) {
    const Matrix p = plan_of(log_a, log_b, c, eps, *f, *g);
    const Vector col = p.colwise().sum().transpose();
    const Vector residual = b - col;
    if (residual.cwiseAbs().sum() <= tol) break;
    // M = diag(col) - P' diag(1/a) P is PSD with 1 in its kernel; adding
    // 11' makes it definite without changing solutions orthogonal to 1.
    Matrix scaled = p;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      scaled.row(i) *= a[i] > 0.0 ? 1.0 / a[i] : 0.0;
    }
    Matrix hess = Matrix(col.asDiagonal()) - p.transpose() * scaled;
    hess.array() += 1.0 / static_cast<double>(m);
    hess.diagonal().array() += 1e-14;
    const Vector step = eps * hess.ldlt().solve(residual);
    if (!step.allFinite()) break;
    const double current = semi_dual(log_a, log_b, *f, *g);
    const double slope = residual.dot(step);
    double t = 1.0;
    bool moved = false;
    for (int k = 0; k < 40; ++k, t *= 0.5) {
      Vector g_try = *g + t * step;
      Vector f_try(f->size());
      exact_rows(log_b, c, eps, g_try, &f_try);
      if (semi_dual(log_a, log_b, f_try, g_try) >= current + 1e-4 * t * slope) {
        *g = std::move(g_try);
        *f = std::move(f_try);
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  return steps;
}

}  // namespace

EntropicResult solve_entropic(const Vector& a, const Vector& b, const Matrix& cost, double epsilon,
                              Sense sense, const EntropicOptions& options) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidInput("entropic regularization requires epsilon > 0");
  }
  if (cost.rows() != a.size() || cost.cols() != b.size()) {
    throw InvalidInput("cost matrix shape does not match marginals");
  }
  if (!cost.allFinite()) throw InvalidInput("cost matrix has non-finite entries");
  if ((a.array() < 0.0).any() || (b.array() < 0.0).any()) {
    throw InvalidInput("marginals must be nonnegative");
  }
  if (std::abs(a.sum() - b.sum()) > 1e-8) throw Infeasible("marginal masses differ");

  const Eigen::Index n = a.size();
  const Eigen::Index m = b.size();
  const Matrix c = (sense == Sense::kMaximize) ? Matrix(-cost) : cost;
  const Vector log_a = safe_log(a);
  const Vector log_b = safe_log(b);
  Vector f = Vector::Zero(n);
  Vector g = Vector::Zero(m);
  std::vector<double> row_terms(static_cast<std::size_t>(m));
  std::vector<double> col_terms(static_cast<std::size_t>(n));
  Vector row_lse(n);
  // Alternating updates at strength `eps` until the row error (columns are
  // exact after each column pass) drops to `tol`. Returns iterations used.
  auto iterate = [&](double eps, std::size_t budget, double tol, bool* reached) {
    std::size_t it = 0;
    *reached = false;
    for (; it < budget; ++it) {
      double row_error = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
          row_terms[static_cast<std::size_t>(j)] = log_b[j] + (g[j] - c(i, j)) / eps;
        }
        row_lse[i] = log_sum_exp(row_terms);
        if (a[i] > 0.0) row_error += std::abs(a[i] * std::exp(f[i] / eps + row_lse[i]) - a[i]);
      }
      if (it > 0 && row_error <= tol) {
        *reached = true;
        break;
      }
      f = -eps * row_lse;
      for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
          col_terms[static_cast<std::size_t>(i)] = log_a[i] + (f[i] - c(i, j)) / eps;
        }
        g[j] = -eps * log_sum_exp(col_terms);
      }
    }
    return it;
  };

  EntropicResult result;
  std::size_t it = 0;
  bool reached = false;
  // Warm start through a decreasing sequence of strengths; small eps alone
  // converges slowly from zero potentials.
  const double spread = c.size() > 0 ? c.maxCoeff() - c.minCoeff() : 0.0;
  for (double stage = spread; stage > 2.0 * epsilon && it < options.max_iterations; stage *= 0.5) {
    it += iterate(stage, std::min<std::size_t>(200, options.max_iterations - it), 1e-4, &reached);
  }
  // Alternating updates first; if they stall, Newton on the semi-dual, then
  // whatever budget remains goes back to alternating updates.
  const std::size_t first = std::min<std::size_t>(1000, options.max_iterations - it);
  it += iterate(epsilon, first, options.tolerance, &reached);
  if (!reached && it < options.max_iterations) {
    it += newton_polish(log_a, log_b, c, epsilon, options.tolerance, options.max_iterations - it, &f, &g);
    it += iterate(epsilon, options.max_iterations - it, options.tolerance, &reached);
  }
  result.iterations = it;

  Matrix plan = Matrix::Zero(n, m);
  double kl = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (a[i] <= 0.0) continue;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (b[j] <= 0.0) continue;
      const double log_ratio = (f[i] + g[j] - c(i, j)) / epsilon;
      const double p = a[i] * b[j] * std::exp(log_ratio);
      plan(i, j) = p;
      kl += p * log_ratio;
    }
  }
  const double row_err = (plan.rowwise().sum() - a).cwiseAbs().sum();
  const double col_err = (plan.colwise().sum().transpose() - b).cwiseAbs().sum();
  result.marginal_error = std::max(row_err, col_err);
  result.converged = result.marginal_error <= options.tolerance;
  result.kl_to_product = std::max(kl, 0.0);
  result.value_plain = (cost.array() * plan.array()).sum();
  result.value_regularized = (sense == Sense::kMaximize)
                                 ? result.value_plain - epsilon * result.kl_to_product
                                 : result.value_plain + epsilon * result.kl_to_product;
  result.plan = Coupling(std::move(plan), a, b);
  return result;
}

}  // namespace dfot
