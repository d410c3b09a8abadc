#include "dfot/dfdist.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dfot/error.hpp"

namespace dfot {

std::string to_string(DFMethod method) {
  switch (method) {
    case DFMethod::kDirectLP:
      return "direct_lp";
    case DFMethod::kReduction:
      return "reduction";
    case DFMethod::kEntropic:
      return "entropic";
    case DFMethod::kProduct:
      return "product";
  }
  return "unknown";
}

namespace {

void check_dims(const FeasibleRegion& region, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  check_same_dim(region, mu);
  check_same_dim(region, nu);
}

std::vector<std::size_t> region_indices(const FeasibleRegion& region, const DiscreteMeasure& m) {
  std::vector<std::size_t> idx(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) idx[i] = region.region_index(m.point(i));
  return idx;
}

}  // namespace

Matrix spo_cost_matrix(const FeasibleRegion& region, const DiscreteMeasure& mu,
                       const DiscreteMeasure& nu) {
  check_dims(region, mu, nu);
  const auto kx = region_indices(region, mu);
  const auto ky = region_indices(region, nu);
  // objective(k, j) = w_k' y_j
  const Matrix objective = region.extreme_points() * nu.points().transpose();
  Matrix cost(mu.points().rows(), nu.points().rows());
  for (Eigen::Index j = 0; j < cost.cols(); ++j) {
    const double z = objective(static_cast<Eigen::Index>(ky[static_cast<std::size_t>(j)]), j);
    for (Eigen::Index i = 0; i < cost.rows(); ++i) {
      const std::size_t k = kx[static_cast<std::size_t>(i)];
      cost(i, j) = (k == ky[static_cast<std::size_t>(j)])
                       ? 0.0
                       : std::max(objective(static_cast<Eigen::Index>(k), j) - z, 0.0);
    }
  }
  return cost;
}

TargetStats target_stats(const FeasibleRegion& region, const DiscreteMeasure& nu) {
  check_same_dim(region, nu);
  TargetStats stats;
  stats.second_moment = second_moment(nu);
  for (std::size_t j = 0; j < nu.size(); ++j) {
    stats.value_integral += nu.weight(j) * region.value(nu.point(j));
  }
  return stats;
}

double df_divergence(const FeasibleRegion& region, const DiscreteMeasure& mu,
                     const DiscreteMeasure& nu, const Coupling& gamma) {
  check_dims(region, mu, nu);
  if (gamma.rows() != mu.size() || gamma.cols() != nu.size()) {
    throw InvalidInput("coupling shape does not match the measures");
  }
  const double row_err = (gamma.plan().rowwise().sum() - mu.weights()).cwiseAbs().maxCoeff();
  const double col_err =
      (gamma.plan().colwise().sum().transpose() - nu.weights()).cwiseAbs().maxCoeff();
  if (row_err > 1e-9 || col_err > 1e-9) {
    throw InvalidInput("coupling marginals deviate from the measures by " +
                       std::to_string(std::max(row_err, col_err)));
  }
  return (spo_cost_matrix(region, mu, nu).array() * gamma.plan().array()).sum();
}

DFResult optimistic(const FeasibleRegion& region, const DiscreteMeasure& mu,
                    const DiscreteMeasure& nu, OptimisticMethod method) {
  check_dims(region, mu, nu);
  if (method == OptimisticMethod::kAuto) {
    method = mu.size() > region.size() ? OptimisticMethod::kReduction : OptimisticMethod::kDirect;
  }
  if (method == OptimisticMethod::kReduction) {
    return optimistic_reduction(region, mu, nu, target_stats(region, nu));
  }
  const Matrix cost = spo_cost_matrix(region, mu, nu);
  // Among SPO-optimal plans prefer the geometrically closest pairing.
  const Matrix tie_break = distance_cost(mu.points(), nu.points(), 2);
  TransportResult tr = solve_exact_lex(mu.weights(), nu.weights(), cost, tie_break);
  DFResult out;
  out.value = tr.value;
  out.coupling = std::move(tr.plan);
  out.dual = DualPotentials{std::move(tr.dual_row), std::move(tr.dual_col)};
  out.method = DFMethod::kDirectLP;
  return out;
}

DFResult optimistic_reduction(const FeasibleRegion& region, const DiscreteMeasure& mu,
                              const DiscreteMeasure& nu, const TargetStats& stats) {
  check_dims(region, mu, nu);
  const PushforwardMeasure alpha = pushforward(region, mu, /*negate=*/true);
  const Matrix quadratic = distance_cost(alpha.atoms, nu.points(), 2);
  TransportResult tr = solve_exact(alpha.masses, nu.weights(), quadratic);

  const Vector atom_sq = alpha.atoms.rowwise().squaredNorm();
  const double alpha_sq = alpha.masses.dot(atom_sq);
  DFResult out;
  out.value = 0.5 * (tr.value - alpha_sq - stats.second_moment) - stats.value_integral;
  // The closed form cancels large terms; rounding can leave a tiny negative.
  if (out.value < 0.0 && out.value > -1e-9) out.value = 0.0;

  // Potentials of the quadratic problem map onto (f, g) feasible for
  // f_k + g(y) <= c_k(y).
  DualPotentials dual;
  dual.f = 0.5 * tr.dual_row - 0.5 * atom_sq;
  dual.g.resize(nu.points().rows());
  for (std::size_t j = 0; j < nu.size(); ++j) {
    const Vector y = nu.point(j);
    dual.g[static_cast<Eigen::Index>(j)] =
        0.5 * tr.dual_col[static_cast<Eigen::Index>(j)] - 0.5 * y.squaredNorm() - region.value(y);
  }
  out.dual = std::move(dual);
  out.coupling = lift_coupling(region, mu, tr.plan);
  out.reduced_coupling = std::move(tr.plan);
  out.method = DFMethod::kReduction;
  return out;
}

DFResult robust(const FeasibleRegion& region, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  check_dims(region, mu, nu);
  const Matrix cost = spo_cost_matrix(region, mu, nu);
  const Matrix tie_break = distance_cost(mu.points(), nu.points(), 2);
  TransportResult tr = solve_exact_lex(mu.weights(), nu.weights(), cost, tie_break, Sense::kMaximize);
  DFResult out;
  out.value = tr.value;
  out.coupling = std::move(tr.plan);
  out.dual = DualPotentials{std::move(tr.dual_row), std::move(tr.dual_col)};
  out.method = DFMethod::kDirectLP;
  return out;
}

double regret(const FeasibleRegion& region, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  const Matrix cost = spo_cost_matrix(region, mu, nu);
  return mu.weights().dot(cost * nu.weights());
}

namespace {

double extremal(const FeasibleRegion& region, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                DFMode mode) {
  return mode == DFMode::kOptimistic ? optimistic(region, mu, nu).value
                                     : robust(region, mu, nu).value;
}

}  // namespace

double symmetric(const FeasibleRegion& region, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                 SymmetricKind kind, DFMode mode) {
  check_dims(region, mu, nu);
  if (kind == SymmetricKind::kAdditive) {
    return extremal(region, mu, nu, mode) + extremal(region, nu, mu, mode);
  }
  const DiscreteMeasure mid = midpoint_mixture(mu, nu);
  return 0.5 * extremal(region, mu, mid, mode) + 0.5 * extremal(region, nu, mid, mode);
}

DFResult entropic_df(const FeasibleRegion& region, const DiscreteMeasure& mu,
                     const DiscreteMeasure& nu, double epsilon, DFMode mode,
                     const EntropicOptions& options) {
  const Matrix cost = spo_cost_matrix(region, mu, nu);
  EntropicResult er = solve_entropic(mu.weights(), nu.weights(), cost, epsilon,
                                     mode == DFMode::kOptimistic ? Sense::kMinimize
                                                                 : Sense::kMaximize,
                                     options);
  DFResult out;
  out.value = er.value_regularized;
  out.coupling = std::move(er.plan);
  out.entropic = EntropicStatus{epsilon,          er.value_plain, er.kl_to_product,
                                er.converged,     er.marginal_error, er.iterations};
  out.method = DFMethod::kEntropic;
  return out;
}

Coupling lift_coupling(const FeasibleRegion& region, const DiscreteMeasure& mu,
                       const Coupling& reduced_plan) {
  check_same_dim(region, mu);
  if (reduced_plan.rows() != region.size()) {
    throw InvalidInput("reduced plan needs one row per extreme point");
  }
  const PushforwardMeasure alpha = pushforward(region, mu, /*negate=*/true);
  const Vector row_sums = reduced_plan.plan().rowwise().sum();
  const double mismatch = (row_sums - alpha.masses).cwiseAbs().maxCoeff();
  if (mismatch > 1e-9) {
    throw InvalidInput("reduced plan row marginal differs from the push-forward masses by " +
                       std::to_string(mismatch));
  }
  const Vector col_marginal = reduced_plan.plan().colwise().sum().transpose();
  Matrix plan = Matrix::Zero(mu.points().rows(), reduced_plan.plan().cols());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(alpha.region_map[i]);
    if (row_sums[k] <= 0.0) continue;  // only reachable for zero-weight atoms
    plan.row(static_cast<Eigen::Index>(i)) = reduced_plan.plan().row(k) * (mu.weight(i) / row_sums[k]);
  }
  return Coupling(std::move(plan), mu.weights(), col_marginal);
}

double dual_certificate(const FeasibleRegion& region, const DiscreteMeasure& mu,
                        const DiscreteMeasure& nu, const Vector& f) {
  check_dims(region, mu, nu);
  if (static_cast<std::size_t>(f.size()) != region.size()) {
    throw InvalidInput("dual vector needs one entry per extreme point");
  }
  if (!f.allFinite()) throw InvalidInput("dual vector has non-finite entries");
  const PushforwardMeasure push = pushforward(region, mu);
  double objective = f.dot(push.masses);
  for (std::size_t j = 0; j < nu.size(); ++j) {
    const Vector envelope = region.reduced_costs(nu.point(j)) - f;
    objective += nu.weight(j) * envelope.minCoeff();
  }
  return objective;
}

}  // namespace dfot
