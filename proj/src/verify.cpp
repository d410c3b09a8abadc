#include "dfot/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dfot/error.hpp"
#include "dfot/io.hpp"

namespace dfot {

namespace {

CheckResult make(std::string name, bool pass, const std::string& detail) {
  return CheckResult{std::move(name), pass, detail};
}

std::string pair_detail(const char* lhs_name, double lhs, const char* rhs_name, double rhs) {
  std::ostringstream out;
  out << lhs_name << '=' << format_double(lhs) << ' ' << rhs_name << '=' << format_double(rhs);
  return out.str();
}

}  // namespace

bool same_law(const DiscreteMeasure& a, const DiscreteMeasure& b, double point_tol, double weight_tol) {
  if (a.dim() != b.dim()) return false;
  const DiscreteMeasure ma = merge_coincident(a.points(), a.weights());
  const DiscreteMeasure mb = merge_coincident(b.points(), b.weights());
  // Zero-mass atoms carry no law.
  auto massive = [](const DiscreteMeasure& m) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m.weight(i) > 0.0) idx.push_back(i);
    }
    return idx;
  };
  const auto ia = massive(ma);
  const auto ib = massive(mb);
  if (ia.size() != ib.size()) return false;
  std::vector<bool> used(ib.size(), false);
  for (std::size_t i : ia) {
    bool found = false;
    for (std::size_t q = 0; q < ib.size(); ++q) {
      if (used[q]) continue;
      if ((ma.point(i) - mb.point(ib[q])).norm() <= point_tol &&
          std::abs(ma.weight(i) - mb.weight(ib[q])) <= weight_tol) {
        used[q] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

CheckResult check_plan_marginals(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                 const Coupling& plan, double tol) {
  if (plan.rows() != mu.size() || plan.cols() != nu.size()) {
    return make("plan_marginals", false, "plan shape does not match the measures");
  }
  const double row_err = (plan.plan().rowwise().sum() - mu.weights()).cwiseAbs().maxCoeff();
  const double col_err = (plan.plan().colwise().sum().transpose() - nu.weights()).cwiseAbs().maxCoeff();
  const double err = std::max(row_err, col_err);
  const bool nonneg = plan.min_entry() >= -tol;
  return make("plan_marginals", err <= tol && nonneg,
              "max_marginal_error=" + format_double(err) + (nonneg ? "" : " negative entries"));
}

CheckResult check_reduction(const FeasibleRegion& region, const DiscreteMeasure& mu,
                            const DiscreteMeasure& nu) {
  const double direct = optimistic(region, mu, nu, OptimisticMethod::kDirect).value;
  const double reduced = optimistic(region, mu, nu, OptimisticMethod::kReduction).value;
  return make("reduction", std::abs(direct - reduced) <= 1e-6,
              pair_detail("direct", direct, "reduction", reduced));
}

CheckResult check_lift(const FeasibleRegion& region, const DiscreteMeasure& mu,
                       const DiscreteMeasure& nu) {
  const double direct = optimistic(region, mu, nu, OptimisticMethod::kDirect).value;
  const DFResult red = optimistic(region, mu, nu, OptimisticMethod::kReduction);
  const CheckResult marg = check_plan_marginals(mu, nu, red.coupling, 1e-9);
  const double lifted = (spo_cost_matrix(region, mu, nu).array() * red.coupling.plan().array()).sum();
  const bool pass = marg.pass && std::abs(lifted - direct) <= 1e-8;
  return make("lift", pass, marg.detail + " " + pair_detail("lifted_cost", lifted, "direct", direct));
}

std::vector<CheckResult> check_duality(const FeasibleRegion& region, const DiscreteMeasure& mu,
                                       const DiscreteMeasure& nu) {
  const DFResult red = optimistic(region, mu, nu, OptimisticMethod::kReduction);
  const double primal = optimistic(region, mu, nu, OptimisticMethod::kDirect).value;
  const double dual = dual_certificate(region, mu, nu, red.dual->f);
  const double gap = primal - dual;
  std::vector<CheckResult> out;
  out.push_back(make("duality_gap", std::abs(gap) <= 1e-6,
                     pair_detail("primal", primal, "dual", dual) + " gap=" + format_double(gap)));
  double worst = 0.0;
  for (double shift : {-1.5, 0.37, 4.0}) {
    const Vector shifted = red.dual->f.array() + shift;
    worst = std::max(worst, std::abs(dual_certificate(region, mu, nu, shifted) - dual));
  }
  out.push_back(make("dual_shift_invariance", worst <= 1e-12, "max_change=" + format_double(worst)));
  return out;
}

CheckResult check_rescaling(const FeasibleRegion& region, const DiscreteMeasure& mu) {
  double worst = 0.0;
  for (double c : {0.5, 2.0, 7.25}) {
    const DiscreteMeasure scaled(mu.points() * c, mu.weights());
    worst = std::max(worst, std::abs(optimistic(region, mu, scaled).value));
  }
  return make("rescaling", worst <= 1e-9, "max_value=" + format_double(worst));
}

std::vector<CheckResult> check_bounds(const FeasibleRegion& region, const DiscreteMeasure& mu,
                                      const DiscreteMeasure& nu) {
  std::vector<CheckResult> out;
  const double opt = optimistic(region, mu, nu).value;
  const double reg = regret(region, mu, nu);
  const double rob = robust(region, mu, nu).value;
  const double tol = 1e-9;
  out.push_back(make("ordering", opt <= reg + tol && reg <= rob + tol,
                     "optimistic=" + format_double(opt) + " regret=" + format_double(reg) +
                         " robust=" + format_double(rob)));

  const double sym = symmetric(region, mu, nu, SymmetricKind::kAdditive, DFMode::kOptimistic);
  const double w1_bound = region.diameter() * w_p(mu, nu, 1);
  out.push_back(make("w1_bound", sym <= w1_bound + 1e-8, pair_detail("sym_add", sym, "bound", w1_bound)));

  const DiscreteMeasure pmu = pushforward(region, mu).as_measure();
  const DiscreteMeasure pnu = pushforward(region, nu).as_measure();
  const double w2_bound = std::sqrt(second_moment(nu)) * w_p(pmu, pnu, 2);
  out.push_back(make("w2_pushforward_bound", opt <= w2_bound + 1e-8,
                     pair_detail("optimistic", opt, "bound", w2_bound)));

  double mean_norm = 0.0;
  for (std::size_t j = 0; j < nu.size(); ++j) mean_norm += nu.weight(j) * nu.point(j).norm();
  const double rob_bound = region.diameter() * mean_norm;
  out.push_back(make("robust_bound", rob <= rob_bound + 1e-8, pair_detail("robust", rob, "bound", rob_bound)));
  return out;
}

CheckResult check_one_sided(const FeasibleRegion& region, const DiscreteMeasure& mu,
                            const DiscreteMeasure& nu, const std::vector<double>& t_grid) {
  double worst = -INFINITY;
  bool pass = true;
  for (const BoundCheck& c : one_sided_bound_check(region, mu, nu, t_grid)) {
    pass = pass && c.pass;
    worst = std::max(worst, c.lhs - c.rhs);
  }
  return make("one_sided_bound", pass, "max_excess=" + format_double(worst));
}

CheckResult check_endpoints(const FeasibleRegion& region, const DiscreteMeasure& mu,
                            const DiscreteMeasure& nu) {
  bool pass = true;
  for (CouplingKind kind : {CouplingKind::kOptimistic, CouplingKind::kRobust, CouplingKind::kIndependent,
                            CouplingKind::kW2}) {
    const Coupling gamma = build_coupling(region, mu, nu, kind);
    pass = pass && same_law(interpolant(gamma, mu, nu, 0.0), mu) && same_law(interpolant(gamma, mu, nu, 1.0), nu);
  }
  return make("interpolant_endpoints", pass, pass ? "t=0 -> mu, t=1 -> nu" : "endpoint mismatch");
}

std::vector<CheckResult> check_mccann(const FeasibleRegion& region, const DiscreteMeasure& mu,
                                      const DiscreteMeasure& nu) {
  const ReducedMcCann path(region, mu, nu);
  const std::vector<double> times{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<ReducedMcCann::Slice> slices;
  for (double t : times) slices.push_back(path.slice(t));
  const double w2 = std::sqrt(path.w2_squared());

  double speed_err = 0.0;
  for (std::size_t s = 0; s < times.size(); ++s) {
    for (std::size_t t = s + 1; t < times.size(); ++t) {
      const double d = w_p(slices[s].nu_t, slices[t].nu_t, 2);
      speed_err = std::max(speed_err, std::abs(d - (times[t] - times[s]) * w2));
    }
  }
  double disp_err = 0.0;
  double lift_err = 0.0;
  double opt_err = 0.0;
  for (std::size_t s = 0; s < times.size(); ++s) {
    const auto& sl = slices[s];
    disp_err = std::max(disp_err, std::abs(displacement_energy(path, sl) - times[s] * times[s] * path.w2_squared()));
    Matrix aggregated = Matrix::Zero(sl.eta_t.plan().rows(), sl.eta_t.plan().cols());
    for (std::size_t i = 0; i < mu.size(); ++i) {
      aggregated.row(static_cast<Eigen::Index>(path.alpha().region_map[i])) +=
          sl.lifted.plan().row(static_cast<Eigen::Index>(i));
    }
    lift_err = std::max(lift_err, (aggregated - sl.eta_t.plan()).cwiseAbs().maxCoeff());
    const double lifted_cost = (spo_cost_matrix(region, mu, sl.nu_t).array() * sl.lifted.plan().array()).sum();
    const double best = optimistic(region, mu, sl.nu_t, OptimisticMethod::kDirect).value;
    opt_err = std::max(opt_err, std::abs(lifted_cost - best));
  }
  return {make("mccann_constant_speed", speed_err <= 1e-6, "max_error=" + format_double(speed_err)),
          make("mccann_displacement", disp_err <= 1e-6, "max_error=" + format_double(disp_err)),
          make("mccann_lift_consistency", lift_err <= 1e-10, "max_error=" + format_double(lift_err)),
          make("mccann_lift_optimality", opt_err <= 1e-6, "max_error=" + format_double(opt_err))};
}

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names{"reduction", "lift",     "duality",  "rescaling", "bounds",
                                              "one-sided", "endpoints", "mccann"};
  return names;
}

std::vector<CheckResult> run_checks(const FeasibleRegion& region, const DiscreteMeasure& mu,
                                    const DiscreteMeasure& nu, const std::vector<std::string>& names) {
  std::vector<std::string> todo;
  for (const auto& n : names) {
    if (n == "all") {
      todo.insert(todo.end(), check_names().begin(), check_names().end());
    } else if (std::find(check_names().begin(), check_names().end(), n) != check_names().end()) {
      todo.push_back(n);
    } else {
      throw InvalidInput("unknown check '" + n + "'");
    }
  }
  std::vector<CheckResult> out;
  auto append = [&out](std::vector<CheckResult> more) {
    out.insert(out.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
  };
  for (const auto& n : todo) {
    if (n == "reduction") out.push_back(check_reduction(region, mu, nu));
    if (n == "lift") out.push_back(check_lift(region, mu, nu));
    if (n == "duality") append(check_duality(region, mu, nu));
    if (n == "rescaling") out.push_back(check_rescaling(region, mu));
    if (n == "bounds") append(check_bounds(region, mu, nu));
    if (n == "one-sided") {
      out.push_back(check_one_sided(region, mu, nu, {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}));
    }
    if (n == "endpoints") out.push_back(check_endpoints(region, mu, nu));
    if (n == "mccann") append(check_mccann(region, mu, nu));
  }
  return out;
}

}  // namespace dfot
