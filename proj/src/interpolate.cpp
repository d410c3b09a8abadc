#include "dfot/interpolate.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>
#include <utility>

#include "dfot/error.hpp"

namespace dfot {

namespace {

void check_time(double t) {
  if (!std::isfinite(t) || t < 0.0 || t > 1.0) {
    throw InvalidInput("interpolation time must lie in [0, 1], got " + std::to_string(t));
  }
}

// Atoms (1 - t) x_i + t y_j for all cells above the mass floor, in row-major
// cell order.
std::pair<Matrix, Vector> displaced_atoms(const Matrix& plan, const Matrix& x, const Matrix& y,
                                          double t, std::vector<std::pair<Eigen::Index, Eigen::Index>>* cells) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> kept;
  for (Eigen::Index i = 0; i < plan.rows(); ++i) {
    for (Eigen::Index j = 0; j < plan.cols(); ++j) {
      if (plan(i, j) > kNegligibleMass) kept.emplace_back(i, j);
    }
  }
  if (kept.empty()) throw InvalidInput("coupling has no mass");
  Matrix pts(static_cast<Eigen::Index>(kept.size()), x.cols());
  Vector w(static_cast<Eigen::Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) {
    const auto [i, j] = kept[c];
    const auto r = static_cast<Eigen::Index>(c);
    pts.row(r) = (1.0 - t) * x.row(i) + t * y.row(j);
    w[r] = plan(i, j);
  }
  // Dropping dust leaves a tiny deficit; renormalize so the slice is a
  // probability measure.
  w /= w.sum();
  if (cells) *cells = std::move(kept);
  return {std::move(pts), std::move(w)};
}

}  // namespace

DiscreteMeasure interpolant(const Coupling& gamma, const DiscreteMeasure& mu,
                            const DiscreteMeasure& nu, double t, double merge_tol) {
  check_time(t);
  if (mu.dim() != nu.dim()) throw InvalidInput("measures live in different dimensions");
  if (gamma.rows() != mu.size() || gamma.cols() != nu.size()) {
    throw InvalidInput("coupling shape does not match the measures");
  }
  auto [pts, w] = displaced_atoms(gamma.plan(), mu.points(), nu.points(), t, nullptr);
  return merge_coincident(pts, w, merge_tol);
}

InterpolantPath interpolant_path(const Coupling& gamma, const DiscreteMeasure& mu,
                                 const DiscreteMeasure& nu, const std::vector<double>& times) {
  for (double t : times) check_time(t);
  std::vector<std::future<DiscreteMeasure>> jobs;
  jobs.reserve(times.size());
  for (double t : times) {
    jobs.push_back(std::async(std::launch::async,
                              [&gamma, &mu, &nu, t] { return interpolant(gamma, mu, nu, t); }));
  }
  InterpolantPath path{gamma, times, {}};
  path.measures.reserve(times.size());
  for (auto& job : jobs) path.measures.push_back(job.get());
  return path;
}

CouplingKind parse_coupling_kind(const std::string& name) {
  if (name == "optimistic") return CouplingKind::kOptimistic;
  if (name == "robust") return CouplingKind::kRobust;
  if (name == "independent") return CouplingKind::kIndependent;
  if (name == "w2") return CouplingKind::kW2;
  throw InvalidInput("unknown coupling '" + name + "'");
}

Coupling build_coupling(const FeasibleRegion& region, const DiscreteMeasure& mu,
                        const DiscreteMeasure& nu, CouplingKind kind) {
  switch (kind) {
    case CouplingKind::kOptimistic:
      return optimistic(region, mu, nu, OptimisticMethod::kDirect).coupling;
    case CouplingKind::kRobust:
      return robust(region, mu, nu).coupling;
    case CouplingKind::kIndependent:
      check_same_dim(region, mu);
      check_same_dim(region, nu);
      return Coupling::product(mu.weights(), nu.weights());
    case CouplingKind::kW2: {
      check_same_dim(region, mu);
      check_same_dim(region, nu);
      return solve_exact(mu.weights(), nu.weights(), distance_cost(mu.points(), nu.points(), 2)).plan;
    }
  }
  throw InvalidInput("unknown coupling kind");
}

DiscreteMeasure df_average(const FeasibleRegion& region, const DiscreteMeasure& mu,
                           const DiscreteMeasure& nu, CouplingKind kind) {
  return interpolant(build_coupling(region, mu, nu, kind), mu, nu, 0.5);
}

std::vector<BoundCheck> one_sided_bound_check(const FeasibleRegion& region,
                                              const DiscreteMeasure& mu,
                                              const DiscreteMeasure& nu,
                                              const std::vector<double>& t_grid) {
  const DFResult endpoint = optimistic(region, mu, nu, OptimisticMethod::kDirect);
  std::vector<BoundCheck> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    const DiscreteMeasure nu_t = interpolant(endpoint.coupling, mu, nu, t);
    BoundCheck check;
    check.t = t;
    check.lhs = optimistic(region, mu, nu_t).value;
    check.rhs = t * endpoint.value;
    check.pass = check.lhs <= check.rhs + 1e-7;
    out.push_back(check);
  }
  return out;
}

ReducedMcCann::ReducedMcCann(const FeasibleRegion& region, const DiscreteMeasure& mu,
                             const DiscreteMeasure& nu)
    : region_(region), mu_(mu), nu_(nu), alpha_(pushforward(region, mu, /*negate=*/true)) {
  check_same_dim(region, nu);
  TransportResult tr =
      solve_exact(alpha_.masses, nu.weights(), distance_cost(alpha_.atoms, nu.points(), 2));
  eta_ = std::move(tr.plan);
  w2_squared_ = std::max(tr.value, 0.0);
}

ReducedMcCann::Slice ReducedMcCann::slice(double t) const {
  check_time(t);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> cells;
  auto [pts, w] = displaced_atoms(eta_.plan(), alpha_.atoms, nu_.points(), t, &cells);
  MergedAtoms merged = merge_coincident_indexed(pts, w, kMergeTolerance);

  Matrix eta_t = Matrix::Zero(alpha_.atoms.rows(), merged.measure.points().rows());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto [k, j] = cells[c];
    eta_t(k, static_cast<Eigen::Index>(merged.atom_of[c])) += eta_.plan()(k, j);
  }
  // Keep eta_t consistent with the renormalized nu_t.
  const double total = eta_t.sum();
  eta_t *= 1.0 / total;
  Vector rows = eta_t.rowwise().sum();
  Coupling eta_coupling(eta_t, rows, merged.measure.weights());
  Coupling lifted = lift_coupling(region_, mu_, eta_coupling);
  return Slice{t, std::move(merged.measure), std::move(eta_coupling), std::move(lifted)};
}

ReducedMcCann::Slice reduced_mccann(const FeasibleRegion& region, const DiscreteMeasure& mu,
                                    const DiscreteMeasure& nu, double t) {
  return ReducedMcCann(region, mu, nu).slice(t);
}

double displacement_energy(const ReducedMcCann& path, const ReducedMcCann::Slice& slice) {
  const Matrix cost = distance_cost(path.alpha().atoms, slice.nu_t.points(), 2);
  return (cost.array() * slice.eta_t.plan().array()).sum();
}

Coupling monotone_coupling_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.dim() != 1 || nu.dim() != 1) throw InvalidInput("monotone coupling needs 1D measures");
  auto order = [](const DiscreteMeasure& m) {
    std::vector<std::size_t> idx(m.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&m](std::size_t a, std::size_t b) {
      return m.points()(static_cast<Eigen::Index>(a), 0) < m.points()(static_cast<Eigen::Index>(b), 0);
    });
    return idx;
  };
  const auto ia = order(mu);
  const auto ib = order(nu);
  Matrix plan = Matrix::Zero(mu.points().rows(), nu.points().rows());
  std::size_t p = 0;
  std::size_t q = 0;
  double left_a = mu.weight(ia[0]);
  double left_b = nu.weight(ib[0]);
  while (p < ia.size() && q < ib.size()) {
    const double m = std::min(left_a, left_b);
    plan(static_cast<Eigen::Index>(ia[p]), static_cast<Eigen::Index>(ib[q])) += m;
    left_a -= m;
    left_b -= m;
    if (left_a <= left_b) {
      if (++p < ia.size()) left_a = mu.weight(ia[p]);
    } else {
      if (++q < ib.size()) left_b = nu.weight(ib[q]);
    }
  }
  return Coupling(std::move(plan), mu.weights(), nu.weights());
}

double measure_mean_1d(const DiscreteMeasure& m) {
  if (m.dim() != 1) throw InvalidInput("expected a 1D measure");
  return m.weights().dot(m.points().col(0));
}

double measure_std_1d(const DiscreteMeasure& m) {
  const double mean = measure_mean_1d(m);
  const Vector centered = m.points().col(0).array() - mean;
  return std::sqrt(std::max(m.weights().dot(centered.cwiseProduct(centered)), 0.0));
}

std::string histogram_grid_csv(const InterpolantPath& path, const GridSpec& spec) {
  if (spec.bins == 0) throw InvalidInput("grid needs at least one bin");
  std::ostringstream out;
  out << "t,gx,gy,mass\n";
  if (path.measures.empty()) return out.str();
  const std::size_t dim = path.measures.front().dim();
  if (spec.dim_x >= dim) throw InvalidInput("grid x dimension out of range");
  const bool has_y = spec.dim_y < dim;
  double lo[2] = {INFINITY, INFINITY};
  double hi[2] = {-INFINITY, -INFINITY};
  auto coord = [&](const DiscreteMeasure& m, Eigen::Index i, int axis) {
    if (axis == 1 && !has_y) return 0.0;
    return m.points()(i, static_cast<Eigen::Index>(axis == 0 ? spec.dim_x : spec.dim_y));
  };
  for (const auto& m : path.measures) {
    for (Eigen::Index i = 0; i < m.points().rows(); ++i) {
      for (int a = 0; a < 2; ++a) {
        lo[a] = std::min(lo[a], coord(m, i, a));
        hi[a] = std::max(hi[a], coord(m, i, a));
      }
    }
  }
  const auto bins = static_cast<long>(spec.bins);
  double width[2];
  for (int a = 0; a < 2; ++a) {
    width[a] = hi[a] > lo[a] ? (hi[a] - lo[a]) / static_cast<double>(bins) : 1.0;
  }
  auto bin_of = [&](double v, int a) {
    const long b = static_cast<long>(std::floor((v - lo[a]) / width[a]));
    return std::clamp(b, 0L, bins - 1);
  };
  out << std::setprecision(17);
  for (std::size_t s = 0; s < path.measures.size(); ++s) {
    const auto& m = path.measures[s];
    std::map<std::pair<long, long>, double> cells;
    for (Eigen::Index i = 0; i < m.points().rows(); ++i) {
      cells[{bin_of(coord(m, i, 0), 0), bin_of(coord(m, i, 1), 1)}] += m.weights()[i];
    }
    for (const auto& [cell, mass] : cells) {
      if (mass <= 0.0) continue;
      const double gx = lo[0] + (static_cast<double>(cell.first) + 0.5) * width[0];
      const double gy = lo[1] + (static_cast<double>(cell.second) + 0.5) * width[1];
      out << path.times[s] << ',' << gx << ',' << gy << ',' << mass << '\n';
    }
  }
  return out.str();
}

}  // namespace dfot
