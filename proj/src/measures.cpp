#include "dfot/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dfot/error.hpp"

namespace dfot {

DiscreteMeasure::DiscreteMeasure(Matrix points, Vector weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.rows() == 0) throw InvalidInput("measure needs at least one atom");
  if (points_.rows() != weights_.size()) {
    throw InvalidInput("measure has " + std::to_string(points_.rows()) + " points but " +
                       std::to_string(weights_.size()) + " weights");
  }
  if (!points_.allFinite() || !weights_.allFinite()) {
    throw InvalidInput("measure has non-finite entries");
  }
  if ((weights_.array() < 0.0).any()) throw InvalidInput("measure has negative weights");
  if (std::abs(weights_.sum() - 1.0) > 1e-9) {
    throw InvalidInput("measure weights sum to " + std::to_string(weights_.sum()) + ", not 1");
  }
}

DiscreteMeasure from_samples(const Matrix& rows) {
  if (rows.rows() == 0) throw InvalidInput("cannot build an empirical measure from no samples");
  const auto n = rows.rows();
  return DiscreteMeasure(rows, Vector::Constant(n, 1.0 / static_cast<double>(n)));
}

DiscreteMeasure from_samples(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw InvalidInput("cannot build an empirical measure from no samples");
  const std::size_t d = rows.front().size();
  Matrix pts(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != d) throw InvalidInput("samples have differing dimensions");
    for (std::size_t j = 0; j < d; ++j) {
      pts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return from_samples(pts);
}

void check_same_dim(const FeasibleRegion& region, const DiscreteMeasure& m) {
  if (region.dim() != m.dim()) {
    throw InvalidInput("measure has dimension " + std::to_string(m.dim()) +
                       ", feasible region has dimension " + std::to_string(region.dim()));
  }
}

PushforwardMeasure pushforward(const FeasibleRegion& region, const DiscreteMeasure& m, bool negate) {
  check_same_dim(region, m);
  PushforwardMeasure out;
  out.atoms = negate ? Matrix(-region.extreme_points()) : region.extreme_points();
  out.masses = Vector::Zero(static_cast<Eigen::Index>(region.size()));
  out.region_map.resize(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const std::size_t k = region.region_index(m.point(i));
    out.region_map[i] = k;
    out.masses[static_cast<Eigen::Index>(k)] += m.weight(i);
  }
  return out;
}

namespace {

void check_common_support(const Vector& p, const Vector& q) {
  if (p.size() != q.size()) {
    throw InvalidInput("weight vectors have lengths " + std::to_string(p.size()) + " and " +
                       std::to_string(q.size()));
  }
}

}  // namespace

double tv_distance(const Vector& p, const Vector& q) {
  check_common_support(p, q);
  return 0.5 * (p - q).cwiseAbs().sum();
}

double kl_divergence(const Vector& p, const Vector& q) {
  check_common_support(p, q);
  double kl = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return kInfiniteDivergence;
    kl += p[i] * std::log(p[i] / q[i]);
  }
  return kl;
}

double second_moment(const DiscreteMeasure& m) {
  return m.weights().dot(m.points().rowwise().squaredNorm());
}

double support_diameter(const DiscreteMeasure& m) {
  double diam = 0.0;
  const Matrix& pts = m.points();
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < pts.rows(); ++j) {
      diam = std::max(diam, (pts.row(i) - pts.row(j)).norm());
    }
  }
  return diam;
}

DiscreteMeasure midpoint_mixture(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.dim() != nu.dim()) throw InvalidInput("mixture of measures with different dimensions");
  const auto n = mu.points().rows();
  const auto m = nu.points().rows();
  Matrix pts(n + m, mu.points().cols());
  pts << mu.points(), nu.points();
  Vector w(n + m);
  w << 0.5 * mu.weights(), 0.5 * nu.weights();
  return DiscreteMeasure(std::move(pts), std::move(w));
}

DiscreteMeasure merge_coincident(const Matrix& points, const Vector& weights, double tol) {
  return merge_coincident_indexed(points, weights, tol).measure;
}

MergedAtoms merge_coincident_indexed(const Matrix& points, const Vector& weights, double tol) {
  const auto n = points.rows();
  if (n == 0) throw InvalidInput("cannot merge an empty atom list");
  // Sweep in order of the first coordinate; atoms within tol must also be
  // within tol in that coordinate, so the inner scan stops early.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return points(i, 0) < points(j, 0); });

  std::vector<Eigen::Index> rep(static_cast<std::size_t>(n), -1);
  for (std::size_t a = 0; a < order.size(); ++a) {
    const Eigen::Index i = order[a];
    if (rep[static_cast<std::size_t>(i)] >= 0) continue;
    rep[static_cast<std::size_t>(i)] = i;
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      const Eigen::Index j = order[b];
      if (points(j, 0) - points(i, 0) >= tol) break;
      if (rep[static_cast<std::size_t>(j)] >= 0) continue;
      if ((points.row(i) - points.row(j)).norm() < tol) rep[static_cast<std::size_t>(j)] = i;
    }
  }
  // A cluster is represented by its lowest-index member.
  std::vector<Eigen::Index> lowest(static_cast<std::size_t>(n), -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto& l = lowest[static_cast<std::size_t>(rep[static_cast<std::size_t>(i)])];
    if (l < 0 || i < l) l = i;
  }

  std::vector<Eigen::Index> slot(static_cast<std::size_t>(n), -1);
  std::vector<Eigen::Index> kept;
  std::vector<double> mass;
  std::vector<std::size_t> atom_of(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index r = rep[static_cast<std::size_t>(i)];
    auto& s = slot[static_cast<std::size_t>(r)];
    if (s < 0) {
      s = static_cast<Eigen::Index>(kept.size());
      kept.push_back(lowest[static_cast<std::size_t>(r)]);
      mass.push_back(0.0);
    }
    mass[static_cast<std::size_t>(s)] += weights[i];
    atom_of[static_cast<std::size_t>(i)] = static_cast<std::size_t>(s);
  }
  Matrix out_pts(static_cast<Eigen::Index>(kept.size()), points.cols());
  Vector out_w(static_cast<Eigen::Index>(kept.size()));
  for (std::size_t s = 0; s < kept.size(); ++s) {
    out_pts.row(static_cast<Eigen::Index>(s)) = points.row(kept[s]);
    out_w[static_cast<Eigen::Index>(s)] = mass[s];
  }
  return {DiscreteMeasure(std::move(out_pts), std::move(out_w)), std::move(atom_of)};
}

}  // namespace dfot
