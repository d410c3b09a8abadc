#include "dfot/polytope.hpp"

#include <cmath>
#include <string>

#include "dfot/error.hpp"

namespace dfot {

FeasibleRegion::FeasibleRegion(Matrix extreme_points) : points_(std::move(extreme_points)) {
  if (points_.rows() == 0 || points_.cols() == 0) {
    throw InvalidInput("feasible region needs at least one extreme point of positive dimension");
  }
  if (!points_.allFinite()) {
    throw InvalidInput("feasible region has non-finite coordinates");
  }
  for (Eigen::Index i = 0; i < points_.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < points_.rows(); ++j) {
      const double dist = (points_.row(i) - points_.row(j)).norm();
      if (dist <= 1e-12) {
        throw InvalidInput("extreme points " + std::to_string(i) + " and " + std::to_string(j) +
                           " coincide");
      }
      diameter_ = std::max(diameter_, dist);
    }
  }
}

FeasibleRegion FeasibleRegion::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw InvalidInput("feasible region needs at least one extreme point");
  const std::size_t d = rows.front().size();
  Matrix pts(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != d) throw InvalidInput("extreme points have differing dimensions");
    for (std::size_t j = 0; j < d; ++j) {
      pts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return FeasibleRegion(std::move(pts));
}

void FeasibleRegion::check_dim(const CostVector& x) const {
  if (static_cast<std::size_t>(x.size()) != dim()) {
    throw InvalidInput("cost vector has dimension " + std::to_string(x.size()) +
                       ", feasible region has dimension " + std::to_string(dim()));
  }
}

OracleResult FeasibleRegion::oracle(const CostVector& x) const {
  const std::size_t k = region_index(x);
  return {k, point(k)};
}

std::size_t FeasibleRegion::region_index(const CostVector& x) const {
  check_dim(x);
  const Vector objective = points_ * x;
  const double best = objective.minCoeff();
  for (Eigen::Index k = 0; k < objective.size(); ++k) {
    if (objective[k] <= best + kOracleTieTolerance) return static_cast<std::size_t>(k);
  }
  return 0;  // unreachable: the minimizer itself qualifies
}

double FeasibleRegion::value(const CostVector& x) const {
  check_dim(x);
  // Evaluate at the tie-broken decision so value(x) == x'w*(x) exactly.
  return x.dot(points_.row(static_cast<Eigen::Index>(region_index(x))).transpose());
}

double FeasibleRegion::spo_loss(const CostVector& x, const CostVector& y) const {
  check_dim(x);
  check_dim(y);
  const auto kx = static_cast<Eigen::Index>(region_index(x));
  const auto ky = static_cast<Eigen::Index>(region_index(y));
  if (kx == ky) return 0.0;
  const double loss = y.dot(points_.row(kx).transpose()) - y.dot(points_.row(ky).transpose());
  return loss < 0.0 ? 0.0 : loss;
}

Vector FeasibleRegion::reduced_costs(const CostVector& y) const {
  check_dim(y);
  return (points_ * y).array() - value(y);
}

}  // namespace dfot
