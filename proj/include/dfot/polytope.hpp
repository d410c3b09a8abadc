#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace dfot {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// A realization of the random cost vector.
using CostVector = Eigen::VectorXd;

// Absolute tolerance on the objective used to detect ties between extreme
// points; ties go to the lowest index.
inline constexpr double kOracleTieTolerance = 1e-9;

// Result of the linear-optimization oracle: the selected extreme point.
struct OracleResult {
  std::size_t index;
  Vector decision;
};

// Compact polyhedron S given by its extreme points (one per row). The
// oracle minimizes w'x over S, so it only ever needs these points.
class FeasibleRegion {
 public:
  // Throws InvalidInput if empty, ragged, non-finite or containing
  // duplicate points (pairwise distance <= 1e-12).
  explicit FeasibleRegion(Matrix extreme_points);
  static FeasibleRegion from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t dim() const { return static_cast<std::size_t>(points_.cols()); }
  std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }
  const Matrix& extreme_points() const { return points_; }
  Vector point(std::size_t k) const { return points_.row(static_cast<Eigen::Index>(k)).transpose(); }

  // Max pairwise Euclidean distance D_W.
  double diameter() const { return diameter_; }

  OracleResult oracle(const CostVector& x) const;
  std::size_t region_index(const CostVector& x) const;
  // z(x) = min_k w_k'x.
  double value(const CostVector& x) const;
  // y'w*(x) - y'w*(y), clamped at zero for tiny negatives.
  double spo_loss(const CostVector& x, const CostVector& y) const;

  // Reduced costs c_k(y) = y'w_k - z(y) for every extreme point.
  Vector reduced_costs(const CostVector& y) const;

 private:
  void check_dim(const CostVector& x) const;

  Matrix points_;
  double diameter_ = 0.0;
};

}  // namespace dfot
