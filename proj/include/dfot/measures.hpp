#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "dfot/polytope.hpp"

namespace dfot {

// Weighted point cloud sum_i a_i delta_{x_i}. Points are rows of `points`.
class DiscreteMeasure {
 public:
  // Throws InvalidInput unless there is at least one atom, the weights are
  // nonnegative, and they sum to one within 1e-9.
  DiscreteMeasure(Matrix points, Vector weights);

  std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(points_.cols()); }
  const Matrix& points() const { return points_; }
  const Vector& weights() const { return weights_; }
  Vector point(std::size_t i) const { return points_.row(static_cast<Eigen::Index>(i)).transpose(); }
  double weight(std::size_t i) const { return weights_[static_cast<Eigen::Index>(i)]; }

 private:
  Matrix points_;
  Vector weights_;
};

// Empirical measure with weight 1/n per row; duplicates stay separate atoms.
DiscreteMeasure from_samples(const Matrix& rows);
DiscreteMeasure from_samples(const std::vector<std::vector<double>>& rows);

// Oracle push-forward w*_# mu (or (-w*)_# mu when negated). One atom per
// extreme point, zero-mass atoms included.
struct PushforwardMeasure {
  Matrix atoms;                            // |S| x d, row k is w_k or -w_k
  Vector masses;                           // mu(D_k)
  std::vector<std::size_t> region_map;     // source atom i -> region k

  DiscreteMeasure as_measure() const { return DiscreteMeasure(atoms, masses); }
};

PushforwardMeasure pushforward(const FeasibleRegion& region, const DiscreteMeasure& m,
                               bool negate = false);

inline constexpr double kInfiniteDivergence = std::numeric_limits<double>::infinity();

// Baselines on weight vectors over a common index set.
double tv_distance(const Vector& p, const Vector& q);
// Natural log; returns kInfiniteDivergence when p_i > 0 = q_i.
double kl_divergence(const Vector& p, const Vector& q);

// sum_j b_j ||y_j||^2
double second_moment(const DiscreteMeasure& m);
// max pairwise distance between atoms
double support_diameter(const DiscreteMeasure& m);

// Half-weight mixture (mu + nu) / 2 with concatenated supports.
DiscreteMeasure midpoint_mixture(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

// Merges atoms closer than `tol` by summing weights. The surviving atom is
// the first one in input order; output order follows first appearance.
DiscreteMeasure merge_coincident(const Matrix& points, const Vector& weights, double tol = 1e-12);

struct MergedAtoms {
  DiscreteMeasure measure;
  std::vector<std::size_t> atom_of;  // input atom -> merged atom
};
MergedAtoms merge_coincident_indexed(const Matrix& points, const Vector& weights,
                                     double tol = 1e-12);

void check_same_dim(const FeasibleRegion& region, const DiscreteMeasure& m);

}  // namespace dfot
