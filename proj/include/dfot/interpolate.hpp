#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dfot/dfdist.hpp"

namespace dfot {

// Atoms closer than this are merged in interpolants.
inline constexpr double kMergeTolerance = 1e-12;
// Plan entries at or below this are treated as empty cells.
inline constexpr double kNegligibleMass = 1e-15;

// (pi_t)_# gamma with pi_t(x, y) = (1 - t) x + t y. Rows of gamma index mu,
// columns index nu. Throws InvalidInput if t is outside [0, 1].
DiscreteMeasure interpolant(const Coupling& gamma, const DiscreteMeasure& mu,
                            const DiscreteMeasure& nu, double t,
                            double merge_tol = kMergeTolerance);

struct InterpolantPath {
  Coupling coupling;
  std::vector<double> times;
  std::vector<DiscreteMeasure> measures;
};

// Slices are independent and are evaluated concurrently.
InterpolantPath interpolant_path(const Coupling& gamma, const DiscreteMeasure& mu,
                                 const DiscreteMeasure& nu, const std::vector<double>& times);

enum class CouplingKind { kOptimistic, kRobust, kIndependent, kW2 };

CouplingKind parse_coupling_kind(const std::string& name);

Coupling build_coupling(const FeasibleRegion& region, const DiscreteMeasure& mu,
                        const DiscreteMeasure& nu, CouplingKind kind);

// Interpolant at t = 1/2 under the requested coupling.
DiscreteMeasure df_average(const FeasibleRegion& region, const DiscreteMeasure& mu,
                           const DiscreteMeasure& nu, CouplingKind kind);

struct BoundCheck {
  double t = 0.0;
  double lhs = 0.0;  // W_DFO(mu, nu_t)
  double rhs = 0.0;  // t * W_DFO(mu, nu)
  bool pass = false;
};

// Evaluates W_DFO(mu, nu_t) <= t W_DFO(mu, nu) along the optimistic
// interpolant; pass iff lhs <= rhs + 1e-7.
std::vector<BoundCheck> one_sided_bound_check(const FeasibleRegion& region,
                                              const DiscreteMeasure& mu,
                                              const DiscreteMeasure& nu,
                                              const std::vector<double>& t_grid);

// McCann interpolation in the reduced space between alpha = (-w*)_# mu and
// nu, with couplings lifted back to mu.
class ReducedMcCann {
 public:
  struct Slice {
    double t = 0.0;
    DiscreteMeasure nu_t;
    Coupling eta_t;    // alpha x nu_t, one row per extreme point
    Coupling lifted;   // mu x nu_t
  };

  ReducedMcCann(const FeasibleRegion& region, const DiscreteMeasure& mu, const DiscreteMeasure& nu);

  const PushforwardMeasure& alpha() const { return alpha_; }
  const Coupling& eta() const { return eta_; }
  // W_2^2(alpha, nu)
  double w2_squared() const { return w2_squared_; }

  Slice slice(double t) const;

 private:
  const FeasibleRegion& region_;
  const DiscreteMeasure& mu_;
  const DiscreteMeasure& nu_;
  PushforwardMeasure alpha_;
  Coupling eta_;
  double w2_squared_ = 0.0;
};

ReducedMcCann::Slice reduced_mccann(const FeasibleRegion& region, const DiscreteMeasure& mu,
                                    const DiscreteMeasure& nu, double t);

// E ||Y_t - A||^2 under eta_t, with A the alpha atom of each row.
double displacement_energy(const ReducedMcCann& path, const ReducedMcCann::Slice& slice);

// Quantile (northwest-corner on sorted atoms) coupling of two 1D measures.
Coupling monotone_coupling_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

// Weighted mean and standard deviation of a 1D measure.
double measure_mean_1d(const DiscreteMeasure& m);
double measure_std_1d(const DiscreteMeasure& m);

struct GridSpec {
  std::size_t bins = 64;
  std::size_t dim_x = 0;
  std::size_t dim_y = 1;
};

// CSV rows "t,gx,gy,mass" for every nonzero cell of a bins x bins histogram
// over the joint bounding box of all slices; gx/gy are bin centers.
std::string histogram_grid_csv(const InterpolantPath& path, const GridSpec& spec = {});

}  // namespace dfot
