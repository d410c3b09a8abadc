#pragma once

#include <optional>
#include <string>

#include "dfot/measures.hpp"
#include "dfot/polytope.hpp"
#include "dfot/transport.hpp"

namespace dfot {

// How a DF value was obtained.
enum class DFMethod { kDirectLP, kReduction, kEntropic, kProduct };

std::string to_string(DFMethod method);

// Which extremal coupling a distance uses.
enum class DFMode { kOptimistic, kRobust };

// Solver route for the optimistic distance. kAuto picks the quadratic
// reduction when mu has more atoms than S has extreme points.
enum class OptimisticMethod { kAuto, kDirect, kReduction };

struct DualPotentials {
  Vector f;  // over extreme points (reduction) or mu-atoms (direct)
  Vector g;  // over nu-atoms
};

struct EntropicStatus {
  double epsilon = 0.0;
  double value_plain = 0.0;    // Sum l_SPO dgamma
  double kl_to_product = 0.0;
  bool converged = false;
  double marginal_error = 0.0;
  std::size_t iterations = 0;
};

struct DFResult {
  double value = 0.0;
  Coupling coupling;                        // over mu x nu
  std::optional<Coupling> reduced_coupling; // over alpha x nu
  std::optional<DualPotentials> dual;
  std::optional<EntropicStatus> entropic;
  DFMethod method = DFMethod::kDirectLP;
};

// C_ij = l_SPO(x_i, y_j).
Matrix spo_cost_matrix(const FeasibleRegion& region, const DiscreteMeasure& mu,
                       const DiscreteMeasure& nu);

// Coupling-independent pieces of the quadratic reduction for a fixed nu:
// ||nu||^2 and the integral of z(y) = y'w*(y).
struct TargetStats {
  double second_moment = 0.0;
  double value_integral = 0.0;
};
TargetStats target_stats(const FeasibleRegion& region, const DiscreteMeasure& nu);

// Sum_ij l_SPO(x_i, y_j) gamma_ij. Throws InvalidInput if gamma's marginals
// differ from mu/nu weights by more than 1e-9.
double df_divergence(const FeasibleRegion& region, const DiscreteMeasure& mu,
                     const DiscreteMeasure& nu, const Coupling& gamma);

DFResult optimistic(const FeasibleRegion& region, const DiscreteMeasure& mu,
                    const DiscreteMeasure& nu, OptimisticMethod method = OptimisticMethod::kAuto);

// Reduction route with a precomputed TargetStats for nu.
DFResult optimistic_reduction(const FeasibleRegion& region, const DiscreteMeasure& mu,
                              const DiscreteMeasure& nu, const TargetStats& stats);

DFResult robust(const FeasibleRegion& region, const DiscreteMeasure& mu, const DiscreteMeasure& nu);

// Expected SPO loss under the product coupling.
double regret(const FeasibleRegion& region, const DiscreteMeasure& mu, const DiscreteMeasure& nu);

enum class SymmetricKind { kAdditive, kJensenShannon };

double symmetric(const FeasibleRegion& region, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                 SymmetricKind kind, DFMode mode);

// Entropy-regularized DF divergence; `value` is the regularized objective.
DFResult entropic_df(const FeasibleRegion& region, const DiscreteMeasure& mu,
                     const DiscreteMeasure& nu, double epsilon, DFMode mode,
                     const EntropicOptions& options = {});

// Lifts a plan over alpha x nu (alpha = (-w*)_# mu, one row per extreme
// point) to mu x nu by splitting each region's mass proportionally to the
// mu-atoms it contains. The column marginal is the reduced plan's.
Coupling lift_coupling(const FeasibleRegion& region, const DiscreteMeasure& mu,
                       const Coupling& reduced_plan);

// Dual objective sum_k f_k mu(D_k) + sum_j b_j g_f(y_j) with
// g_f(y) = min_k (c_k(y) - f_k). Lower bound on the optimistic distance.
double dual_certificate(const FeasibleRegion& region, const DiscreteMeasure& mu,
                        const DiscreteMeasure& nu, const Vector& f);

}  // namespace dfot
