#pragma once

#include <string>
#include <vector>

#include "dfot/interpolate.hpp"

namespace dfot {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Two measures have the same law if, after merging coincident atoms, every
// atom of one matches an atom of the other within `point_tol` with weights
// equal within `weight_tol`.
bool same_law(const DiscreteMeasure& a, const DiscreteMeasure& b, double point_tol = 1e-9,
              double weight_tol = 1e-12);

// Plan marginals against the measure weights (max abs deviation <= tol) and
// nonnegativity.
CheckResult check_plan_marginals(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                 const Coupling& plan, double tol = 1e-9);

// Direct LP and quadratic reduction agree within 1e-6.
CheckResult check_reduction(const FeasibleRegion& region, const DiscreteMeasure& mu,
                            const DiscreteMeasure& nu);

// The lifted reduction plan is a coupling of (mu, nu) (1e-9) whose SPO cost
// matches the direct LP within 1e-8.
CheckResult check_lift(const FeasibleRegion& region, const DiscreteMeasure& mu,
                       const DiscreteMeasure& nu);

// Dual certificate from the reduction potentials closes the gap within
// 1e-6, and shifting f by a constant changes it by at most 1e-12.
std::vector<CheckResult> check_duality(const FeasibleRegion& region, const DiscreteMeasure& mu,
                                       const DiscreteMeasure& nu);

// W_DFO(mu, (c x)_# mu) == 0 within 1e-9 for several c > 0.
CheckResult check_rescaling(const FeasibleRegion& region, const DiscreteMeasure& mu);

// Ordering optimistic <= regret <= robust and the Lipschitz-type bounds.
std::vector<CheckResult> check_bounds(const FeasibleRegion& region, const DiscreteMeasure& mu,
                                      const DiscreteMeasure& nu);

// W_DFO(mu, nu_t) <= t W_DFO(mu, nu) + 1e-7 along the optimistic interpolant.
CheckResult check_one_sided(const FeasibleRegion& region, const DiscreteMeasure& mu,
                            const DiscreteMeasure& nu, const std::vector<double>& t_grid);

// Interpolants at t = 0 and t = 1 recover mu and nu.
CheckResult check_endpoints(const FeasibleRegion& region, const DiscreteMeasure& mu,
                            const DiscreteMeasure& nu);

// Reduced-space path: constant speed and displacement (1e-6), lift
// consistency (1e-10), per-time lift optimality (1e-6).
std::vector<CheckResult> check_mccann(const FeasibleRegion& region, const DiscreteMeasure& mu,
                                      const DiscreteMeasure& nu);

// Names accepted by run_checks; "all" expands to every suite.
const std::vector<std::string>& check_names();

std::vector<CheckResult> run_checks(const FeasibleRegion& region, const DiscreteMeasure& mu,
                                    const DiscreteMeasure& nu, const std::vector<std::string>& names);

}  // namespace dfot
