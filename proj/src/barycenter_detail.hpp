#pragma once

#include <vector>

#include "fiberot/barycenter.hpp"

namespace fiberot::detail {

/// Per-fiber LPs with coefficients λ_k ζ_k(ω); dual_bound is the exact dual
/// value for this ζ and fiber_potentials hold the matching η.
BarycenterResult weighted_fiber_lp(const BarycenterProblem& problem,
                                   const std::vector<std::vector<double>>& zeta);

BarycenterResult subgradient_barycenter(const BarycenterProblem& problem,
                                        const SubgradientOptions& options);

}  // namespace fiberot::detail
