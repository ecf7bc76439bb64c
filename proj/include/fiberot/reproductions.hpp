#pragma once

#include "fiberot/barycenter.hpp"
#include "fiberot/duality.hpp"

namespace fiberot {

/// Two intervals [-2,-1] and [1,2] on the line, each discretized as n atoms at
/// subinterval midpoints. Inputs alternate between the right interval (odd
/// k, 1-based) and the left one; equal weights; p = 1; support = both grids.
struct TwoIntervalExample {
  BarycenterProblem problem;
  DiscreteMeasure left;   ///< uniform on the [-2,-1] grid
  DiscreteMeasure right;  ///< uniform on the [1,2] grid
  std::vector<double> coordinates;
};

TwoIntervalExample make_two_interval_example(int n, int inputs = 2);

/// Piecewise 1-Lipschitz tent: -4-t on [-4,-2), t on [-2,2), 4-t on [2,4],
/// zero elsewhere.
double tent_potential(double t);

/// ζ ≡ 1 and ξ_k = ±tent/K on the support (+ for odd k, 1-based).
DualCertificate tent_certificate(const TwoIntervalExample& example);

/// Two base points with equal mass over a 5-point grid on [0,1]; inputs are
/// δ_0 on both fibers and δ_0 / δ_1; p = 2, q = ∞, κ = 2, λ = (1/2, 1/2).
/// The constructed candidates put δ_{1/2} on both fibers (a) or δ_0 on the
/// first and δ_{1/2} on the second (b).
struct SplitBaseExample {
  BarycenterProblem problem;
  FiberedMeasure candidate_a;
  FiberedMeasure candidate_b;
};

SplitBaseExample make_split_base_example();

}  // namespace fiberot
