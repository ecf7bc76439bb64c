#pragma once

#include <limits>
#include <string>
#include <vector>

#include "fiberot/measures.hpp"

namespace fiberot {

/// Exponents of the disintegrated metric: fiber-wise MK_p aggregated in
/// L^q(σ), 1 <= p <= q <= ∞.
struct DisintConfig {
  static constexpr double kInfinity = std::numeric_limits<double>::infinity();

  double p = 1.0;
  double q = 1.0;

  DisintConfig() = default;
  DisintConfig(double p_, double q_);  ///< throws InvalidConfig

  bool q_infinite() const { return q == kInfinity; }
  /// r = q / p (∞ when q is).
  double r() const { return q_infinite() ? kInfinity : q / p; }
  /// Hölder conjugate of r (∞ when r == 1, 1 when r == ∞).
  double r_conjugate() const;
};

/// Parses "inf"/"infinity" or a number.
double parse_exponent(const std::string& text);

struct FiberDistance {
  std::string base;
  double distance = 0.0;
};

/// MK_p between the fibers of m and n at every σ-positive base point.
/// Fibers are solved independently (in parallel up to DOT_NUM_THREADS).
std::vector<FiberDistance> fiber_distance_profile(const Bundle& bundle,
                                                  const FiberedMeasure& m,
                                                  const FiberedMeasure& n,
                                                  double p);

/// ‖profile‖_{L^q(σ)}; the discrete essential supremum when q = ∞.
double lq_norm(const std::vector<double>& values, const std::vector<double>& sigma,
               double q);

/// The disintegrated (p, q) distance between two measures sharing σ.
double disintegrated_distance(const Bundle& bundle, const FiberedMeasure& m,
                              const FiberedMeasure& n, const DisintConfig& config);

/// Disintegrated distance from the reference Dirac family δ_{y0} ⊗ σ to m.
/// Finite for every finitely supported m; reported for diagnostics.
double reference_distance(const Bundle& bundle, const FiberedMeasure& m,
                          const DisintConfig& config, const ReferencePoint& y0);

/// Applies the bundle's relabeling at each base point to every fiber of m.
FiberedMeasure relabel(const Bundle& bundle, const FiberedMeasure& m);

}  // namespace fiberot
