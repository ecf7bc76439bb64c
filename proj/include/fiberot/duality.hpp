#pragma once

#include <vector>

#include "fiberot/barycenter.hpp"
#include "fiberot/measures.hpp"

namespace fiberot {

/// Dual variables (ζ_k, ξ_k) of a barycenter problem. ξ_k lives on the
/// candidate support of each fiber; entries at σ-null base points are ignored.
struct DualCertificate {
  std::vector<std::vector<double>> zeta;             ///< [k][base], > 0
  std::vector<std::vector<std::vector<double>>> xi;  ///< [k][base][support slot]

  double eta(std::size_t k, std::size_t base, std::size_t slot) const {
    return zeta[k][base] * xi[k][base][slot];
  }
};

struct GapReport {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
  bool certified = false;
};

inline constexpr double kSumTolerance = 1e-9;
inline constexpr double kNormTolerance = 1e-12;

/// ζ_k ≡ 1, ξ_k ≡ 0.
DualCertificate zero_certificate(const BarycenterProblem& problem);

/// Issue kinds: "shape", "positivity", "norm", "sum".
ValidationReport validate_certificate(const DualCertificate& cert,
                                      const BarycenterProblem& problem);

/// -Σ_k Σ_ω σ(ω) ζ_k(ω) Σ_x m_k^ω(x) S_{λ_k}ξ_k(ω, x), the transform taken
/// over the candidate support. Throws ShapeMismatch.
double eval_dual(const DualCertificate& cert, const BarycenterProblem& problem);

/// Certificate matching a solved κ = p problem: fiber LP duals when the
/// result carries them, otherwise the LP duals at the ζ aligned with the
/// minimizer. Tightened and re-centered. Throws NotSolved.
DualCertificate extract_certificate(const BarycenterProblem& problem,
                                    const BarycenterResult& result);

/// Replaces ξ_k by its double transform for k < K and restores Σ ζ_k ξ_k = 0
/// through ξ_K. The dual value does not decrease.
DualCertificate tighten(const DualCertificate& cert, const BarycenterProblem& problem);

/// Shifts ξ_k (k < K) to vanish at the reference point of each fiber and
/// compensates in ξ_K. The dual value is unchanged.
DualCertificate recenter(const DualCertificate& cert, const BarycenterProblem& problem);

/// primal = objective(result.minimizer); an invalid certificate gives
/// dual = -inf and certified = false.
GapReport duality_gap(const BarycenterProblem& problem, const BarycenterResult& result,
                      const DualCertificate& cert, double tolerance = 1e-7);

}  // namespace fiberot
