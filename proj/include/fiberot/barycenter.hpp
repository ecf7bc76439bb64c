#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fiberot/disint_metric.hpp"
#include "fiberot/measures.hpp"

namespace fiberot {

/// Minimize  n ↦ Σ_k λ_k D(m_k, n)^κ  over measures n whose fiber at each
/// base point lives on a fixed candidate support. D is the disintegrated
/// (p, q) distance; over a one-point base it is the classical MK_p.
struct BarycenterProblem {
  Bundle bundle;
  std::vector<FiberedMeasure> inputs;
  std::vector<double> lambdas;
  DisintConfig config;
  double kappa = 1.0;
  /// Candidate support per base point (sorted point ids); empty at σ-null
  /// base points.
  std::vector<std::vector<int>> support;
  /// Point pinned to zero when certificates are re-centered; defaults to the
  /// first support point of each fiber.
  std::optional<ReferencePoint> reference;

  std::size_t K() const { return inputs.size(); }
  std::span<const double> sigma() const { return inputs.front().sigma(); }
  bool active(std::size_t base) const { return inputs.front().active(base); }
  /// Throws InvalidProblem, BaseMismatch, EmptySupport or SupportOutOfRange.
  void validate() const;
  /// Index into support[base] of the re-centering point.
  std::size_t reference_slot(std::size_t base) const;
};

/// Builds a problem; an empty `support` means every fiber point.
BarycenterProblem make_problem(Bundle bundle, std::vector<FiberedMeasure> inputs,
                               std::vector<double> lambdas, DisintConfig config,
                               double kappa,
                               std::vector<std::vector<int>> support = {});

/// One-point base specialization (classical MK_p barycenter).
BarycenterProblem make_classical_problem(GroundCost cost,
                                         std::vector<DiscreteMeasure> inputs,
                                         std::vector<double> lambdas, double p,
                                         double kappa, std::vector<int> support = {});

struct SolverLogEntry {
  int iteration = 0;
  double primal = 0.0;  ///< best objective so far
  double dual = 0.0;    ///< best certified lower bound so far
  double step = 0.0;
};

struct BarycenterResult {
  FiberedMeasure minimizer;
  double value = 0.0;  ///< objective(minimizer), recomputed from scratch
  std::vector<double> per_k_distances;
  std::vector<SolverLogEntry> solver_log;
  std::string method;
  int iterations = 0;
  bool certified = false;
  double dual_bound = 0.0;
  /// Row duals of the fiber LPs, [base][k][support slot] with Σ_k = 0; empty
  /// at σ-null base points or when no LP was solved.
  std::vector<std::vector<std::vector<double>>> fiber_potentials;
  /// Fiber weights ζ_k(ω) behind fiber_potentials, [k][base].
  std::vector<std::vector<double>> zeta;
};

/// Σ_k λ_k D(m_k, candidate)^κ for any κ > 0. Throws SupportViolation when the
/// candidate leaves the problem's support.
double objective(const BarycenterProblem& problem, const FiberedMeasure& candidate);

/// D(m_k, candidate) for every k.
std::vector<double> input_distances(const BarycenterProblem& problem,
                                    const FiberedMeasure& candidate);

/// Best of an explicit candidate list (the only route when κ != p).
std::size_t best_candidate(const BarycenterProblem& problem,
                           const std::vector<FiberedMeasure>& candidates);

/// Fixed-support barycenter LP on one fiber:
///   min Σ_k coeff_k Σ d(x,s)^p γ_k(x,s)
///   s.t. γ_k has row marginal m_k and column marginal w for every k, w >= 0.
struct FiberLP {
  std::vector<double> weights;           ///< w over the support
  double value = 0.0;                    ///< LP optimum
  std::vector<std::vector<double>> eta;  ///< [k][slot], Σ_k eta_k = 0
  int iterations = 0;
};

/// With `tie_break`, a second LP minimizes tie_break·w over the optimal face
/// (objective within 1e-10 relative of the optimum); value and eta still
/// describe the optimum.
FiberLP solve_fiber_barycenter(const GroundCost& cost,
                               const std::vector<const DiscreteMeasure*>& inputs,
                               std::span<const double> coeffs, double p,
                               std::span<const int> support,
                               const std::vector<double>* tie_break = nullptr);

/// Exact LP barycenter for a one-point base with κ = p.
BarycenterResult classical_barycenter(const BarycenterProblem& problem);

struct SubgradientOptions {
  int max_iterations = 10000;
  double relative_gap = 1e-3;  ///< stop when gap < relative_gap·(1 + value)
  int certify_every = 25;
  /// Random feasible start instead of the q = p warm start.
  std::optional<std::uint64_t> random_start;
};

/// κ = p barycenter. q = p decouples into per-fiber LPs (exact); p < q <= ∞
/// runs a projected subgradient method certified by dual lower bounds.
/// A one-point base defers to classical_barycenter.
BarycenterResult disint_barycenter(const BarycenterProblem& problem,
                                   const SubgradientOptions& options = {});

/// Hölder-aligned fiber weights ζ_k ∝ D_k(ω)^{q-p}, floored at 1e-12 and
/// normalized in L^{r'}(σ); ζ ≡ 1 when q = p. `distances` is [k][base] MK_p.
std::vector<std::vector<double>> aligned_zeta(const BarycenterProblem& problem,
                                              const std::vector<std::vector<double>>& distances);

/// MK_p(m_k^ω, n^ω) for every k and base point (zero at σ-null points).
std::vector<std::vector<double>> fiber_distances(const BarycenterProblem& problem,
                                                 const FiberedMeasure& candidate);

struct UniquenessReport {
  int trials = 0;
  int equal_value = 0;  ///< restarts whose value matched the reference result
  double max_distance = 0.0;
  std::pair<int, int> witness{-1, -1};  ///< -1 denotes the reference result
  std::vector<double> values;
  std::vector<FiberedMeasure> minimizers;
  bool consistent_with_uniqueness = true;
};

/// Re-solves with randomized tie-breaking over the optimal face and
/// perturbed supports (LP cases) or random starts (subgradient case) and
/// reports the largest distance between minimizers of equal value.
UniquenessReport perturbation_uniqueness_probe(const BarycenterProblem& problem,
                                               const BarycenterResult& result,
                                               int trials, double radius,
                                               std::uint64_t seed = 0,
                                               double tolerance = 1e-4);

/// Euclidean projection onto the probability simplex (sort-based).
std::vector<double> project_to_simplex(std::span<const double> v);

}  // namespace fiberot
