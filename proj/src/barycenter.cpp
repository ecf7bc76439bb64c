#include "fiberot/barycenter.hpp"

#include "barycenter_detail.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fiberot/error.hpp"
#include "fiberot/lp.hpp"
#include "fiberot/ot.hpp"
#include "fiberot/parallel.hpp"

namespace fiberot {

void BarycenterProblem::validate() const {
  if (inputs.size() < 2) {
    throw Error(ErrorCode::InvalidProblem, "need at least two input measures");
  }
  if (lambdas.size() != inputs.size()) {
    throw Error(ErrorCode::InvalidProblem, "one lambda per input measure required");
  }
  double total = 0.0;
  for (double l : lambdas) {
    if (!(l > 0.0)) throw Error(ErrorCode::InvalidProblem, "lambdas must be positive");
    total += l;
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw Error(ErrorCode::InvalidProblem, "lambdas must sum to one");
  }
  if (!(kappa > 0.0)) throw Error(ErrorCode::InvalidProblem, "kappa must be positive");
  for (const auto& m : inputs) {
    require_same_base(inputs.front(), m);
    require_on_bundle(bundle, m);
  }
  if (support.size() != bundle.base_count()) {
    throw Error(ErrorCode::ShapeMismatch, "one support list per base point required");
  }
  for (std::size_t b = 0; b < support.size(); ++b) {
    if (!active(b)) continue;
    const auto& s = support[b];
    if (s.empty()) {
      throw Error(ErrorCode::EmptySupport,
                  "empty candidate support at '" + bundle.base_ids()[b] + "'");
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] < 0 || s[i] >= static_cast<int>(bundle.cost(b).size())) {
        throw Error(ErrorCode::SupportOutOfRange,
                    "support point " + std::to_string(s[i]) + " outside fiber '" +
                        bundle.base_ids()[b] + "'");
      }
      if (i > 0 && s[i] <= s[i - 1]) {
        throw Error(ErrorCode::InvalidProblem, "support lists must be sorted and distinct");
      }
    }
  }
}

std::size_t BarycenterProblem::reference_slot(std::size_t base) const {
  const auto& s = support[base];
  if (!reference) return 0;
  const int y0 = reference->at(bundle, base);
  auto it = std::lower_bound(s.begin(), s.end(), y0);
  if (it == s.end() || *it != y0) {
    throw Error(ErrorCode::IndexOutOfRange,
                "reference point is not in the support at '" + bundle.base_ids()[base] + "'");
  }
  return static_cast<std::size_t>(it - s.begin());
}

BarycenterProblem make_problem(Bundle bundle, std::vector<FiberedMeasure> inputs,
                               std::vector<double> lambdas, DisintConfig config,
                               double kappa, std::vector<std::vector<int>> support) {
  BarycenterProblem problem{std::move(bundle), std::move(inputs), std::move(lambdas),
                            config, kappa, std::move(support), std::nullopt};
  if (problem.inputs.empty()) {
    throw Error(ErrorCode::InvalidProblem, "no input measures");
  }
  if (problem.support.empty()) {
    problem.support.resize(problem.bundle.base_count());
    for (std::size_t b = 0; b < problem.bundle.base_count(); ++b) {
      if (!problem.inputs.front().active(b)) continue;
      problem.support[b].resize(problem.bundle.cost(b).size());
      std::iota(problem.support[b].begin(), problem.support[b].end(), 0);
    }
  }
  problem.validate();
  return problem;
}

BarycenterProblem make_classical_problem(GroundCost cost,
                                         std::vector<DiscreteMeasure> inputs,
                                         std::vector<double> lambdas, double p,
                                         double kappa, std::vector<int> support) {
  std::vector<FiberedMeasure> fibered;
  for (auto& mu : inputs) fibered.push_back(FiberedMeasure::single(std::move(mu)));
  std::vector<std::vector<int>> supports;
  if (!support.empty()) supports.push_back(std::move(support));
  return make_problem(Bundle::single(std::move(cost)), std::move(fibered),
                      std::move(lambdas), DisintConfig(p, p), kappa,
                      std::move(supports));
}

// ---------------------------------------------------------------------------

namespace {

void require_on_support(const BarycenterProblem& problem, const FiberedMeasure& n) {
  require_same_base(problem.inputs.front(), n);
  for (std::size_t b = 0; b < n.base_count(); ++b) {
    const auto* f = n.fiber(b);
    if (!f) continue;
    const auto& s = problem.support[b];
    for (int pt : f->points()) {
      if (!std::binary_search(s.begin(), s.end(), pt)) {
        throw Error(ErrorCode::SupportViolation,
                    "candidate puts mass on point " + std::to_string(pt) +
                        " outside the support at '" + n.base_ids()[b] + "'");
      }
    }
  }
}

}  // namespace

std::vector<double> input_distances(const BarycenterProblem& problem,
                                    const FiberedMeasure& candidate) {
  require_on_support(problem, candidate);
  std::vector<double> d(problem.K());
  for (std::size_t k = 0; k < problem.K(); ++k) {
    d[k] = disintegrated_distance(problem.bundle, problem.inputs[k], candidate,
                                  problem.config);
  }
  return d;
}

double objective(const BarycenterProblem& problem, const FiberedMeasure& candidate) {
  const auto d = input_distances(problem, candidate);
  double total = 0.0;
  for (std::size_t k = 0; k < problem.K(); ++k) {
    total += problem.lambdas[k] * std::pow(d[k], problem.kappa);
  }
  return total;
}

std::size_t best_candidate(const BarycenterProblem& problem,
                           const std::vector<FiberedMeasure>& candidates) {
  if (candidates.empty()) throw Error(ErrorCode::InvalidProblem, "no candidates");
  std::size_t best = 0;
  double best_value = objective(problem, candidates[0]);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double v = objective(problem, candidates[i]);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  return best;
}

std::vector<std::vector<double>> fiber_distances(const BarycenterProblem& problem,
                                                 const FiberedMeasure& candidate) {
  require_on_support(problem, candidate);
  const std::size_t bases = problem.bundle.base_count();
  std::vector<std::vector<double>> d(problem.K(), std::vector<double>(bases, 0.0));
  parallel_for(problem.K() * bases, [&](std::size_t idx) {
    const std::size_t k = idx / bases, b = idx % bases;
    if (!problem.active(b)) return;
    d[k][b] = mk_distance(*problem.inputs[k].fiber(b), *candidate.fiber(b),
                          problem.bundle.cost(b), problem.config.p);
  });
  return d;
}

std::vector<std::vector<double>> aligned_zeta(
    const BarycenterProblem& problem, const std::vector<std::vector<double>>& distances) {
  constexpr double kFloor = 1e-12;
  const auto sigma = problem.sigma();
  const std::size_t bases = sigma.size();
  const auto& cfg = problem.config;
  std::vector<std::vector<double>> zeta(problem.K(), std::vector<double>(bases, 1.0));
  if (cfg.q == cfg.p) return zeta;

  const double rc = cfg.r_conjugate();
  for (std::size_t k = 0; k < problem.K(); ++k) {
    auto& z = zeta[k];
    if (cfg.q_infinite()) {
      // r' = 1: mass on the fibers attaining the maximum.
      double top = 0.0;
      for (std::size_t b = 0; b < bases; ++b)
        if (sigma[b] > 0.0) top = std::max(top, distances[k][b]);
      for (std::size_t b = 0; b < bases; ++b) {
        const bool at_max = sigma[b] > 0.0 && distances[k][b] >= top - 1e-9 * (1.0 + top);
        z[b] = at_max ? 1.0 : kFloor;
      }
    } else {
      for (std::size_t b = 0; b < bases; ++b) {
        z[b] = std::max(kFloor, std::pow(distances[k][b], cfg.q - cfg.p));
      }
    }
    double norm = 0.0;
    for (std::size_t b = 0; b < bases; ++b) {
      if (sigma[b] > 0.0) norm += sigma[b] * std::pow(z[b], rc);
    }
    norm = std::pow(norm, 1.0 / rc);
    for (double& v : z) v /= norm;
  }
  return zeta;
}

// ---------------------------------------------------------------------------
// Fixed-support LP

FiberLP solve_fiber_barycenter(const GroundCost& cost,
                               const std::vector<const DiscreteMeasure*>& inputs,
                               std::span<const double> coeffs, double p,
                               std::span<const int> support,
                               const std::vector<double>* tie_break) {
  const std::size_t K = inputs.size();
  const int S = static_cast<int>(support.size());
  if (S == 0) throw Error(ErrorCode::EmptySupport, "empty candidate support");

  lp::Problem prob;
  std::vector<int> row_offset(K);
  int rows = 0;
  for (std::size_t k = 0; k < K; ++k) {
    row_offset[k] = rows;
    rows += static_cast<int>(inputs[k]->size());
  }
  const int marginal_rows = rows;
  rows += static_cast<int>(K) * S;
  prob.rows = rows;
  prob.b.assign(rows, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t x = 0; x < inputs[k]->size(); ++x) {
      prob.b[row_offset[k] + x] = inputs[k]->weights()[x];
    }
  }
  const auto column_row = [&](std::size_t k, int s) {
    return marginal_rows + static_cast<int>(k) * S + s;
  };

  std::vector<double> gamma_cost;
  for (std::size_t k = 0; k < K; ++k) {
    const auto* mu = inputs[k];
    for (std::size_t x = 0; x < mu->size(); ++x) {
      for (int s = 0; s < S; ++s) {
        const double c = coeffs[k] * cost.powered(mu->points()[x], support[s], p);
        gamma_cost.push_back(c);
        prob.add_column(c, {{row_offset[k] + static_cast<int>(x), 1.0},
                            {column_row(k, s), 1.0}});
      }
    }
  }
  const int first_w = prob.cols();
  for (int s = 0; s < S; ++s) {
    std::vector<std::pair<int, double>> entries;
    for (std::size_t k = 0; k < K; ++k) entries.push_back({column_row(k, s), -1.0});
    prob.add_column(0.0, entries);
  }

  auto sol = lp::solve(prob);
  if (sol.status == lp::Status::Infeasible) {
    throw Error(ErrorCode::LPInfeasible, "barycenter LP reported infeasible");
  }
  if (sol.status != lp::Status::Optimal) {
    throw Error(ErrorCode::NumericalFailure,
                "barycenter LP ended with status " + lp::to_string(sol.status));
  }

  FiberLP out;
  out.value = sol.objective;
  out.iterations = sol.iterations;
  out.eta.assign(K, std::vector<double>(S, 0.0));
  for (int s = 0; s < S; ++s) {
    double sum = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      out.eta[k][s] = -sol.y[column_row(k, s)];
      sum += out.eta[k][s];
    }
    // Dual feasibility of w gives sum <= 0; raising the last potential keeps
    // every constraint and closes the sum exactly.
    out.eta[K - 1][s] -= sum;
  }
  out.weights.assign(sol.x.begin() + first_w, sol.x.end());

  if (tie_break) {
    // Second stage: minimize tie_break·w on the optimal face.
    lp::Problem face = prob;
    const int bound_row = face.rows++;
    face.b.push_back(sol.objective + 1e-10 * (1.0 + std::abs(sol.objective)));
    lp::Problem rebuilt;
    rebuilt.rows = face.rows;
    rebuilt.b = face.b;
    const int gamma_cols = first_w;
    for (int j = 0; j < prob.cols(); ++j) {
      std::vector<std::pair<int, double>> entries;
      for (int e = prob.col_start[j]; e < prob.col_start[j + 1]; ++e) {
        entries.push_back({prob.row_index[e], prob.value[e]});
      }
      double c = 0.0;
      if (j < gamma_cols) {
        entries.push_back({bound_row, gamma_cost[j]});
      } else {
        c = (*tie_break)[j - first_w];
      }
      rebuilt.add_column(c, entries);
    }
    rebuilt.add_column(0.0, {{bound_row, 1.0}});  // slack
    auto second = lp::solve(rebuilt);
    if (second.status == lp::Status::Optimal) {
      out.weights.assign(second.x.begin() + first_w, second.x.begin() + first_w + S);
      out.iterations += second.iterations;
    }
  }
  for (double& w : out.weights) w = std::max(w, 0.0);
  return out;
}

namespace {

constexpr double kWeightFloor = 1e-13;

std::vector<const DiscreteMeasure*> fibers_at(const BarycenterProblem& problem,
                                              std::size_t base) {
  std::vector<const DiscreteMeasure*> out;
  for (const auto& m : problem.inputs) out.push_back(m.fiber(base));
  return out;
}

void require_kappa_is_p(const BarycenterProblem& problem) {
  if (problem.kappa != problem.config.p) {
    throw Error(ErrorCode::InvalidProblem,
                "LP barycenters need kappa == p; use objective/best_candidate otherwise");
  }
}

// Solves every σ-positive fiber LP with coefficients λ_k ζ_k(ω).
BarycenterResult decoupled_lp(const BarycenterProblem& problem,
                              const std::vector<std::vector<double>>& zeta,
                              std::string method) {
  const std::size_t bases = problem.bundle.base_count();
  std::vector<FiberLP> lps(bases);
  parallel_for(bases, [&](std::size_t b) {
    if (!problem.active(b)) return;
    std::vector<double> coeffs(problem.K());
    for (std::size_t k = 0; k < problem.K(); ++k) {
      coeffs[k] = problem.lambdas[k] * zeta[k][b];
    }
    lps[b] = solve_fiber_barycenter(problem.bundle.cost(b), fibers_at(problem, b), coeffs,
                                    problem.config.p, problem.support[b]);
  });

  BarycenterResult result;
  result.method = std::move(method);
  result.zeta = zeta;
  result.fiber_potentials.resize(bases);
  std::vector<std::optional<DiscreteMeasure>> fibers(bases);
  double lp_total = 0.0;
  for (std::size_t b = 0; b < bases; ++b) {
    if (!problem.active(b)) continue;
    fibers[b] = measure_from_weights(problem.support[b], lps[b].weights, kWeightFloor);
    result.fiber_potentials[b] = std::move(lps[b].eta);
    result.iterations += lps[b].iterations;
    lp_total += problem.sigma()[b] * lps[b].value;
  }
  result.minimizer = FiberedMeasure(problem.bundle.base_ids(),
                                    {problem.sigma().begin(), problem.sigma().end()},
                                    std::move(fibers));
  result.per_k_distances = input_distances(problem, result.minimizer);
  result.value = 0.0;
  for (std::size_t k = 0; k < problem.K(); ++k) {
    result.value += problem.lambdas[k] * std::pow(result.per_k_distances[k], problem.kappa);
  }
  result.dual_bound = lp_total;
  result.solver_log.push_back({result.iterations, result.value, lp_total, 0.0});
  result.certified = result.value - lp_total <= 1e-7 * (1.0 + std::abs(result.value));
  return result;
}

}  // namespace

BarycenterResult classical_barycenter(const BarycenterProblem& problem) {
  problem.validate();
  require_kappa_is_p(problem);
  if (problem.bundle.base_count() != 1) {
    throw Error(ErrorCode::InvalidProblem, "classical barycenter needs a one-point base");
  }
  const std::vector<std::vector<double>> ones(problem.K(), std::vector<double>(1, 1.0));
  return decoupled_lp(problem, ones, "lp");
}

BarycenterResult disint_barycenter(const BarycenterProblem& problem,
                                   const SubgradientOptions& options) {
  problem.validate();
  require_kappa_is_p(problem);
  if (problem.bundle.base_count() == 1) return classical_barycenter(problem);
  if (problem.config.q == problem.config.p) {
    const std::vector<std::vector<double>> ones(
        problem.K(), std::vector<double>(problem.bundle.base_count(), 1.0));
    return decoupled_lp(problem, ones, "lp-per-fiber");
  }
  return detail::subgradient_barycenter(problem, options);
}

BarycenterResult detail::weighted_fiber_lp(const BarycenterProblem& problem,
                                   const std::vector<std::vector<double>>& zeta) {
  return decoupled_lp(problem, zeta, "weighted-lp");
}

std::vector<double> project_to_simplex(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0, tau = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cumulative += sorted[i];
    const double t = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (sorted[i] - t > 0.0) tau = t;
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::max(v[i] - tau, 0.0);
  return out;
}

}  // namespace fiberot
