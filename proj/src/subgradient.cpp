#include <algorithm>
#include <cmath>
#include <limits>

#include "barycenter_detail.hpp"
#include "fiberot/error.hpp"
#include "fiberot/ot.hpp"
#include "fiberot/parallel.hpp"
#include "fiberot/random.hpp"

namespace fiberot::detail {

namespace {

using Weights = std::vector<std::vector<double>>;  // [base][slot]

FiberedMeasure to_measure(const BarycenterProblem& problem, const Weights& w) {
  std::vector<std::optional<DiscreteMeasure>> fibers(problem.bundle.base_count());
  for (std::size_t b = 0; b < fibers.size(); ++b) {
    if (problem.active(b)) fibers[b] = measure_from_weights(problem.support[b], w[b]);
  }
  return FiberedMeasure(problem.bundle.base_ids(),
                        {problem.sigma().begin(), problem.sigma().end()},
                        std::move(fibers));
}

Weights weights_of(const BarycenterProblem& problem, const FiberedMeasure& n) {
  Weights w(problem.bundle.base_count());
  for (std::size_t b = 0; b < w.size(); ++b) {
    if (!problem.active(b)) continue;
    const auto& s = problem.support[b];
    w[b].resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) w[b][i] = n.fiber(b)->weight_of(s[i]);
  }
  return w;
}

struct Evaluation {
  double value = 0.0;
  std::vector<std::vector<double>> distances;           // [k][base] MK_p
  std::vector<std::vector<std::vector<double>>> grads;  // [k][base][slot] of MK_p^p
};

Evaluation evaluate(const BarycenterProblem& problem, const Weights& w) {
  const std::size_t K = problem.K(), bases = problem.bundle.base_count();
  const double p = problem.config.p;
  const FiberedMeasure n = to_measure(problem, w);
  Evaluation e;
  e.distances.assign(K, std::vector<double>(bases, 0.0));
  e.grads.assign(K, std::vector<std::vector<double>>(bases));
  parallel_for(K * bases, [&](std::size_t idx) {
    const std::size_t k = idx / bases, b = idx % bases;
    if (!problem.active(b)) return;
    const auto& cost = problem.bundle.cost(b);
    const OTResult ot = solve_ot(*problem.inputs[k].fiber(b), *n.fiber(b), cost, p);
    e.distances[k][b] = ot.distance();
    auto g = target_potential_on(ot, problem.support[b], cost);
    for (double& v : g) v = -v;
    e.grads[k][b] = std::move(g);
  });
  const std::vector<double> sigma(problem.sigma().begin(), problem.sigma().end());
  for (std::size_t k = 0; k < K; ++k) {
    e.value += problem.lambdas[k] * std::pow(lq_norm(e.distances[k], sigma, problem.config.q),
                                             problem.kappa);
  }
  return e;
}

}  // namespace

BarycenterResult subgradient_barycenter(const BarycenterProblem& problem,
                                        const SubgradientOptions& options) {
  const std::size_t K = problem.K(), bases = problem.bundle.base_count();
  const auto sigma = problem.sigma();

  Weights w;
  if (options.random_start) {
    Rng rng(*options.random_start);
    w.resize(bases);
    for (std::size_t b = 0; b < bases; ++b) {
      if (problem.active(b)) w[b] = rng.simplex(problem.support[b].size());
    }
  } else {
    const std::vector<std::vector<double>> ones(K, std::vector<double>(bases, 1.0));
    w = weights_of(problem, weighted_fiber_lp(problem, ones).minimizer);
  }

  BarycenterResult best_dual;
  double dual = -std::numeric_limits<double>::infinity();
  FiberedMeasure best_n = to_measure(problem, w);
  double primal = std::numeric_limits<double>::infinity();
  std::vector<SolverLogEntry> log;

  const auto certify = [&](const std::vector<std::vector<double>>& zeta, int iteration,
                           double step) {
    BarycenterResult lp = weighted_fiber_lp(problem, zeta);
    if (lp.value < primal) {
      primal = lp.value;
      best_n = lp.minimizer;
    }
    if (lp.dual_bound > dual) {
      dual = lp.dual_bound;
      best_dual = std::move(lp);
    }
    log.push_back({iteration, primal, dual, step});
  };
  const auto converged = [&] {
    return primal - dual <= options.relative_gap * (1.0 + std::abs(primal));
  };

  double scale = 0.0;
  int t = 0;
  for (t = 1; t <= options.max_iterations; ++t) {
    const Evaluation e = evaluate(problem, w);
    if (e.value < primal) {
      primal = e.value;
      best_n = to_measure(problem, w);
    }
    const auto zeta = aligned_zeta(problem, e.distances);

    Weights g(bases);
    double norm2 = 0.0;
    for (std::size_t b = 0; b < bases; ++b) {
      if (!problem.active(b)) continue;
      g[b].assign(problem.support[b].size(), 0.0);
      for (std::size_t k = 0; k < K; ++k) {
        const double c = problem.lambdas[k] * sigma[b] * zeta[k][b];
        for (std::size_t i = 0; i < g[b].size(); ++i) g[b][i] += c * e.grads[k][b][i];
      }
      // Constant shifts are invisible on the simplex.
      double mean = 0.0;
      for (double v : g[b]) mean += v;
      mean /= static_cast<double>(g[b].size());
      for (double& v : g[b]) {
        v -= mean;
        norm2 += v * v;
      }
    }
    const double norm = std::sqrt(norm2);
    if (t == 1) scale = std::clamp(e.value / std::max(norm, 1e-300), 1e-6, 1.0);
    const double step = scale / std::sqrt(static_cast<double>(t));

    if (t == 1 || t % options.certify_every == 0 || norm == 0.0) {
      certify(zeta, t, step);
      if (converged()) break;
    }
    if (norm == 0.0) break;
    for (std::size_t b = 0; b < bases; ++b) {
      if (!problem.active(b)) continue;
      for (std::size_t i = 0; i < w[b].size(); ++i) w[b][i] -= step * g[b][i] / norm;
      w[b] = project_to_simplex(w[b]);
    }
  }

  BarycenterResult result;
  result.method = "subgradient";
  result.minimizer = best_n;
  result.per_k_distances = input_distances(problem, best_n);
  for (std::size_t k = 0; k < K; ++k) {
    result.value += problem.lambdas[k] * std::pow(result.per_k_distances[k], problem.kappa);
  }
  result.iterations = std::min(t, options.max_iterations);
  result.dual_bound = dual;
  result.fiber_potentials = std::move(best_dual.fiber_potentials);
  result.zeta = std::move(best_dual.zeta);
  result.solver_log = std::move(log);
  result.certified =
      result.value - dual <= options.relative_gap * (1.0 + std::abs(result.value));
  return result;
}

}  // namespace fiberot::detail
