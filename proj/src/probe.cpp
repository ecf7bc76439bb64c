#include <algorithm>
#include <cmath>

#include "barycenter_detail.hpp"
#include "fiberot/error.hpp"
#include "fiberot/random.hpp"

namespace fiberot {

namespace {

bool lp_exact(const BarycenterProblem& problem) {
  return problem.bundle.base_count() == 1 || problem.config.q == problem.config.p;
}

// Tie-break over the optimal face: pull mass toward (sign > 0) or away from
// (sign < 0) a peripheral support point, with uniform noise of size radius.
FiberedMeasure tie_broken_solve(const BarycenterProblem& problem, Rng& rng, double sign,
                                double radius, bool drop_point,
                                const FiberedMeasure& reference) {
  const std::size_t bases = problem.bundle.base_count();
  std::vector<std::optional<DiscreteMeasure>> fibers(bases);
  for (std::size_t b = 0; b < bases; ++b) {
    if (!problem.active(b)) continue;
    const auto& cost = problem.bundle.cost(b);
    std::vector<int> support = problem.support[b];

    if (drop_point && support.size() > 1) {
      std::vector<int> idle;
      for (int s : support) {
        if (reference.fiber(b)->weight_of(s) == 0.0) idle.push_back(s);
      }
      if (!idle.empty()) {
        const int gone = idle[rng.index(idle.size())];
        support.erase(std::find(support.begin(), support.end(), gone));
      }
    }

    const int seed_point = support[rng.index(support.size())];
    int anchor = seed_point;
    for (int s : support) {
      if (cost(seed_point, s) > cost(seed_point, anchor)) anchor = s;
    }
    double diameter = 0.0;
    for (int s : support) diameter = std::max(diameter, cost(anchor, s));
    std::vector<double> tie(support.size());
    for (std::size_t i = 0; i < support.size(); ++i) {
      tie[i] = sign * cost(anchor, support[i]) +
               radius * std::max(diameter, 1.0) * rng.uniform(-1.0, 1.0);
    }

    std::vector<const DiscreteMeasure*> inputs;
    for (const auto& m : problem.inputs) inputs.push_back(m.fiber(b));
    const std::vector<double> coeffs(problem.lambdas.begin(), problem.lambdas.end());
    const FiberLP lp = solve_fiber_barycenter(cost, inputs, coeffs, problem.config.p,
                                              support, &tie);
    fibers[b] = measure_from_weights(support, lp.weights, 1e-13);
  }
  return FiberedMeasure(problem.bundle.base_ids(),
                        {problem.sigma().begin(), problem.sigma().end()},
                        std::move(fibers));
}

}  // namespace

UniquenessReport perturbation_uniqueness_probe(const BarycenterProblem& problem,
                                               const BarycenterResult& result,
                                               int trials, double radius,
                                               std::uint64_t seed, double tolerance) {
  problem.validate();
  UniquenessReport report;
  report.trials = trials;
  Rng rng(seed);
  const bool exact = lp_exact(problem) && problem.kappa == problem.config.p;

  for (int trial = 0; trial < trials; ++trial) {
    FiberedMeasure n;
    if (exact) {
      const double sign = (trial % 2 == 0) ? 1.0 : -1.0;
      const bool drop = (trial % 4) >= 2;
      n = tie_broken_solve(problem, rng, sign, radius, drop, result.minimizer);
    } else {
      SubgradientOptions options;
      options.random_start = seed * 1000003ULL + static_cast<std::uint64_t>(trial) + 1;
      n = disint_barycenter(problem, options).minimizer;
    }
    report.values.push_back(objective(problem, n));
    report.minimizers.push_back(std::move(n));
  }

  const auto value_at = [&](int i) { return i < 0 ? result.value : report.values[i]; };
  const auto measure_at = [&](int i) -> const FiberedMeasure& {
    return i < 0 ? result.minimizer : report.minimizers[i];
  };
  const double scale = 1.0 + std::abs(result.value);
  for (int i = 0; i < trials; ++i) {
    if (std::abs(report.values[i] - result.value) <= tolerance * scale) ++report.equal_value;
  }
  for (int i = -1; i < trials; ++i) {
    for (int j = i + 1; j < trials; ++j) {
      if (std::abs(value_at(i) - value_at(j)) > tolerance * scale) continue;
      const double d = disintegrated_distance(problem.bundle, measure_at(i), measure_at(j),
                                              problem.config);
      if (d > report.max_distance) {
        report.max_distance = d;
        report.witness = {i, j};
      }
    }
  }
  report.consistent_with_uniqueness = report.max_distance <= tolerance;
  return report;
}

}  // namespace fiberot
