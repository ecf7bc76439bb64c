#pragma once

// Test-side builders and oracles. The oracles avoid the network simplex and
// the LP code: transport costs come from vertex enumeration or 1-D quantile
// coupling, and barycenters from exhaustive grids over fiber weights.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "fiberot/barycenter.hpp"
#include "fiberot/disint_metric.hpp"
#include "fiberot/measures.hpp"
#include "fiberot/ot.hpp"
#include "fiberot/random.hpp"

namespace testing {

using namespace fiberot;

inline GroundCost random_cost(Rng& rng, int n, int dim = 2) {
  std::vector<std::vector<double>> pts(n);
  for (auto& p : pts) {
    for (int d = 0; d < dim; ++d) p.push_back(rng.uniform());
  }
  return GroundCost::euclidean(pts);
}

/// `atoms` distinct points out of [0, n) with flat-Dirichlet weights.
inline DiscreteMeasure random_measure(Rng& rng, int n, int atoms) {
  std::vector<int> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  for (int i = 0; i < atoms; ++i) std::swap(ids[i], ids[i + rng.index(n - i)]);
  const auto w = rng.simplex(atoms);
  std::vector<Atom> raw;
  for (int i = 0; i < atoms; ++i) raw.push_back({ids[i], w[i] + 1e-3});
  return normalize_measure(raw);
}

inline std::vector<std::string> base_names(int count) {
  std::vector<std::string> ids;
  for (int i = 0; i < count; ++i) ids.push_back("w" + std::to_string(i + 1));
  return ids;
}

inline FiberedMeasure random_fibered(Rng& rng, const Bundle& bundle,
                                     const std::vector<double>& sigma, int max_atoms) {
  std::vector<std::optional<DiscreteMeasure>> fibers(bundle.base_count());
  for (std::size_t b = 0; b < fibers.size(); ++b) {
    if (sigma[b] <= 0.0) continue;
    const int n = static_cast<int>(bundle.cost(b).size());
    const int atoms = 1 + static_cast<int>(rng.index(std::min(n, max_atoms)));
    fibers[b] = random_measure(rng, n, atoms);
  }
  return FiberedMeasure(bundle.base_ids(), sigma, std::move(fibers));
}

/// Per-fiber random Euclidean costs with `points` points each.
inline Bundle random_bundle(Rng& rng, int fibers, int points) {
  std::vector<GroundCost> costs;
  for (int f = 0; f < fibers; ++f) costs.push_back(random_cost(rng, points));
  return Bundle::per_fiber(base_names(fibers), std::move(costs));
}

inline std::vector<double> random_sigma(Rng& rng, int fibers) {
  auto s = rng.simplex(fibers);
  for (double& v : s) v += 0.05;
  const double total = std::accumulate(s.begin(), s.end(), 0.0);
  for (double& v : s) v /= total;
  return s;
}

inline BarycenterProblem random_problem(Rng& rng, int K, int fibers, int points,
                                        int max_atoms, double p, double q) {
  Bundle bundle = random_bundle(rng, fibers, points);
  const auto sigma = random_sigma(rng, fibers);
  std::vector<FiberedMeasure> inputs;
  for (int k = 0; k < K; ++k) inputs.push_back(random_fibered(rng, bundle, sigma, max_atoms));
  auto lambdas = rng.simplex(K);
  for (double& l : lambdas) l += 0.05;
  const double total = std::accumulate(lambdas.begin(), lambdas.end(), 0.0);
  for (double& l : lambdas) l /= total;
  lambdas.back() = 1.0 - std::accumulate(lambdas.begin(), lambdas.end() - 1, 0.0);
  return make_problem(std::move(bundle), std::move(inputs), lambdas, DisintConfig(p, q), p);
}

/// Random candidate on the problem's support.
inline FiberedMeasure random_candidate(Rng& rng, const BarycenterProblem& problem) {
  std::vector<std::optional<DiscreteMeasure>> fibers(problem.bundle.base_count());
  for (std::size_t b = 0; b < fibers.size(); ++b) {
    if (!problem.active(b)) continue;
    const auto& s = problem.support[b];
    auto w = rng.simplex(s.size());
    if (rng.uniform() < 0.3) {
      // Sparse candidates exercise pruned supports.
      for (double& v : w) v = rng.uniform() < 0.5 ? 0.0 : v;
      w[rng.index(w.size())] += 1.0;
    }
    fibers[b] = measure_from_weights(s, w);
  }
  return FiberedMeasure(problem.bundle.base_ids(),
                        {problem.sigma().begin(), problem.sigma().end()}, std::move(fibers));
}

// ---------------------------------------------------------------------------
// Oracles

/// L^q(σ) norm written out directly (q = inf: max over σ > 0).
inline double direct_lq(const std::vector<double>& v, std::span<const double> sigma, double q) {
  if (std::isinf(q)) {
    double m = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (sigma[i] > 0.0) m = std::max(m, v[i]);
    return m;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (sigma[i] > 0.0) s += sigma[i] * std::pow(v[i], q);
  return std::pow(s, 1.0 / q);
}

/// MK_p^p on the line through the monotone (quantile) coupling.
inline double quantile_ot_1d(std::vector<std::pair<double, double>> a,
                             std::vector<std::pair<double, double>> b, double p) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double ra = a[0].second, rb = b[0].second, total = 0.0;
  while (i < a.size() && j < b.size()) {
    const double m = std::min(ra, rb);
    total += m * std::pow(std::abs(a[i].first - b[j].first), p);
    ra -= m;
    rb -= m;
    if (ra <= 1e-15 && ++i < a.size()) ra = a[i].second;
    if (rb <= 1e-15 && ++j < b.size()) rb = b[j].second;
  }
  return total;
}

/// Points of the simplex of dimension `n` with coordinates in steps of 1/den.
inline std::vector<std::vector<double>> simplex_grid(int n, int den) {
  std::vector<std::vector<double>> out;
  std::vector<int> c(n, 0);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == n - 1) {
      c[i] = left;
      std::vector<double> w(n);
      for (int k = 0; k < n; ++k) w[k] = static_cast<double>(c[k]) / den;
      out.push_back(std::move(w));
      return;
    }
    for (int v = 0; v <= left; ++v) {
      c[i] = v;
      rec(i + 1, left - v);
    }
  };
  rec(0, den);
  return out;
}

/// min over fiber-weight grids (step 1/den on each support simplex) of
/// Σ_k λ_k (‖MK_p(m_k^•, n^•)‖_{L^q(σ)})^κ with MK_p from vertex enumeration.
inline double grid_search_value(const BarycenterProblem& problem, int den) {
  const std::size_t K = problem.K(), bases = problem.bundle.base_count();
  const double p = problem.config.p;
  std::vector<std::size_t> active;
  for (std::size_t b = 0; b < bases; ++b)
    if (problem.active(b)) active.push_back(b);

  // dist[a][g][k]: MK_p at active fiber a, grid point g, input k.
  std::vector<std::vector<std::vector<double>>> dist(active.size());
  for (std::size_t a = 0; a < active.size(); ++a) {
    const std::size_t b = active[a];
    const auto& s = problem.support[b];
    for (const auto& w : simplex_grid(static_cast<int>(s.size()), den)) {
      const DiscreteMeasure n = measure_from_weights(s, w);
      std::vector<double> per_k(K);
      for (std::size_t k = 0; k < K; ++k) {
        per_k[k] = std::pow(
            brute_force_ot(*problem.inputs[k].fiber(b), n, problem.bundle.cost(b), p), 1.0 / p);
      }
      dist[a].push_back(std::move(per_k));
    }
  }
  std::vector<double> sig;
  for (std::size_t b : active) sig.push_back(problem.sigma()[b]);

  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> idx(active.size(), 0);
  while (true) {
    double v = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      std::vector<double> prof(active.size());
      for (std::size_t a = 0; a < active.size(); ++a) prof[a] = dist[a][idx[a]][k];
      v += problem.lambdas[k] * std::pow(direct_lq(prof, sig, problem.config.q), problem.kappa);
    }
    best = std::min(best, v);
    std::size_t a = 0;
    while (a < active.size() && ++idx[a] == dist[a].size()) idx[a++] = 0;
    if (a == active.size()) break;
  }
  return best;
}

}  // namespace testing
