// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "fiberot/barycenter.hpp"
#include "fiberot/duality.hpp"
#include "fiberot/error.hpp"
#include "fiberot/reproductions.hpp"
#include "support.hpp"

using namespace fiberot;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (!pass) detail << "; ";
      detail << "FAILED " << what;
      pass = false;
    }
  }
};

int failures = 0;

void criterion(int id, const std::string& name, double time_limit,
               const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.require(false, std::string("exception: ") + e.what());
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (time_limit > 0.0 && seconds >= time_limit) {
    out.require(false, "runtime " + std::to_string(seconds) + " s");
  }
  if (!out.pass) ++failures;
  std::printf("[%s] %2d %s (%.2f s): %s\n", out.pass ? "PASS" : "FAIL", id, name.c_str(), seconds,
              out.detail.str().c_str());
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// ζ ≡ 1, random ξ_k for k < K, ξ_K = -Σ_{k<K} ξ_k.
DualCertificate unit_zeta_certificate(Rng& rng, const BarycenterProblem& problem) {
  const std::size_t K = problem.K(), B = problem.bundle.base_count();
  const double scale = rng.uniform(0.0, 2.0);
  DualCertificate cert;
  cert.zeta.assign(K, std::vector<double>(B, 1.0));
  cert.xi.assign(K, std::vector<std::vector<double>>(B));
  for (std::size_t b = 0; b < B; ++b) {
    const std::size_t n = problem.support[b].size();
    cert.xi[K - 1][b].assign(n, 0.0);
    for (std::size_t k = 0; k + 1 < K; ++k) {
      cert.xi[k][b].resize(n);
      for (std::size_t s = 0; s < n; ++s) {
        cert.xi[k][b][s] = scale * rng.uniform(-1.0, 1.0);
        cert.xi[K - 1][b][s] -= cert.xi[k][b][s];
      }
    }
  }
  return cert;
}

// Uniform grid on [0, 1] at subinterval midpoints, a Dirac at `c`, and the
// exact midpoints between them (the support of the 1-D p = 2 barycenter).
struct InterpolationFiber {
  GroundCost cost;
  std::vector<double> xs;
  DiscreteMeasure grid, dirac;
  std::vector<int> midpoints;
};

InterpolationFiber interpolation_fiber(int n, double c) {
  std::vector<double> grid_x, mid_x;
  for (int i = 0; i < n; ++i) {
    grid_x.push_back((i + 0.5) / n);
    mid_x.push_back(0.5 * (grid_x.back() + c));
  }
  std::vector<double> xs = grid_x;
  xs.push_back(c);
  xs.insert(xs.end(), mid_x.begin(), mid_x.end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  const auto index = [&](double x) {
    return static_cast<int>(std::lower_bound(xs.begin(), xs.end(), x) - xs.begin());
  };
  std::vector<Atom> atoms;
  for (double x : grid_x) atoms.push_back({index(x), 1.0});
  std::vector<int> mids;
  for (double x : mid_x) mids.push_back(index(x));
  return {GroundCost::line(xs), xs, normalize_measure(atoms), DiscreteMeasure::dirac(index(c)), mids};
}

}  // namespace

int main() {
  criterion(1, "two-interval barycenter, n = 50, p = 1", 10.0, [](Outcome& out) {
    const auto ex = make_two_interval_example(50);
    const auto r = classical_barycenter(ex.problem);
    const double left = objective(ex.problem, FiberedMeasure::single(ex.left));
    const double right = objective(ex.problem, FiberedMeasure::single(ex.right));
    const double tent = duality_gap(ex.problem, r, tent_certificate(ex)).dual;
    const double shift = mk_distance(ex.left, ex.right, ex.problem.bundle.cost(0), 1.0);
    out.require(std::abs(r.value - 1.5) <= 0.02, "LP value " + fmt(r.value));
    out.require(std::abs(left - r.value) <= 0.02, "objective(left) " + fmt(left));
    out.require(std::abs(right - r.value) <= 0.02, "objective(right) " + fmt(right));
    out.require(std::abs(tent - 1.5) <= 0.02, "tent dual " + fmt(tent));
    out.require(std::abs(shift - 3.0) <= 1e-9, "MK_1(left, right) " + fmt(shift));
    out.detail << "LP " << fmt(r.value) << ", objectives " << fmt(left) << " / " << fmt(right)
               << ", tent dual " << fmt(tent) << ", MK_1 " << fmt(shift);
  });

  criterion(2, "split-base minimizers, q = inf", 5.0, [](Outcome& out) {
    const auto ex = make_split_base_example();
    const double a = objective(ex.problem, ex.candidate_a);
    const double b = objective(ex.problem, ex.candidate_b);
    const double apart = disintegrated_distance(
        ex.problem.bundle, ex.candidate_a, ex.candidate_b,
        DisintConfig(ex.problem.config.p, DisintConfig::kInfinity));
    out.require(std::abs(a - b) <= 1e-6, "objectives differ");
    out.require(apart > 0.1, "candidates too close");
    out.detail << "objectives " << fmt(a) << " / " << fmt(b) << ", distance " << fmt(apart);
  });

  criterion(3, "strong duality at q = p (20 instances)", 0.0, [](Outcome& out) {
    Rng rng(3003);
    double worst = 0.0;
    bool unit = true;
    for (int trial = 0; trial < 20; ++trial) {
      const int fibers = 2 + static_cast<int>(rng.index(3));
      const auto problem = testing::random_problem(rng, 3, fibers, 6, 6, 2.0, 2.0);
      const auto result = disint_barycenter(problem);
      const auto cert = extract_certificate(problem, result);
      for (const auto& zk : cert.zeta) {
        for (std::size_t b = 0; b < zk.size(); ++b) {
          if (problem.active(b) && zk[b] != 1.0) unit = false;
        }
      }
      worst = std::max(worst, duality_gap(problem, result, cert).gap);
    }
    out.require(worst <= 1e-7, "gap " + fmt(worst));
    out.require(unit, "zeta not identically 1");
    out.detail << "max gap " << fmt(worst);
  });

  criterion(4, "weak duality for random certificates (100 pairs)", 0.0, [](Outcome& out) {
    Rng rng(4004);
    int violations = 0, candidates = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 100; ++trial) {
      const double p = 1.0 + static_cast<double>(trial % 3);
      const double q = std::vector<double>{p, 2 * p, DisintConfig::kInfinity}[(trial / 3) % 3];
      const int K = 2 + static_cast<int>(rng.index(2));
      const int fibers = 1 + static_cast<int>(rng.index(3));
      const auto problem = testing::random_problem(rng, K, fibers, 4, 4, p, q);
      const auto cert = unit_zeta_certificate(rng, problem);
      if (!validate_certificate(cert, problem).ok()) {
        out.require(false, "certificate invalid at trial " + std::to_string(trial));
        continue;
      }
      const double dual = std::max(eval_dual(cert, problem), eval_dual(tighten(cert, problem), problem));
      std::vector<FiberedMeasure> tested{disint_barycenter(problem).minimizer};
      for (int c = 0; c < 10; ++c) tested.push_back(testing::random_candidate(rng, problem));
      for (const auto& n : tested) {
        const double excess = dual - objective(problem, n);
        worst = std::max(worst, excess);
        if (excess > 1e-9) ++violations;
        ++candidates;
      }
    }
    out.require(violations == 0, std::to_string(violations) + " violations");
    out.detail << candidates << " candidates, max dual - primal " << fmt(worst);
  });

  criterion(5, "solve_ot against vertex enumeration (200 instances)", 0.0, [](Outcome& out) {
    Rng rng(5005);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      const double p = std::vector<double>{1.0, 1.5, 2.0, 3.0}[rng.index(4)];
      DiscreteMeasure mu, nu;
      GroundCost cost;
      if (trial % 2 == 0) {
        const int n = 2 + static_cast<int>(rng.index(5));
        cost = testing::random_cost(rng, n);
        mu = testing::random_measure(rng, n, 1 + static_cast<int>(rng.index(std::min(n, 4))));
        nu = testing::random_measure(rng, n, 1 + static_cast<int>(rng.index(std::min(n, 4))));
      } else {
        const int atoms = 1 + static_cast<int>(rng.index(8));
        const int n = atoms + static_cast<int>(rng.index(5));
        cost = testing::random_cost(rng, n);
        const auto uniform = [&] {
          std::vector<int> ids(n);
          std::iota(ids.begin(), ids.end(), 0);
          for (int i = 0; i < atoms; ++i) std::swap(ids[i], ids[i + rng.index(n - i)]);
          std::vector<Atom> a;
          for (int i = 0; i < atoms; ++i) a.push_back({ids[i], 1.0});
          return normalize_measure(a);
        };
        mu = uniform();
        nu = uniform();
      }
      const double exact = solve_ot(mu, nu, cost, p).value_p;
      worst = std::max(worst, std::abs(exact - brute_force_ot(mu, nu, cost, p)));
    }
    out.require(worst <= 1e-9, "max difference " + fmt(worst));
    out.detail << "max |solve_ot - brute force| " << fmt(worst);
  });

  criterion(6, "metric axioms and q-monotonicity (100 triples)", 0.0, [](Outcome& out) {
    Rng rng(6006);
    const std::vector<std::pair<double, double>> configs{
        {1, 1}, {2, 2}, {2, 4}, {2, DisintConfig::kInfinity}};
    int asymmetric = 0, triangle = 0, monotone = 0;
    double worst_triangle = -std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 100; ++trial) {
      const int fibers = 1 + static_cast<int>(rng.index(4));
      const auto bundle = testing::random_bundle(rng, fibers, 3 + static_cast<int>(rng.index(4)));
      const auto sigma = testing::random_sigma(rng, fibers);
      const auto a = testing::random_fibered(rng, bundle, sigma, 4);
      const auto b = testing::random_fibered(rng, bundle, sigma, 4);
      const auto c = testing::random_fibered(rng, bundle, sigma, 4);
      for (const auto& [p, q] : configs) {
        const DisintConfig cfg(p, q);
        const double ab = disintegrated_distance(bundle, a, b, cfg);
        const double bc = disintegrated_distance(bundle, b, c, cfg);
        const double ac = disintegrated_distance(bundle, a, c, cfg);
        if (ab != disintegrated_distance(bundle, b, a, cfg)) ++asymmetric;
        worst_triangle = std::max(worst_triangle, ac - ab - bc);
        if (ac > ab + bc + 1e-9) ++triangle;
      }
      for (double p : {1.0, 2.0}) {
        const std::vector<double> qs{p, 1.5 * p, 2 * p, 4 * p, DisintConfig::kInfinity};
        for (std::size_t i = 0; i + 1 < qs.size(); ++i) {
          if (disintegrated_distance(bundle, a, b, DisintConfig(p, qs[i])) >
              disintegrated_distance(bundle, a, b, DisintConfig(p, qs[i + 1])) + 1e-12) {
            ++monotone;
          }
        }
      }
    }
    out.require(asymmetric == 0, std::to_string(asymmetric) + " asymmetric");
    out.require(triangle == 0, std::to_string(triangle) + " triangle violations");
    out.require(monotone == 0, std::to_string(monotone) + " monotonicity violations");
    out.detail << "max triangle excess " << fmt(worst_triangle);
  });

  criterion(7, "decoupling at q = p (20 instances)", 0.0, [](Outcome& out) {
    Rng rng(7007);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const double p = std::vector<double>{1.0, 2.0, 3.0}[rng.index(3)];
      const int fibers = 2 + static_cast<int>(rng.index(3));
      const auto problem = testing::random_problem(rng, 3, fibers, 5, 4, p, p);
      const double joint = disint_barycenter(problem).value;
      double aggregate = 0.0;
      for (std::size_t b = 0; b < problem.bundle.base_count(); ++b) {
        if (!problem.active(b)) continue;
        std::vector<DiscreteMeasure> inputs;
        for (const auto& m : problem.inputs) inputs.push_back(*m.fiber(b));
        const auto fiber = make_classical_problem(problem.bundle.cost(b), inputs, problem.lambdas,
                                                  p, p, problem.support[b]);
        aggregate += problem.sigma()[b] * classical_barycenter(fiber).value;
      }
      worst = std::max(worst, std::abs(joint - aggregate));
    }
    out.require(worst <= 1e-9, "max difference " + fmt(worst));
    out.detail << "max |joint - sum of fibers| " << fmt(worst);
  });

  criterion(8, "c-transform identities (100 potentials)", 0.0, [](Outcome& out) {
    Rng rng(8008);
    double triple = 0.0, below = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const int n = 2 + static_cast<int>(rng.index(8));
      const auto cost = testing::random_cost(rng, n);
      const double lambda = rng.uniform(0.1, 2.0);
      const double p = rng.uniform(1.0, 3.0);
      PotentialFn xi;
      for (int i = 0; i < n; ++i) xi.values.push_back(rng.uniform(-2.0, 2.0));
      const auto s1 = c_transform(xi, lambda, p, cost);
      const auto s2 = c_transform(s1, lambda, p, cost);
      const auto s3 = c_transform(s2, lambda, p, cost);
      for (int i = 0; i < n; ++i) {
        triple = std::max(triple, std::abs(s3.values[i] - s1.values[i]));
        below = std::max(below, s2.values[i] - xi.values[i]);
      }
    }
    // 1-Lipschitz functions on a dyadic grid; every step is exact in binary.
    double tent = 0.0;
    std::vector<double> xs;
    for (int i = 0; i <= 64; ++i) xs.push_back(-4.0 + 0.125 * i);
    const auto line = GroundCost::line(xs);
    for (int trial = 0; trial < 20; ++trial) {
      PotentialFn phi;
      if (trial == 0) {
        for (double x : xs) phi.values.push_back(tent_potential(x));
      } else {
        double v = 0.125 * static_cast<double>(rng.index(17)) - 1.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
          if (i > 0) v += 0.0625 * (static_cast<double>(rng.index(5)) - 2.0);
          phi.values.push_back(v);
        }
      }
      const auto s = c_transform(phi, 1.0, 1.0, line);
      for (std::size_t i = 0; i < xs.size(); ++i) tent = std::max(tent, std::abs(s.values[i] + phi.values[i]));
    }
    out.require(triple <= 1e-12, "S^3 - S " + fmt(triple));
    out.require(below <= 1e-12, "S^2 xi - xi " + fmt(below));
    out.require(tent == 0.0, "S phi + phi " + fmt(tent));
    out.detail << "max |S^3 - S| " << fmt(triple) << ", max (S^2 xi - xi)+ " << fmt(std::max(below, 0.0))
               << ", max |S phi + phi| " << fmt(tent);
  });

  criterion(9, "subgradient solver at p = 2, q = 4 (10 instances)", 0.0, [](Outcome& out) {
    Rng rng(9009);
    double worst_gap = 0.0, worst_oracle = 0.0;
    int max_iterations = 0, uncertified = 0;
    for (int trial = 0; trial < 10; ++trial) {
      const auto problem = testing::random_problem(rng, 2, 2, 3, 3, 2.0, 4.0);
      SubgradientOptions options;
      options.max_iterations = 10000;
      options.relative_gap = 1e-3;
      const auto r = disint_barycenter(problem, options);
      if (!r.certified) ++uncertified;
      worst_gap = std::max(worst_gap, (r.value - r.dual_bound) / (1.0 + r.value));
      max_iterations = std::max(max_iterations, r.iterations);
      worst_oracle = std::max(worst_oracle, std::abs(r.value - testing::grid_search_value(problem, 32)));
    }
    out.require(uncertified == 0, std::to_string(uncertified) + " uncertified");
    out.require(worst_gap <= 1e-3, "relative gap " + fmt(worst_gap));
    out.require(max_iterations <= 10000, "iterations " + std::to_string(max_iterations));
    out.require(worst_oracle <= 2e-2, "grid oracle difference " + fmt(worst_oracle));
    out.detail << "max relative gap " << fmt(worst_gap) << ", max iterations " << max_iterations
               << ", max |value - grid| " << fmt(worst_oracle);
  });

  criterion(10, "uniqueness probe at p = q = 2, 50-atom input", 0.0, [](Outcome& out) {
    const std::vector<std::string> ids{"w1", "w2"};
    const std::vector<double> shifts{1.7, -0.5};
    std::vector<InterpolationFiber> fibers;
    std::vector<GroundCost> costs;
    std::vector<std::vector<std::vector<double>>> coords;
    for (double c : shifts) {
      fibers.push_back(interpolation_fiber(50, c));
      costs.push_back(fibers.back().cost);
      std::vector<std::vector<double>> pts;
      for (double x : fibers.back().xs) pts.push_back({x});
      coords.push_back(pts);
    }
    const std::vector<double> sigma{0.4, 0.6};
    const FiberedMeasure spread(ids, sigma, {fibers[0].grid, fibers[1].grid});
    const FiberedMeasure point(ids, sigma, {fibers[0].dirac, fibers[1].dirac});
    const auto problem = make_problem(Bundle::per_fiber(ids, costs, coords), {spread, point},
                                      {0.5, 0.5}, DisintConfig(2.0, 2.0), 2.0);
    const auto r = disint_barycenter(problem);
    const auto report = perturbation_uniqueness_probe(problem, r, 10, 1e-3, 10010);
    out.require(report.equal_value == 10, std::to_string(report.equal_value) + "/10 equal-value restarts");
    out.require(report.max_distance <= 1e-4, "spread " + fmt(report.max_distance));

    int maps = 0;
    double mass_on_midpoints = 0.0;
    for (std::size_t b = 0; b < 2; ++b) {
      const auto plan = solve_ot(fibers[b].grid, *r.minimizer.fiber(b), costs[b], 2.0);
      if (const auto map = coupling_is_deterministic(plan.coupling)) {
        ++maps;
        for (std::size_t i = 0; i < map->size(); ++i) {
          if (plan.coupling.target_points[(*map)[i]] == fibers[b].midpoints[i]) {
            mass_on_midpoints += fibers[b].grid.weights()[i] / 2.0;
          }
        }
      }
    }
    out.require(maps == 2, "coupling from the spread input is not a map on every fiber");
    out.require(std::abs(mass_on_midpoints - 1.0) <= 1e-9, "map does not hit the midpoints");
    out.detail << report.trials << " restarts, max distance " << fmt(report.max_distance)
               << ", maps on " << maps << "/2 fibers";
  });

  std::printf("%s: %d criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
