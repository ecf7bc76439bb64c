#include "fiberot/reproductions.hpp"

#include "fiberot/error.hpp"

namespace fiberot {

TwoIntervalExample make_two_interval_example(int n, int inputs) {
  if (n < 1) throw Error(ErrorCode::InvalidProblem, "need at least one atom per interval");
  if (inputs < 2) throw Error(ErrorCode::InvalidProblem, "need at least two inputs");
  TwoIntervalExample ex;
  for (int i = 0; i < n; ++i) ex.coordinates.push_back(-2.0 + (i + 0.5) / n);
  for (int i = 0; i < n; ++i) ex.coordinates.push_back(1.0 + (i + 0.5) / n);

  std::vector<Atom> left, right;
  for (int i = 0; i < n; ++i) {
    left.push_back({i, 1.0});
    right.push_back({n + i, 1.0});
  }
  ex.left = normalize_measure(left);
  ex.right = normalize_measure(right);

  std::vector<DiscreteMeasure> mus;
  for (int k = 1; k <= inputs; ++k) mus.push_back(k % 2 == 1 ? ex.right : ex.left);
  const std::vector<double> lambdas(inputs, 1.0 / inputs);
  ex.problem = make_classical_problem(GroundCost::line(ex.coordinates), std::move(mus),
                                      lambdas, 1.0, 1.0);
  return ex;
}

double tent_potential(double t) {
  if (t >= -4.0 && t < -2.0) return -4.0 - t;
  if (t >= -2.0 && t < 2.0) return t;
  if (t >= 2.0 && t <= 4.0) return 4.0 - t;
  return 0.0;
}

DualCertificate tent_certificate(const TwoIntervalExample& ex) {
  DualCertificate cert = zero_certificate(ex.problem);
  const double K = static_cast<double>(ex.problem.K());
  const auto& support = ex.problem.support[0];
  for (std::size_t k = 0; k < ex.problem.K(); ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;  // k = 0 is the first (odd) input
    for (std::size_t s = 0; s < support.size(); ++s) {
      cert.xi[k][0][s] = sign * tent_potential(ex.coordinates[support[s]]) / K;
    }
  }
  return cert;
}

SplitBaseExample make_split_base_example() {
  const std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0};
  const std::vector<std::string> ids{"w1", "w2"};
  const std::vector<double> sigma{0.5, 0.5};
  Bundle bundle = Bundle::shared(ids, GroundCost::line(grid));

  const auto dirac = [](int i) { return std::optional<DiscreteMeasure>(DiscreteMeasure::dirac(i)); };
  FiberedMeasure first(ids, sigma, {dirac(0), dirac(0)});
  FiberedMeasure second(ids, sigma, {dirac(0), dirac(4)});

  SplitBaseExample ex{
      make_problem(std::move(bundle), {first, second}, {0.5, 0.5},
                   DisintConfig(2.0, DisintConfig::kInfinity), 2.0),
      FiberedMeasure(ids, sigma, {dirac(2), dirac(2)}),
      FiberedMeasure(ids, sigma, {dirac(0), dirac(2)})};
  return ex;
}

}  // namespace fiberot
