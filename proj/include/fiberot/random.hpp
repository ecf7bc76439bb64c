#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace fiberot {

/// mt19937_64 with hand-rolled draws so that sequences agree across standard
/// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform on {0, ..., n-1}.
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  /// Flat Dirichlet draw of length n.
  std::vector<double> simplex(std::size_t n) {
    std::vector<double> w(n);
    double total = 0.0;
    for (double& v : w) {
      v = -std::log(1.0 - uniform());
      total += v;
    }
    for (double& v : w) v /= total;
    return w;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace fiberot
