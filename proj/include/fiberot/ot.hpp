#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fiberot/measures.hpp"

namespace fiberot {

/// Transport plan between the supports of two measures, row-major
/// (source atom × target atom).
struct Coupling {
  std::vector<int> source_points;
  std::vector<int> target_points;
  std::vector<double> mass;

  std::size_t rows() const { return source_points.size(); }
  std::size_t cols() const { return target_points.size(); }
  double operator()(std::size_t i, std::size_t j) const { return mass[i * cols() + j]; }
};

/// Exact solution of the Kantorovich problem with cost d^p.
///
/// Potentials follow the sign convention  -phi(u) - psi(v) <= d(u,v)^p  and
/// are aligned with the source/target atoms of the coupling; phi at the first
/// source atom is pinned to zero.
struct OTResult {
  double p = 1.0;
  double value_p = 0.0;  ///< MK_p^p
  Coupling coupling;
  std::vector<double> phi;
  std::vector<double> psi;

  double distance() const;  ///< MK_p
};

/// Function on the points of one fiber.
struct PotentialFn {
  std::vector<double> values;
};

/// Primal network simplex for the bipartite transportation problem. Holds
/// scratch buffers, so one instance must not be shared between threads.
class TransportSimplex {
 public:
  struct Solution {
    double value = 0.0;
    std::vector<double> flow;  ///< m × n
    std::vector<double> u;     ///< row duals, u[0] = 0
    std::vector<double> v;     ///< column duals; u_i + v_j <= c_ij
    int pivots = 0;
  };

  Solution solve(std::span<const double> supply, std::span<const double> demand,
                 std::span<const double> cost);

 private:
  void compute_potentials();
  bool tree_path(int from_row, int to_col);

  int m_ = 0;
  int n_ = 0;
  std::span<const double> cost_;
  std::vector<double> flow_;
  std::vector<char> basic_;
  std::vector<int> basis_;  // basic cells (i * n + j)
  std::vector<std::vector<int>> adjacency_;
  std::vector<double> u_, v_;
  std::vector<int> parent_cell_, stack_, path_;
  std::vector<char> visited_;
};

/// MK_p^p between two measures on the points of `cost`, with coupling and
/// optimal potentials. Throws SupportOutOfRange, DegenerateInput, InvalidConfig.
OTResult solve_ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                  const GroundCost& cost, double p);

/// MK_p between two measures; exactly symmetric in its arguments.
double mk_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                   const GroundCost& cost, double p);

/// Exact minimum by enumerating vertices of the transportation polytope
/// (spanning-tree bases for supports of at most 4 atoms each, permutations
/// for uniform measures with equal atom counts up to 8). Throws TooLarge.
double brute_force_ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                      const GroundCost& cost, double p);

/// u ↦ max_v (-lambda d(u,v)^p - xi(v)) over all points of the fiber.
PotentialFn c_transform(const PotentialFn& xi, double lambda, double p,
                        const GroundCost& cost);

/// Same transform with xi given on `targets` and the result evaluated on
/// `sources` (both lists of fiber points).
std::vector<double> c_transform(std::span<const double> xi,
                                std::span<const int> targets,
                                std::span<const int> sources, double lambda,
                                double p, const GroundCost& cost);

/// Extends the target-side potential of `result` to every point of `support`
/// by the c-transform of phi, which keeps (phi, psi) dual feasible on the
/// whole support; -psi is then a subgradient of MK_p^p(mu, ·) in the target
/// weights on `support`.
std::vector<double> target_potential_on(const OTResult& result,
                                        std::span<const int> support,
                                        const GroundCost& cost);

/// Source → target atom index map when every row of the coupling puts more
/// than `tol` of its mass on a single target.
std::optional<std::vector<int>> coupling_is_deterministic(const Coupling& c,
                                                          double tol = 1e-9);

}  // namespace fiberot
