#pragma once

#include <cstdint>

#include "fiberot/io.hpp"

namespace fiberot {

struct GenerateSpec {
  std::uint64_t seed = 0;
  int fibers = 2;
  int atoms = 3;     ///< points per fiber; every measure may use all of them
  int measures = 2;
  int dimension = 1; ///< 1: unit interval, 2: unit square
  bool oracle_checkable = false;  ///< at most 4 atoms per fiber
};

/// Deterministic random instance: uniform point clouds with Euclidean costs
/// (coordinates rounded to 12 significant digits), flat-Dirichlet σ and fiber
/// weights. Throws InvalidConfig for out-of-range sizes.
Instance generate_instance(const GenerateSpec& spec);

}  // namespace fiberot
