#include "fiberot/generate.hpp"

#include "fiberot/error.hpp"
#include "fiberot/random.hpp"

namespace fiberot {

Instance generate_instance(const GenerateSpec& spec) {
  if (spec.fibers < 1 || spec.atoms < 1 || spec.measures < 1) {
    throw Error(ErrorCode::InvalidConfig, "sizes must be positive");
  }
  if (spec.dimension != 1 && spec.dimension != 2) {
    throw Error(ErrorCode::InvalidConfig, "dimension must be 1 or 2");
  }
  if (spec.oracle_checkable && spec.atoms > 4) {
    throw Error(ErrorCode::InvalidConfig,
                "oracle-checkable instances allow at most 4 atoms per fiber");
  }
  Rng rng(spec.seed);
  std::vector<std::string> ids;
  std::vector<GroundCost> costs;
  std::vector<std::vector<std::vector<double>>> coords;
  for (int f = 0; f < spec.fibers; ++f) {
    ids.push_back("w" + std::to_string(f + 1));
    std::vector<std::vector<double>> pts(spec.atoms);
    for (auto& pt : pts) {
      for (int d = 0; d < spec.dimension; ++d) pt.push_back(round_significant(rng.uniform()));
    }
    costs.push_back(GroundCost::euclidean(pts));
    coords.push_back(std::move(pts));
  }
  std::vector<double> sigma = rng.simplex(spec.fibers);
  for (double& s : sigma) s = round_significant(s);

  Instance inst;
  inst.bundle = Bundle::per_fiber(ids, std::move(costs), std::move(coords));
  for (int k = 0; k < spec.measures; ++k) {
    std::vector<std::optional<DiscreteMeasure>> fibers;
    for (int f = 0; f < spec.fibers; ++f) {
      const auto w = rng.simplex(spec.atoms);
      std::vector<Atom> atoms;
      for (int i = 0; i < spec.atoms; ++i) atoms.push_back({i, round_significant(w[i])});
      fibers.push_back(normalize_measure(atoms));
    }
    inst.names.push_back(std::string(1, static_cast<char>('a' + k % 26)) +
                         (k >= 26 ? std::to_string(k / 26) : ""));
    inst.measures.emplace_back(ids, sigma, std::move(fibers));
  }
  return inst;
}

}  // namespace fiberot
