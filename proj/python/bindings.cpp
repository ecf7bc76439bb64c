#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fiberot/barycenter.hpp"
#include "fiberot/disint_metric.hpp"
#include "fiberot/duality.hpp"
#include "fiberot/error.hpp"
#include "fiberot/generate.hpp"
#include "fiberot/io.hpp"
#include "fiberot/ot.hpp"
#include "fiberot/reproductions.hpp"

namespace py = pybind11;
using namespace fiberot;

namespace {

using Atoms = std::vector<std::pair<int, double>>;

py::object to_python(const Json& doc) {
  return py::module_::import("json").attr("loads")(rounded(doc).dump());
}

Instance instance_from(const py::object& doc) {
  const auto text = py::module_::import("json").attr("dumps")(doc).cast<std::string>();
  return parse_instance(Json::parse(text));
}

DiscreteMeasure measure_from(const Atoms& atoms) {
  std::vector<Atom> raw;
  for (const auto& [point, w] : atoms) raw.push_back({point, w});
  return normalize_measure(raw);
}

DisintConfig config_from(double p, std::optional<double> q) { return DisintConfig(p, q.value_or(p)); }

BarycenterProblem problem_from(const Instance& inst, const std::optional<std::vector<std::string>>& names,
                               double p, std::optional<double> q,
                               std::optional<std::vector<double>> lambdas) {
  const auto chosen = names.value_or(inst.names);
  std::vector<double> weights = lambdas.value_or(std::vector<double>(chosen.size(), 1.0));
  double total = 0.0;
  for (double w : weights) total += w;
  for (double& w : weights) w /= total;
  auto problem = make_problem(inst.bundle, inst.select(chosen), weights, config_from(p, q), p,
                              inst.support);
  if (inst.reference) problem.reference = inst.reference;
  return problem;
}

SubgradientOptions options_from(int max_iter, std::optional<double> tol) {
  SubgradientOptions options;
  options.max_iterations = max_iter;
  if (tol) options.relative_gap = *tol;
  return options;
}

Json result_json(const BarycenterResult& r) {
  Json per_k = Json::array();
  for (double d : r.per_k_distances) per_k.push_back(d);
  return {{"value", r.value},          {"method", r.method},
          {"certified", r.certified},  {"dual_bound", r.dual_bound},
          {"iterations", r.iterations}, {"per_k_distances", per_k},
          {"minimizer", measure_to_json(r.minimizer)}};
}

}  // namespace

PYBIND11_MODULE(_fiberot, m) {
  m.doc() = "Discrete optimal transport on fibered spaces";
  py::register_exception<Error>(m, "FiberotError", PyExc_ValueError);

  m.def(
      "solve_ot",
      [](const Atoms& mu, const Atoms& nu, const std::vector<std::vector<double>>& cost, double p) {
        const auto r = solve_ot(measure_from(mu), measure_from(nu), GroundCost(cost), p);
        Json coupling = Json::array();
        for (std::size_t i = 0; i < r.coupling.rows(); ++i) {
          for (std::size_t j = 0; j < r.coupling.cols(); ++j) {
            if (r.coupling(i, j) > 0.0) {
              coupling.push_back({r.coupling.source_points[i], r.coupling.target_points[j],
                                  r.coupling(i, j)});
            }
          }
        }
        return to_python({{"value_p", r.value_p},
                          {"distance", r.distance()},
                          {"coupling", coupling},
                          {"phi", r.phi},
                          {"psi", r.psi}});
      },
      py::arg("mu"), py::arg("nu"), py::arg("cost"), py::arg("p") = 1.0,
      "Exact MK_p^p between two measures given as (point, weight) pairs.");

  m.def(
      "mk_distance",
      [](const Atoms& mu, const Atoms& nu, const std::vector<std::vector<double>>& cost, double p) {
        return mk_distance(measure_from(mu), measure_from(nu), GroundCost(cost), p);
      },
      py::arg("mu"), py::arg("nu"), py::arg("cost"), py::arg("p") = 1.0);

  m.def(
      "brute_force_ot",
      [](const Atoms& mu, const Atoms& nu, const std::vector<std::vector<double>>& cost, double p) {
        return brute_force_ot(measure_from(mu), measure_from(nu), GroundCost(cost), p);
      },
      py::arg("mu"), py::arg("nu"), py::arg("cost"), py::arg("p") = 1.0);

  m.def(
      "distance",
      [](const py::object& instance, const std::string& a, const std::string& b, double p,
         std::optional<double> q) {
        const auto inst = instance_from(instance);
        const auto cfg = config_from(p, q);
        Json profile = Json::object();
        for (const auto& fd : fiber_distance_profile(inst.bundle, inst.measure(a), inst.measure(b), p)) {
          profile[fd.base] = fd.distance;
        }
        return to_python(
            {{"distance", disintegrated_distance(inst.bundle, inst.measure(a), inst.measure(b), cfg)},
             {"fiber_profile", profile}});
      },
      py::arg("instance"), py::arg("m"), py::arg("n"), py::arg("p") = 1.0,
      py::arg("q") = py::none(), "Disintegrated (p, q) distance between two named measures.");

  m.def(
      "barycenter",
      [](const py::object& instance, std::optional<std::vector<std::string>> measures, double p,
         std::optional<double> q, std::optional<std::vector<double>> lambdas, int max_iter,
         std::optional<double> tol) {
        const auto problem = problem_from(instance_from(instance), measures, p, q, lambdas);
        const auto r = disint_barycenter(problem, options_from(max_iter, tol));
        return to_python(result_json(r));
      },
      py::arg("instance"), py::arg("measures") = py::none(), py::arg("p") = 1.0,
      py::arg("q") = py::none(), py::arg("lambdas") = py::none(), py::arg("max_iter") = 10000,
      py::arg("tol") = py::none(), "Barycenter with kappa = p on the instance's candidate support.");

  m.def(
      "certify",
      [](const py::object& instance, std::optional<std::vector<std::string>> measures, double p,
         std::optional<double> q, std::optional<std::vector<double>> lambdas, double tol) {
        const auto problem = problem_from(instance_from(instance), measures, p, q, lambdas);
        const auto r = disint_barycenter(problem);
        const auto cert = extract_certificate(problem, r);
        const auto gap = duality_gap(problem, r, cert, tol);
        return to_python({{"primal", gap.primal},
                          {"dual", gap.dual},
                          {"gap", gap.gap},
                          {"certified", gap.certified},
                          {"certificate", certificate_to_json(cert, problem)}});
      },
      py::arg("instance"), py::arg("measures") = py::none(), py::arg("p") = 1.0,
      py::arg("q") = py::none(), py::arg("lambdas") = py::none(), py::arg("tol") = 1e-7);

  m.def(
      "generate",
      [](std::uint64_t seed, int fibers, int atoms, int measures, int dim, bool oracle_checkable) {
        GenerateSpec spec;
        spec.seed = seed;
        spec.fibers = fibers;
        spec.atoms = atoms;
        spec.measures = measures;
        spec.dimension = dim;
        spec.oracle_checkable = oracle_checkable;
        return to_python(instance_to_json(generate_instance(spec)));
      },
      py::arg("seed") = 0, py::arg("fibers") = 2, py::arg("atoms") = 3, py::arg("measures") = 2,
      py::arg("dim") = 1, py::arg("oracle_checkable") = false);

  m.def(
      "two_interval_example",
      [](int n) {
        const auto ex = make_two_interval_example(n);
        const auto r = classical_barycenter(ex.problem);
        const auto cost = ex.problem.bundle.cost(0);
        return to_python(
            {{"value", r.value},
             {"left_objective", objective(ex.problem, FiberedMeasure::single(ex.left))},
             {"right_objective", objective(ex.problem, FiberedMeasure::single(ex.right))},
             {"tent_dual", eval_dual(tent_certificate(ex), ex.problem)},
             {"shift_distance", mk_distance(ex.left, ex.right, cost, 1.0)}});
      },
      py::arg("n") = 50);

  m.def("split_base_example", [] {
    const auto ex = make_split_base_example();
    return to_python(
        {{"objective_a", objective(ex.problem, ex.candidate_a)},
         {"objective_b", objective(ex.problem, ex.candidate_b)},
         {"distance", disintegrated_distance(ex.problem.bundle, ex.candidate_a, ex.candidate_b,
                                             ex.problem.config)}});
  });
}
