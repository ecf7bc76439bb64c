#include "fiberot/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fiberot/barycenter.hpp"
#include "fiberot/disint_metric.hpp"
#include "fiberot/duality.hpp"
#include "fiberot/error.hpp"
#include "fiberot/generate.hpp"
#include "fiberot/io.hpp"
#include "fiberot/ot.hpp"
#include "fiberot/reproductions.hpp"

namespace fiberot {

namespace {

struct RunConfig {
  std::string command;
  std::vector<std::string> inputs;
  std::string p_text = "1";
  std::string q_text;
  std::string kappa_text;
  std::vector<double> lambdas;
  double tol = 0.0;  // 0: per-method default
  int max_iter = 10000;
  std::uint64_t seed = 0;
  std::string format = "json";
  std::string output;

  std::string mu, nu, base, certificate, example;
  std::vector<std::string> measures, candidates;
  int n = 50;
  int trials = 10;
  double radius = 1e-3;
  GenerateSpec generate;
};

struct Row {
  std::string quantity;
  std::string base;
  double value;
};

struct Report {
  Json doc = Json::object();
  std::vector<Row> rows;
  int status = kExitOk;

  void scalar(const std::string& key, double v) {
    doc[key] = v;
    rows.push_back({key, "", v});
  }
};

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string render(const Report& report, const std::string& format) {
  if (format == "json") return dump_report(report.doc);
  std::ostringstream os;
  os << "quantity,base_id,value\n";
  for (const auto& r : report.rows) {
    os << r.quantity << "," << r.base << "," << csv_number(r.value) << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------

struct Parsed {
  double p;
  double q;
  double kappa;
  DisintConfig config;
};

Parsed parse_exponents(const RunConfig& cfg) {
  Parsed e;
  e.p = parse_exponent(cfg.p_text);
  e.q = cfg.q_text.empty() ? e.p : parse_exponent(cfg.q_text);
  e.kappa = cfg.kappa_text.empty() ? e.p : parse_exponent(cfg.kappa_text);
  e.config = DisintConfig(e.p, e.q);
  if (!(e.kappa > 0.0) || std::isinf(e.kappa)) {
    throw Error(ErrorCode::InvalidConfig, "kappa must be positive and finite");
  }
  return e;
}

Instance load_inputs(const RunConfig& cfg) {
  if (cfg.inputs.empty()) throw Error(ErrorCode::InvalidConfig, "no input file given");
  const bool csv = std::all_of(cfg.inputs.begin(), cfg.inputs.end(), [](const std::string& s) {
    return std::filesystem::path(s).extension() == ".csv";
  });
  if (csv) {
    std::vector<std::filesystem::path> paths(cfg.inputs.begin(), cfg.inputs.end());
    return load_csv_instance(paths);
  }
  if (cfg.inputs.size() != 1) {
    throw Error(ErrorCode::InvalidConfig, "give one JSON instance or only CSV files");
  }
  return load_instance(cfg.inputs[0]);
}

std::vector<double> resolve_lambdas(const RunConfig& cfg, std::size_t K) {
  if (cfg.lambdas.empty()) return std::vector<double>(K, 1.0 / static_cast<double>(K));
  if (cfg.lambdas.size() != K) {
    throw Error(ErrorCode::InvalidConfig, "--lambda needs " + std::to_string(K) + " weights");
  }
  double total = 0.0;
  for (double l : cfg.lambdas) {
    if (!(l > 0.0)) throw Error(ErrorCode::InvalidConfig, "--lambda weights must be positive");
    total += l;
  }
  std::vector<double> out = cfg.lambdas;
  for (double& l : out) l /= total;
  return out;
}

struct Setup {
  Instance instance;
  std::vector<std::string> names;
  BarycenterProblem problem;
  Parsed exponents;
};

Setup build_problem(const RunConfig& cfg) {
  Setup s;
  s.exponents = parse_exponents(cfg);
  s.instance = load_inputs(cfg);
  s.names = cfg.measures.empty() ? s.instance.names : cfg.measures;
  auto inputs = s.instance.select(s.names);
  const auto lambdas = resolve_lambdas(cfg, inputs.size());
  s.problem = make_problem(s.instance.bundle, std::move(inputs), lambdas, s.exponents.config,
                           s.exponents.kappa, s.instance.support);
  s.problem.reference = s.instance.reference;
  return s;
}

bool lp_exact(const BarycenterProblem& problem) {
  return problem.bundle.base_count() == 1 || problem.config.q == problem.config.p;
}

double relative_tolerance(const RunConfig& cfg, const BarycenterProblem& problem) {
  if (cfg.tol > 0.0) return cfg.tol;
  return lp_exact(problem) ? 1e-7 : 1e-3;
}

Json config_json(const BarycenterProblem& problem, const std::vector<std::string>& names) {
  Json j;
  j["p"] = problem.config.p;
  j["q"] = problem.config.q;
  j["kappa"] = problem.kappa;
  j["measures"] = names;
  j["lambdas"] = problem.lambdas;
  return j;
}

void add_profiles(Report& report, const BarycenterProblem& problem,
                  const std::vector<std::string>& names, const FiberedMeasure& n) {
  const auto d = input_distances(problem, n);
  const auto fibers = fiber_distances(problem, n);
  Json per_k = Json::object(), profiles = Json::object();
  for (std::size_t k = 0; k < names.size(); ++k) {
    per_k[names[k]] = d[k];
    report.rows.push_back({"distance:" + names[k], "", d[k]});
    profiles[names[k]] = Json::object();
    for (std::size_t b = 0; b < problem.bundle.base_count(); ++b) {
      if (!problem.active(b)) continue;
      const auto& id = problem.bundle.base_ids()[b];
      profiles[names[k]][id] = fibers[k][b];
      report.rows.push_back({"fiber_distance:" + names[k], id, fibers[k][b]});
    }
  }
  report.doc["per_k_distances"] = per_k;
  report.doc["fiber_profiles"] = profiles;
}

void add_minimizer(Report& report, const std::string& key, const FiberedMeasure& n) {
  report.doc[key] = measure_to_json(n);
  for (std::size_t b = 0; b < n.base_count(); ++b) {
    const auto* f = n.fiber(b);
    if (!f) continue;
    for (std::size_t a = 0; a < f->size(); ++a) {
      report.rows.push_back(
          {key + ":" + std::to_string(f->points()[a]), n.base_ids()[b], f->weights()[a]});
    }
  }
}

Json log_json(const std::vector<SolverLogEntry>& log) {
  Json out = Json::array();
  for (const auto& e : log) {
    out.push_back({{"iteration", e.iteration}, {"primal", e.primal}, {"dual", e.dual},
                   {"step", e.step}});
  }
  return out;
}

Json gap_json(const GapReport& g) {
  return {{"primal", g.primal}, {"dual", g.dual}, {"gap", g.gap}, {"certified", g.certified}};
}

// ---------------------------------------------------------------------------

Report cmd_ot(const RunConfig& cfg) {
  const double p = parse_exponent(cfg.p_text);
  const Instance inst = load_inputs(cfg);
  if (inst.names.size() < 2 && (cfg.mu.empty() || cfg.nu.empty())) {
    throw Error(ErrorCode::InvalidProblem, "need two measures");
  }
  const std::string mu_name = cfg.mu.empty() ? inst.names[0] : cfg.mu;
  const std::string nu_name = cfg.nu.empty() ? inst.names[1] : cfg.nu;
  const auto& m = inst.measure(mu_name);
  const auto& n = inst.measure(nu_name);
  require_same_base(m, n);
  std::size_t b = 0;
  if (!cfg.base.empty()) {
    const auto idx = inst.bundle.base_index(cfg.base);
    if (!idx) throw Error(ErrorCode::IndexOutOfRange, "unknown base id '" + cfg.base + "'");
    b = *idx;
  } else if (inst.bundle.base_count() > 1) {
    throw Error(ErrorCode::InvalidConfig, "instance has several base points; pass --base");
  }
  if (!m.fiber(b)) throw Error(ErrorCode::FiberMismatch, "no fiber at a σ-null base point");
  const OTResult r = solve_ot(*m.fiber(b), *n.fiber(b), inst.bundle.cost(b), p);

  Report report;
  report.doc["command"] = "ot";
  report.doc["mu"] = mu_name;
  report.doc["nu"] = nu_name;
  report.doc["base"] = inst.bundle.base_ids()[b];
  report.doc["p"] = p;
  report.scalar("value_p", r.value_p);
  report.scalar("distance", r.distance());
  Json coupling = Json::array();
  for (std::size_t i = 0; i < r.coupling.rows(); ++i) {
    for (std::size_t j = 0; j < r.coupling.cols(); ++j) {
      if (r.coupling(i, j) <= 0.0) continue;
      coupling.push_back({{"from", r.coupling.source_points[i]},
                          {"to", r.coupling.target_points[j]},
                          {"mass", r.coupling(i, j)}});
    }
  }
  report.doc["coupling"] = coupling;
  Json phi = Json::object(), psi = Json::object();
  for (std::size_t i = 0; i < r.phi.size(); ++i) {
    phi[std::to_string(r.coupling.source_points[i])] = r.phi[i];
    report.rows.push_back({"phi:" + std::to_string(r.coupling.source_points[i]),
                           inst.bundle.base_ids()[b], r.phi[i]});
  }
  for (std::size_t j = 0; j < r.psi.size(); ++j) {
    psi[std::to_string(r.coupling.target_points[j])] = r.psi[j];
    report.rows.push_back({"psi:" + std::to_string(r.coupling.target_points[j]),
                           inst.bundle.base_ids()[b], r.psi[j]});
  }
  report.doc["phi"] = phi;
  report.doc["psi"] = psi;
  return report;
}

Report cmd_dist(const RunConfig& cfg) {
  const Parsed e = parse_exponents(cfg);
  const Instance inst = load_inputs(cfg);
  if (inst.names.size() < 2 && (cfg.mu.empty() || cfg.nu.empty())) {
    throw Error(ErrorCode::InvalidProblem, "need two measures");
  }
  const std::string a = cfg.mu.empty() ? inst.names[0] : cfg.mu;
  const std::string b = cfg.nu.empty() ? inst.names[1] : cfg.nu;
  const auto& m = inst.measure(a);
  const auto& n = inst.measure(b);

  Report report;
  report.doc["command"] = "dist";
  report.doc["m"] = a;
  report.doc["n"] = b;
  report.doc["p"] = e.p;
  report.doc["q"] = e.q;
  report.scalar("distance", disintegrated_distance(inst.bundle, m, n, e.config));
  Json profile = Json::object();
  for (const auto& fd : fiber_distance_profile(inst.bundle, m, n, e.p)) {
    profile[fd.base] = fd.distance;
    report.rows.push_back({"fiber_distance", fd.base, fd.distance});
  }
  report.doc["fiber_profile"] = profile;
  if (inst.reference) {
    Json ref = Json::object();
    for (const auto& name : {a, b}) {
      const double d = reference_distance(inst.bundle, inst.measure(name), e.config,
                                          *inst.reference);
      ref[name] = d;
      report.rows.push_back({"reference_distance:" + name, "", d});
    }
    report.doc["reference_distance"] = ref;
  }
  return report;
}

Report barycenter_report(const RunConfig& cfg, const Setup& s, const BarycenterResult& r,
                         const std::string& command) {
  Report report;
  report.doc["command"] = command;
  report.doc["config"] = config_json(s.problem, s.names);
  report.doc["method"] = r.method;
  report.scalar("value", r.value);
  report.doc["iterations"] = r.iterations;
  add_profiles(report, s.problem, s.names, r.minimizer);
  add_minimizer(report, "minimizer", r.minimizer);

  const double rel = relative_tolerance(cfg, s.problem);
  const DualCertificate cert = extract_certificate(s.problem, r);
  const GapReport gap = duality_gap(s.problem, r, cert, rel * (1.0 + std::abs(r.value)));
  report.doc["certificate_gap"] = gap_json(gap);
  report.scalar("dual", gap.dual);
  report.scalar("gap", gap.gap);
  report.doc["certified"] = gap.certified;
  report.doc["solver_log"] = log_json(r.solver_log);
  if (!gap.certified) report.status = kExitUncertified;
  return report;
}

Report candidate_report(const RunConfig& cfg, const Setup& s, const std::string& command) {
  std::vector<FiberedMeasure> candidates;
  for (const auto& name : cfg.candidates) candidates.push_back(s.instance.measure(name));
  const std::size_t best = best_candidate(s.problem, candidates);
  Report report;
  report.doc["command"] = command;
  report.doc["config"] = config_json(s.problem, s.names);
  report.doc["method"] = "candidate-search";
  Json values = Json::object();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double v = objective(s.problem, candidates[i]);
    values[cfg.candidates[i]] = v;
    report.rows.push_back({"objective:" + cfg.candidates[i], "", v});
  }
  report.doc["candidate_objectives"] = values;
  report.doc["best"] = cfg.candidates[best];
  report.scalar("value", objective(s.problem, candidates[best]));
  add_profiles(report, s.problem, s.names, candidates[best]);
  add_minimizer(report, "minimizer", candidates[best]);
  return report;
}

SubgradientOptions solver_options(const RunConfig& cfg) {
  SubgradientOptions o;
  o.max_iterations = cfg.max_iter;
  if (cfg.tol > 0.0) o.relative_gap = cfg.tol;
  return o;
}

Report cmd_bary(const RunConfig& cfg, bool disintegrated) {
  const Setup s = build_problem(cfg);
  const std::string command = disintegrated ? "disint-bary" : "bary";
  if (!cfg.candidates.empty()) return candidate_report(cfg, s, command);
  if (s.problem.kappa != s.problem.config.p) {
    throw Error(ErrorCode::InvalidConfig,
                "kappa != p needs --candidates (exhaustive search over given measures)");
  }
  if (!disintegrated && s.problem.bundle.base_count() != 1) {
    throw Error(ErrorCode::InvalidProblem, "bary needs a one-point base; use disint-bary");
  }
  const BarycenterResult r = disintegrated ? disint_barycenter(s.problem, solver_options(cfg))
                                           : classical_barycenter(s.problem);
  return barycenter_report(cfg, s, r, command);
}

Report cmd_certify(const RunConfig& cfg) {
  const Setup s = build_problem(cfg);
  const BarycenterResult r = disint_barycenter(s.problem, solver_options(cfg));
  DualCertificate cert;
  std::string source = "extracted";
  if (!cfg.certificate.empty()) {
    std::ifstream in(cfg.certificate);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + cfg.certificate + "'");
    Json doc;
    try {
      doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
      throw Error(ErrorCode::ParseError, cfg.certificate + ": " + e.what());
    }
    cert = certificate_from_json(doc, s.problem);
    source = cfg.certificate;
  } else {
    cert = extract_certificate(s.problem, r);
  }
  const double rel = relative_tolerance(cfg, s.problem);
  const GapReport gap = duality_gap(s.problem, r, cert, rel * (1.0 + std::abs(r.value)));
  const ValidationReport issues = validate_certificate(cert, s.problem);

  Report report;
  report.doc["command"] = "certify";
  report.doc["config"] = config_json(s.problem, s.names);
  report.doc["certificate_source"] = source;
  report.scalar("primal", gap.primal);
  report.scalar("dual", gap.dual);
  report.scalar("gap", gap.gap);
  report.doc["certified"] = gap.certified;
  Json problems = Json::array();
  for (const auto& issue : issues.issues) {
    problems.push_back({{"kind", issue.kind}, {"location", issue.location},
                        {"amount", issue.amount}, {"message", issue.message}});
  }
  report.doc["certificate_issues"] = problems;
  add_minimizer(report, "minimizer", r.minimizer);
  report.doc["certificate"] = certificate_to_json(cert, s.problem);
  if (!gap.certified) report.status = kExitUncertified;
  return report;
}

Report cmd_probe(const RunConfig& cfg) {
  const Setup s = build_problem(cfg);
  if (s.problem.kappa != s.problem.config.p) {
    throw Error(ErrorCode::InvalidConfig, "the probe needs kappa == p");
  }
  const BarycenterResult r = disint_barycenter(s.problem, solver_options(cfg));
  const double tolerance = cfg.tol > 0.0 ? cfg.tol : 1e-4;
  const UniquenessReport u =
      perturbation_uniqueness_probe(s.problem, r, cfg.trials, cfg.radius, cfg.seed, tolerance);
  Report report;
  report.doc["command"] = "probe-uniqueness";
  report.doc["config"] = config_json(s.problem, s.names);
  report.scalar("value", r.value);
  report.doc["trials"] = u.trials;
  report.doc["equal_value"] = u.equal_value;
  report.scalar("max_distance", u.max_distance);
  report.doc["witness"] = {u.witness.first, u.witness.second};
  report.doc["values"] = u.values;
  report.doc["consistent_with_uniqueness"] = u.consistent_with_uniqueness;
  add_minimizer(report, "minimizer", r.minimizer);
  if (u.witness.first != u.witness.second) {
    const auto pick = [&](int i) -> const FiberedMeasure& {
      return i < 0 ? r.minimizer : u.minimizers[i];
    };
    report.doc["witness_measures"] = {measure_to_json(pick(u.witness.first)),
                                      measure_to_json(pick(u.witness.second))};
  }
  return report;
}

Report example_two_intervals(const RunConfig& cfg) {
  const TwoIntervalExample ex = make_two_interval_example(cfg.n);
  const auto& problem = ex.problem;
  const BarycenterResult r = classical_barycenter(problem);
  const auto left = FiberedMeasure::single(ex.left);
  const auto right = FiberedMeasure::single(ex.right);
  const DualCertificate tent = tent_certificate(ex);
  const DualCertificate extracted = extract_certificate(problem, r);

  Report report;
  report.doc["command"] = "example";
  report.doc["example"] = "two-interval";
  report.doc["n"] = cfg.n;
  report.scalar("primal", r.value);
  report.scalar("dual", eval_dual(tent, problem));
  report.doc["dual_certificate_valid"] = validate_certificate(tent, problem).ok();
  report.scalar("extracted_dual", eval_dual(extracted, problem));
  report.scalar("objective_left", objective(problem, left));
  report.scalar("objective_right", objective(problem, right));
  report.scalar("distance_left_right",
                mk_distance(ex.left, ex.right, problem.bundle.cost(0), 1.0));
  report.doc["minimizers"] = Json::array(
      {{{"label", "left grid"}, {"objective", objective(problem, left)},
        {"measure", measure_to_json(left)}},
       {{"label", "right grid"}, {"objective", objective(problem, right)},
        {"measure", measure_to_json(right)}}});
  add_minimizer(report, "lp_minimizer", r.minimizer);
  return report;
}

Report example_split_base() {
  const SplitBaseExample ex = make_split_base_example();
  const double a = objective(ex.problem, ex.candidate_a);
  const double b = objective(ex.problem, ex.candidate_b);
  const double d =
      disintegrated_distance(ex.problem.bundle, ex.candidate_a, ex.candidate_b, ex.problem.config);
  Report report;
  report.doc["command"] = "example";
  report.doc["example"] = "split-base";
  report.scalar("objective_a", a);
  report.scalar("objective_b", b);
  report.scalar("objective_difference", std::abs(a - b));
  report.scalar("distance_a_b", d);
  report.doc["minimizers"] = Json::array(
      {{{"label", "a"}, {"objective", a}, {"measure", measure_to_json(ex.candidate_a)}},
       {{"label", "b"}, {"objective", b}, {"measure", measure_to_json(ex.candidate_b)}}});
  return report;
}

Report cmd_example(const RunConfig& cfg) {
  if (cfg.example == "two-interval" || cfg.example == "2.2") return example_two_intervals(cfg);
  if (cfg.example == "split-base" || cfg.example == "2.1") return example_split_base();
  throw Error(ErrorCode::InvalidConfig,
              "unknown example '" + cfg.example + "' (two-interval or split-base)");
}

Report cmd_generate(const RunConfig& cfg) {
  GenerateSpec spec = cfg.generate;
  spec.seed = cfg.seed;
  Report report;
  report.doc = instance_to_json(generate_instance(spec));
  return report;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Discrete optimal transport on fibered spaces", "fiberot"};
  app.require_subcommand(1);
  RunConfig cfg;

  app.add_option("--p", cfg.p_text, "transport exponent p >= 1");
  app.add_option("--q", cfg.q_text, "fiber-norm exponent q in [p, inf]; defaults to p");
  app.add_option("--kappa", cfg.kappa_text, "objective exponent; defaults to p");
  app.add_option("--lambda", cfg.lambdas, "barycenter weights w1,w2,...")->delimiter(',');
  app.add_option("--tol", cfg.tol, "relative gap tolerance");
  app.add_option("--max-iter", cfg.max_iter, "subgradient iteration cap")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "seed for randomized probes and generation");
  app.add_option("--format", cfg.format, "report format")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("-o,--output", cfg.output, "write the report here instead of stdout");

  const auto with_inputs = [&](CLI::App* sub) {
    sub->add_option("inputs", cfg.inputs, "instance JSON, or CSV files of (x, weight)")
        ->required();
    sub->fallthrough();
    return sub;
  };
  auto* ot = with_inputs(app.add_subcommand("ot", "exact MK_p between two measures"));
  ot->add_option("--mu", cfg.mu, "source measure name");
  ot->add_option("--nu", cfg.nu, "target measure name");
  ot->add_option("--base", cfg.base, "base point id");

  auto* dist = with_inputs(app.add_subcommand("dist", "disintegrated (p, q) distance"));
  dist->add_option("--m", cfg.mu, "first measure name");
  dist->add_option("--n", cfg.nu, "second measure name");

  for (const auto& [name, help] :
       std::vector<std::pair<std::string, std::string>>{
           {"bary", "classical barycenter on a one-point base"},
           {"disint-bary", "disintegrated barycenter"},
           {"certify", "solve, then check a dual certificate"},
           {"probe-uniqueness", "randomized re-solves comparing minimizers"}}) {
    auto* sub = with_inputs(app.add_subcommand(name, help));
    sub->add_option("--measures", cfg.measures, "input measure names")->delimiter(',');
    if (name == "bary" || name == "disint-bary") {
      sub->add_option("--candidates", cfg.candidates, "evaluate these measures instead")
          ->delimiter(',');
    }
    if (name == "certify") {
      sub->add_option("--certificate", cfg.certificate, "certificate JSON to check");
    }
    if (name == "probe-uniqueness") {
      sub->add_option("--trials", cfg.trials, "number of re-solves")->check(CLI::NonNegativeNumber);
      sub->add_option("--radius", cfg.radius, "tie-break noise relative to the fiber diameter");
    }
  }

  auto* example = app.add_subcommand("example", "reproduce a worked example");
  example->add_option("name", cfg.example, "two-interval or split-base")->required();
  example->add_option("--n", cfg.n, "atoms per interval (two-interval)")->check(CLI::PositiveNumber);
  example->fallthrough();

  auto* generate = app.add_subcommand("generate", "write a random instance");
  generate->add_option("--fibers", cfg.generate.fibers, "base points")
      ->check(CLI::PositiveNumber);
  generate->add_option("--atoms", cfg.generate.atoms, "points per fiber")
      ->check(CLI::PositiveNumber);
  generate->add_option("--measures", cfg.generate.measures, "number of measures")
      ->check(CLI::PositiveNumber);
  generate->add_option("--dim", cfg.generate.dimension, "1 or 2")->check(CLI::Range(1, 2));
  generate->add_flag("--oracle-checkable", cfg.generate.oracle_checkable,
                     "keep fibers within brute-force bounds");
  generate->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    Report report;
    const auto* chosen = app.get_subcommands().front();
    const std::string name = chosen->get_name();
    if (name == "ot") {
      report = cmd_ot(cfg);
    } else if (name == "dist") {
      report = cmd_dist(cfg);
    } else if (name == "bary") {
      report = cmd_bary(cfg, false);
    } else if (name == "disint-bary") {
      report = cmd_bary(cfg, true);
    } else if (name == "certify") {
      report = cmd_certify(cfg);
    } else if (name == "probe-uniqueness") {
      report = cmd_probe(cfg);
    } else if (name == "example") {
      report = cmd_example(cfg);
    } else {
      report = cmd_generate(cfg);
    }
    const std::string text =
        name == "generate" ? dump_report(report.doc) : render(report, cfg.format);
    if (cfg.output.empty()) {
      out << text;
    } else {
      std::ofstream file(cfg.output, std::ios::binary);
      if (!file) throw Error(ErrorCode::ParseError, "cannot write '" + cfg.output + "'");
      file << text;
    }
    if (report.status == kExitUncertified) err << "not certified\n";
    return report.status;
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    const bool solver = e.code() == ErrorCode::NumericalFailure ||
                        e.code() == ErrorCode::LPInfeasible;
    return solver ? kExitUncertified : kExitInvalid;
  }
}

}  // namespace fiberot
