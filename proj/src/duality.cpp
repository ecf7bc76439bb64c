#include "fiberot/duality.hpp"

#include <cmath>
#include <limits>

#include "barycenter_detail.hpp"
#include "fiberot/error.hpp"
#include "fiberot/ot.hpp"

namespace fiberot {

namespace {

bool shapes_match(const DualCertificate& cert, const BarycenterProblem& problem) {
  const std::size_t K = problem.K(), bases = problem.bundle.base_count();
  if (cert.zeta.size() != K || cert.xi.size() != K) return false;
  for (std::size_t k = 0; k < K; ++k) {
    if (cert.zeta[k].size() != bases || cert.xi[k].size() != bases) return false;
    for (std::size_t b = 0; b < bases; ++b) {
      if (problem.active(b) && cert.xi[k][b].size() != problem.support[b].size()) {
        return false;
      }
    }
  }
  return true;
}

void require_shape(const DualCertificate& cert, const BarycenterProblem& problem) {
  if (!shapes_match(cert, problem)) {
    throw Error(ErrorCode::ShapeMismatch, "certificate does not match the problem");
  }
}

std::vector<double> transform_on_atoms(std::span<const double> xi,
                                       const BarycenterProblem& problem, std::size_t k,
                                       std::size_t b) {
  const auto* m = problem.inputs[k].fiber(b);
  return c_transform(xi, problem.support[b], m->points(), problem.lambdas[k],
                     problem.config.p, problem.bundle.cost(b));
}

void close_sum(DualCertificate& cert, const BarycenterProblem& problem, std::size_t b) {
  const std::size_t K = problem.K();
  for (std::size_t s = 0; s < problem.support[b].size(); ++s) {
    double rest = 0.0;
    for (std::size_t k = 0; k + 1 < K; ++k) rest += cert.eta(k, b, s);
    cert.xi[K - 1][b][s] = -rest / cert.zeta[K - 1][b];
  }
}

}  // namespace

DualCertificate zero_certificate(const BarycenterProblem& problem) {
  const std::size_t K = problem.K(), bases = problem.bundle.base_count();
  DualCertificate cert;
  cert.zeta.assign(K, std::vector<double>(bases, 1.0));
  cert.xi.assign(K, std::vector<std::vector<double>>(bases));
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t b = 0; b < bases; ++b) cert.xi[k][b].assign(problem.support[b].size(), 0.0);
  }
  return cert;
}

ValidationReport validate_certificate(const DualCertificate& cert,
                                      const BarycenterProblem& problem) {
  ValidationReport report;
  if (!shapes_match(cert, problem)) {
    report.issues.push_back({"shape", {}, 0.0, "certificate does not match the problem"});
    return report;
  }
  const auto sigma = problem.sigma();
  const double rc = problem.config.r_conjugate();
  for (std::size_t k = 0; k < problem.K(); ++k) {
    double norm = 0.0;
    for (std::size_t b = 0; b < sigma.size(); ++b) {
      if (sigma[b] <= 0.0) continue;
      const double z = cert.zeta[k][b];
      if (!(z > 0.0) || !std::isfinite(z)) {
        report.issues.push_back({"positivity", {int(k), int(b)}, z,
                                 "zeta must be positive and finite"});
        continue;
      }
      norm = std::isinf(rc) ? std::max(norm, z) : norm + sigma[b] * std::pow(z, rc);
    }
    if (!std::isinf(rc)) norm = std::pow(norm, 1.0 / rc);
    if (norm > 1.0 + kNormTolerance) {
      report.issues.push_back({"norm", {int(k)}, norm, "zeta norm exceeds one"});
    }
  }
  for (std::size_t b = 0; b < sigma.size(); ++b) {
    if (sigma[b] <= 0.0) continue;
    for (std::size_t s = 0; s < problem.support[b].size(); ++s) {
      double sum = 0.0;
      bool finite = true;
      for (std::size_t k = 0; k < problem.K(); ++k) {
        sum += cert.eta(k, b, s);
        finite = finite && std::isfinite(cert.xi[k][b][s]);
      }
      if (!finite || std::abs(sum) > kSumTolerance) {
        report.issues.push_back({"sum", {int(b), problem.support[b][s]}, sum,
                                 "weighted potentials do not sum to zero"});
      }
    }
  }
  return report;
}

double eval_dual(const DualCertificate& cert, const BarycenterProblem& problem) {
  require_shape(cert, problem);
  const auto sigma = problem.sigma();
  double total = 0.0;
  for (std::size_t k = 0; k < problem.K(); ++k) {
    for (std::size_t b = 0; b < sigma.size(); ++b) {
      if (sigma[b] <= 0.0) continue;
      const auto h = transform_on_atoms(cert.xi[k][b], problem, k, b);
      const auto weights = problem.inputs[k].fiber(b)->weights();
      double integral = 0.0;
      for (std::size_t x = 0; x < h.size(); ++x) integral += weights[x] * h[x];
      total += sigma[b] * cert.zeta[k][b] * integral;
    }
  }
  return -total;
}

DualCertificate tighten(const DualCertificate& cert, const BarycenterProblem& problem) {
  require_shape(cert, problem);
  DualCertificate out = cert;
  for (std::size_t b = 0; b < problem.bundle.base_count(); ++b) {
    if (!problem.active(b)) continue;
    for (std::size_t k = 0; k + 1 < problem.K(); ++k) {
      const auto* m = problem.inputs[k].fiber(b);
      const auto h = transform_on_atoms(cert.xi[k][b], problem, k, b);
      out.xi[k][b] = c_transform(h, m->points(), problem.support[b], problem.lambdas[k],
                                 problem.config.p, problem.bundle.cost(b));
    }
    close_sum(out, problem, b);
  }
  return out;
}

DualCertificate recenter(const DualCertificate& cert, const BarycenterProblem& problem) {
  require_shape(cert, problem);
  DualCertificate out = cert;
  const std::size_t K = problem.K();
  for (std::size_t b = 0; b < problem.bundle.base_count(); ++b) {
    if (!problem.active(b)) continue;
    const std::size_t slot = problem.reference_slot(b);
    double moved = 0.0;
    for (std::size_t k = 0; k + 1 < K; ++k) {
      const double c = out.xi[k][b][slot];
      for (double& v : out.xi[k][b]) v -= c;
      moved += out.zeta[k][b] * c;
    }
    for (double& v : out.xi[K - 1][b]) v += moved / out.zeta[K - 1][b];
  }
  return out;
}

DualCertificate extract_certificate(const BarycenterProblem& problem,
                                    const BarycenterResult& result) {
  if (result.minimizer.base_count() == 0) {
    throw Error(ErrorCode::NotSolved, "result carries no minimizer");
  }
  require_same_base(problem.inputs.front(), result.minimizer);
  const std::size_t K = problem.K(), bases = problem.bundle.base_count();

  std::vector<std::vector<double>> zeta = result.zeta;
  std::vector<std::vector<std::vector<double>>> eta = result.fiber_potentials;
  if (eta.size() != bases || zeta.size() != K) {
    zeta = aligned_zeta(problem, fiber_distances(problem, result.minimizer));
    eta = detail::weighted_fiber_lp(problem, zeta).fiber_potentials;
  }

  DualCertificate cert;
  cert.zeta = zeta;
  cert.xi.assign(K, std::vector<std::vector<double>>(bases));
  for (std::size_t b = 0; b < bases; ++b) {
    if (!problem.active(b)) continue;
    for (std::size_t k = 0; k < K; ++k) {
      cert.xi[k][b] = eta[b][k];
      for (double& v : cert.xi[k][b]) v /= zeta[k][b];
    }
  }
  return recenter(tighten(cert, problem), problem);
}

GapReport duality_gap(const BarycenterProblem& problem, const BarycenterResult& result,
                      const DualCertificate& cert, double tolerance) {
  GapReport report;
  report.primal = objective(problem, result.minimizer);
  if (validate_certificate(cert, problem).ok()) {
    report.dual = eval_dual(cert, problem);
  } else {
    report.dual = -std::numeric_limits<double>::infinity();
  }
  report.gap = report.primal - report.dual;
  report.certified = std::isfinite(report.dual) && report.gap <= tolerance;
  return report;
}

}  // namespace fiberot
