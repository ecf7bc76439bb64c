#include "fiberot/disint_metric.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "fiberot/error.hpp"
#include "fiberot/ot.hpp"
#include "fiberot/parallel.hpp"

namespace fiberot {

DisintConfig::DisintConfig(double p_, double q_) : p(p_), q(q_) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw Error(ErrorCode::InvalidConfig, "p must be finite and >= 1");
  }
  if (!(q >= p)) {
    throw Error(ErrorCode::InvalidConfig, "q must satisfy p <= q <= inf");
  }
}

double DisintConfig::r_conjugate() const {
  const double rr = r();
  if (rr == kInfinity) return 1.0;
  if (rr == 1.0) return kInfinity;
  return rr / (rr - 1.0);
}

double parse_exponent(const std::string& text) {
  std::string lower;
  for (char ch : text) lower.push_back(static_cast<char>(std::tolower(ch)));
  if (lower == "inf" || lower == "infinity") return DisintConfig::kInfinity;
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, "not an exponent: '" + text + "'");
  }
}

std::vector<FiberDistance> fiber_distance_profile(const Bundle& bundle,
                                                  const FiberedMeasure& m,
                                                  const FiberedMeasure& n,
                                                  double p) {
  require_same_base(m, n);
  require_on_bundle(bundle, m);
  require_on_bundle(bundle, n);
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < m.base_count(); ++i) {
    if (m.active(i)) active.push_back(i);
  }
  std::vector<FiberDistance> out(active.size());
  parallel_for(active.size(), [&](std::size_t a) {
    const std::size_t i = active[a];
    out[a].base = m.base_ids()[i];
    out[a].distance = mk_distance(*m.fiber(i), *n.fiber(i), bundle.cost(i), p);
  });
  return out;
}

double lq_norm(const std::vector<double>& values, const std::vector<double>& sigma,
               double q) {
  if (values.size() != sigma.size()) {
    throw Error(ErrorCode::ShapeMismatch, "values and weights differ in length");
  }
  if (q == DisintConfig::kInfinity) {
    double best = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (sigma[i] > 0.0) best = std::max(best, values[i]);
    }
    return best;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (sigma[i] > 0.0) s += sigma[i] * std::pow(values[i], q);
  }
  return std::pow(s, 1.0 / q);
}

double disintegrated_distance(const Bundle& bundle, const FiberedMeasure& m,
                              const FiberedMeasure& n, const DisintConfig& config) {
  const auto profile = fiber_distance_profile(bundle, m, n, config.p);
  std::vector<double> values, weights;
  for (const auto& fd : profile) {
    values.push_back(fd.distance);
    weights.push_back(m.sigma_at(fd.base));
  }
  return lq_norm(values, weights, config.q);
}

double reference_distance(const Bundle& bundle, const FiberedMeasure& m,
                          const DisintConfig& config, const ReferencePoint& y0) {
  const auto ref = reference_delta(bundle, m.sigma(), y0);
  return disintegrated_distance(bundle, ref, m, config);
}

FiberedMeasure relabel(const Bundle& bundle, const FiberedMeasure& m) {
  std::vector<std::optional<DiscreteMeasure>> fibers(m.base_count());
  for (std::size_t i = 0; i < m.base_count(); ++i) {
    const auto* f = m.fiber(i);
    if (!f) continue;
    std::vector<Atom> atoms;
    for (std::size_t a = 0; a < f->size(); ++a) {
      atoms.push_back({bundle.relabel(i, f->points()[a]), f->weights()[a]});
    }
    fibers[i] = normalize_measure(atoms);
  }
  return FiberedMeasure(m.base_ids(), {m.sigma().begin(), m.sigma().end()},
                        std::move(fibers));
}

}  // namespace fiberot
