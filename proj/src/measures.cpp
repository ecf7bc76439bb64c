#include "fiberot/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fiberot/error.hpp"

namespace fiberot {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::AllZeroMass: return "AllZeroMass";
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::BaseMismatch: return "BaseMismatch";
    case ErrorCode::FiberMismatch: return "FiberMismatch";
    case ErrorCode::SupportOutOfRange: return "SupportOutOfRange";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::InvalidCost: return "InvalidCost";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidProblem: return "InvalidProblem";
    case ErrorCode::SupportViolation: return "SupportViolation";
    case ErrorCode::EmptySupport: return "EmptySupport";
    case ErrorCode::LPInfeasible: return "LPInfeasible";
    case ErrorCode::NotSolved: return "NotSolved";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// DiscreteMeasure

DiscreteMeasure DiscreteMeasure::dirac(int point) {
  const Atom atom{point, 1.0};
  return normalize_measure({&atom, 1});
}

double DiscreteMeasure::weight_of(int point) const {
  auto it = std::lower_bound(points_.begin(), points_.end(), point);
  if (it == points_.end() || *it != point) return 0.0;
  return weights_[it - points_.begin()];
}

DiscreteMeasure normalize_measure(std::span<const Atom> raw) {
  double total = 0.0;
  for (const auto& a : raw) {
    if (!(a.weight >= 0.0) || !std::isfinite(a.weight)) {
      throw Error(ErrorCode::NegativeWeight,
                  "weight " + std::to_string(a.weight) + " at point " +
                      std::to_string(a.point));
    }
    if (a.point < 0) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "negative point id " + std::to_string(a.point));
    }
    total += a.weight;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::AllZeroMass, "total mass is zero");

  std::vector<Atom> atoms(raw.begin(), raw.end());
  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const Atom& a, const Atom& b) { return a.point < b.point; });

  DiscreteMeasure out;
  for (const auto& a : atoms) {
    if (!out.points_.empty() && out.points_.back() == a.point) {
      out.weights_.back() += a.weight;
    } else {
      out.points_.push_back(a.point);
      out.weights_.push_back(a.weight);
    }
  }
  std::size_t keep = 0;
  for (std::size_t i = 0; i < out.points_.size(); ++i) {
    if (out.weights_[i] > 0.0) {
      out.points_[keep] = out.points_[i];
      out.weights_[keep] = out.weights_[i] / total;
      ++keep;
    }
  }
  out.points_.resize(keep);
  out.weights_.resize(keep);
  return out;
}

DiscreteMeasure measure_from_weights(std::span<const int> support,
                                     std::span<const double> weights,
                                     double floor) {
  if (support.size() != weights.size()) {
    throw Error(ErrorCode::ShapeMismatch, "support and weights differ in size");
  }
  std::vector<Atom> atoms;
  atoms.reserve(support.size());
  for (std::size_t i = 0; i < support.size(); ++i) {
    double w = weights[i];
    if (w <= floor) w = 0.0;
    atoms.push_back({support[i], w});
  }
  return normalize_measure(atoms);
}

// ---------------------------------------------------------------------------
// Ground costs

bool ValidationReport::has(std::string_view kind) const {
  return first(kind) != nullptr;
}

const ValidationIssue* ValidationReport::first(std::string_view kind) const {
  for (const auto& issue : issues) {
    if (issue.kind == kind) return &issue;
  }
  return nullptr;
}

ValidationReport validate_ground_cost(const std::vector<std::vector<double>>& d,
                                      double triangle_tol) {
  ValidationReport report;
  const int n = static_cast<int>(d.size());
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(d[i].size()) != n) {
      report.issues.push_back({"shape", {i}, 0.0,
                               "row " + std::to_string(i) + " has " +
                                   std::to_string(d[i].size()) + " entries"});
    }
  }
  if (!report.ok()) return report;

  bool finite = true;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double v = d[i][j];
      if (!std::isfinite(v)) {
        finite = false;
        report.issues.push_back({"finite", {i, j}, v, "non-finite entry"});
      } else if (v < 0.0) {
        report.issues.push_back({"negative", {i, j}, v, "negative distance"});
      }
    }
    if (std::isfinite(d[i][i]) && d[i][i] != 0.0) {
      report.issues.push_back({"diagonal", {i}, d[i][i], "nonzero diagonal"});
    }
  }
  if (!finite) return report;

  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (d[i][j] != d[j][i]) {
        report.issues.push_back({"symmetry", {i, j}, d[i][j] - d[j][i],
                                 "d[i][j] != d[j][i]"});
      }
    }
  }

  double worst = triangle_tol;
  std::vector<int> where;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const double slack = d[i][k] - (d[i][j] + d[j][k]);
        if (slack > worst) {
          worst = slack;
          where = {i, j, k};
        }
      }
    }
  }
  if (!where.empty()) {
    std::ostringstream msg;
    msg << "d[" << where[0] << "][" << where[2] << "] exceeds path through "
        << where[1] << " by " << worst;
    report.issues.push_back({"triangle", where, worst, msg.str()});
  }
  return report;
}

GroundCost::GroundCost(const std::vector<std::vector<double>>& d,
                       bool require_metric)
    : n_(d.size()) {
  if (n_ == 0) throw Error(ErrorCode::InvalidCost, "empty cost matrix");
  d_.reserve(n_ * n_);
  for (std::size_t i = 0; i < n_; ++i) {
    if (d[i].size() != n_) {
      throw Error(ErrorCode::InvalidCost,
                  "cost matrix is not square at row " + std::to_string(i));
    }
    for (double v : d[i]) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::InvalidCost,
                    "non-finite cost at row " + std::to_string(i));
      }
      d_.push_back(v);
    }
  }
  for (std::size_t i = 0; i < n_; ++i) {
    if (d[i][i] != 0.0) {
      throw Error(ErrorCode::InvalidCost, "nonzero diagonal at " + std::to_string(i));
    }
    for (std::size_t j = i + 1; j < n_; ++j) {
      if (d[i][j] < 0.0 || d[i][j] != d[j][i]) {
        throw Error(ErrorCode::InvalidCost, "negative or asymmetric cost at (" +
                                                std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
  if (require_metric) {
    const auto report = validate_ground_cost(d);
    if (!report.ok()) {
      throw Error(ErrorCode::InvalidCost, report.issues.front().kind + " " +
                                              report.issues.front().message);
    }
  }
}

GroundCost GroundCost::line(std::span<const double> xs) {
  std::vector<std::vector<double>> d(xs.size(), std::vector<double>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < xs.size(); ++j) d[i][j] = std::abs(xs[i] - xs[j]);
  return GroundCost(d);
}

GroundCost GroundCost::euclidean(const std::vector<std::vector<double>>& coords) {
  const std::size_t n = coords.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (coords[i].size() != coords[j].size()) {
        throw Error(ErrorCode::InvalidCost, "points of differing dimension");
      }
      double s = 0.0;
      for (std::size_t c = 0; c < coords[i].size(); ++c) {
        const double diff = coords[i][c] - coords[j][c];
        s += diff * diff;
      }
      d[i][j] = d[j][i] = std::sqrt(s);
    }
  }
  return GroundCost(d);
}

std::vector<std::vector<double>> GroundCost::matrix() const {
  std::vector<std::vector<double>> out(n_, std::vector<double>(n_));
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) out[i][j] = d_[i * n_ + j];
  return out;
}

// ---------------------------------------------------------------------------
// Bundle

namespace {

const std::vector<std::vector<double>>& empty_coords() {
  static const std::vector<std::vector<double>> empty;
  return empty;
}

void check_unique_ids(const std::vector<std::string>& ids) {
  if (ids.empty()) throw Error(ErrorCode::InvalidProblem, "empty base");
  std::vector<std::string> sorted = ids;
  std::sort(sorted.begin(), sorted.end());
  auto dup = std::adjacent_find(sorted.begin(), sorted.end());
  if (dup != sorted.end()) {
    throw Error(ErrorCode::InvalidProblem, "duplicate base id '" + *dup + "'");
  }
}

}  // namespace

Bundle Bundle::shared(std::vector<std::string> base_ids, GroundCost cost,
                      const std::map<std::string, std::vector<int>>& relabelings,
                      std::vector<std::vector<double>> coords) {
  check_unique_ids(base_ids);
  Bundle b;
  b.shared_ = true;
  auto shared_cost = std::make_shared<const GroundCost>(std::move(cost));
  auto shared_coords =
      std::make_shared<const std::vector<std::vector<double>>>(std::move(coords));
  b.costs_.assign(base_ids.size(), shared_cost);
  b.coords_.assign(base_ids.size(), shared_coords);
  b.base_ids_ = std::move(base_ids);

  if (!relabelings.empty()) {
    const int n = static_cast<int>(shared_cost->size());
    std::vector<int> identity(n);
    std::iota(identity.begin(), identity.end(), 0);
    b.relabelings_.assign(b.base_ids_.size(), identity);
    for (const auto& [id, perm] : relabelings) {
      auto idx = b.base_index(id);
      if (!idx) {
        throw Error(ErrorCode::BaseMismatch, "relabeling for unknown base '" + id + "'");
      }
      if (static_cast<int>(perm.size()) != n) {
        throw Error(ErrorCode::InvalidProblem,
                    "relabeling at '" + id + "' has wrong length");
      }
      std::vector<char> seen(n, 0);
      for (int v : perm) {
        if (v < 0 || v >= n || seen[v]) {
          throw Error(ErrorCode::InvalidProblem,
                      "relabeling at '" + id + "' is not a permutation");
        }
        seen[v] = 1;
      }
      const GroundCost& d = *shared_cost;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          if (d(perm[i], perm[j]) != d(i, j)) {
            throw Error(ErrorCode::InvalidProblem,
                        "relabeling at '" + id + "' does not preserve cost at (" +
                            std::to_string(i) + "," + std::to_string(j) + ")");
          }
        }
      }
      b.relabelings_[*idx] = perm;
    }
  }
  return b;
}

Bundle Bundle::per_fiber(std::vector<std::string> base_ids,
                         std::vector<GroundCost> costs,
                         std::vector<std::vector<std::vector<double>>> coords) {
  check_unique_ids(base_ids);
  if (costs.size() != base_ids.size()) {
    throw Error(ErrorCode::ShapeMismatch, "one cost per base point required");
  }
  if (!coords.empty() && coords.size() != base_ids.size()) {
    throw Error(ErrorCode::ShapeMismatch, "one coordinate list per base point required");
  }
  Bundle b;
  b.base_ids_ = std::move(base_ids);
  for (std::size_t i = 0; i < costs.size(); ++i) {
    b.costs_.push_back(std::make_shared<const GroundCost>(std::move(costs[i])));
    b.coords_.push_back(std::make_shared<const std::vector<std::vector<double>>>(
        coords.empty() ? std::vector<std::vector<double>>{} : std::move(coords[i])));
  }
  return b;
}

Bundle Bundle::single(GroundCost cost, std::vector<std::vector<double>> coords) {
  return shared({"*"}, std::move(cost), {}, std::move(coords));
}

std::optional<std::size_t> Bundle::base_index(std::string_view id) const {
  for (std::size_t i = 0; i < base_ids_.size(); ++i) {
    if (base_ids_[i] == id) return i;
  }
  return std::nullopt;
}

const std::vector<std::vector<double>>& Bundle::coords(std::size_t base) const {
  return coords_[base] ? *coords_[base] : empty_coords();
}

int Bundle::relabel(std::size_t base, int point) const {
  if (relabelings_.empty()) return point;
  return relabelings_[base][point];
}

std::span<const int> Bundle::relabeling(std::size_t base) const {
  if (relabelings_.empty()) return {};
  return relabelings_[base];
}

// ---------------------------------------------------------------------------
// FiberedMeasure

FiberedMeasure::FiberedMeasure(std::vector<std::string> base_ids,
                               std::vector<double> sigma,
                               std::vector<std::optional<DiscreteMeasure>> fibers)
    : base_ids_(std::move(base_ids)),
      sigma_(std::move(sigma)),
      fibers_(std::move(fibers)) {
  if (base_ids_.size() != sigma_.size() || base_ids_.size() != fibers_.size()) {
    throw Error(ErrorCode::ShapeMismatch, "base ids, sigma and fibers differ in length");
  }
  check_unique_ids(base_ids_);
  double total = 0.0;
  for (std::size_t i = 0; i < sigma_.size(); ++i) {
    if (!(sigma_[i] >= 0.0) || !std::isfinite(sigma_[i])) {
      throw Error(ErrorCode::NegativeWeight, "sigma at '" + base_ids_[i] + "'");
    }
    total += sigma_[i];
  }
  if (!(total > 0.0)) throw Error(ErrorCode::AllZeroMass, "sigma has no mass");
  for (std::size_t i = 0; i < sigma_.size(); ++i) {
    sigma_[i] /= total;
    if (sigma_[i] == 0.0) {
      fibers_[i].reset();
    } else if (!fibers_[i] || fibers_[i]->empty()) {
      throw Error(ErrorCode::FiberMismatch,
                  "no fiber measure at base point '" + base_ids_[i] + "'");
    }
  }
}

FiberedMeasure FiberedMeasure::single(DiscreteMeasure mu, std::string id) {
  std::vector<std::optional<DiscreteMeasure>> fibers;
  fibers.emplace_back(std::move(mu));
  return FiberedMeasure({std::move(id)}, {1.0}, std::move(fibers));
}

double FiberedMeasure::sigma_at(std::string_view id) const {
  for (std::size_t i = 0; i < base_ids_.size(); ++i) {
    if (base_ids_[i] == id) return sigma_[i];
  }
  return 0.0;
}

const DiscreteMeasure* FiberedMeasure::fiber(std::size_t base) const {
  return fibers_[base] ? &*fibers_[base] : nullptr;
}

const DiscreteMeasure* FiberedMeasure::fiber_at(std::string_view id) const {
  for (std::size_t i = 0; i < base_ids_.size(); ++i) {
    if (base_ids_[i] == id) return fiber(i);
  }
  return nullptr;
}

FiberedMeasure disintegrate(std::span<const FiberedAtom> atoms,
                            const std::vector<std::string>& known_bases) {
  std::vector<std::string> ids = known_bases;
  std::vector<std::vector<Atom>> per_base(ids.size());
  std::vector<double> mass(ids.size(), 0.0);
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!(a.weight >= 0.0) || !std::isfinite(a.weight)) {
      throw Error(ErrorCode::NegativeWeight, "weight " + std::to_string(a.weight) +
                                                 " at (" + a.base + ", " +
                                                 std::to_string(a.point) + ")");
    }
    auto it = std::find(ids.begin(), ids.end(), a.base);
    std::size_t idx = it - ids.begin();
    if (it == ids.end()) {
      ids.push_back(a.base);
      per_base.emplace_back();
      mass.push_back(0.0);
    }
    per_base[idx].push_back({a.point, a.weight});
    mass[idx] += a.weight;
    total += a.weight;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::AllZeroMass, "no mass on E");

  std::vector<std::optional<DiscreteMeasure>> fibers(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (mass[i] > 0.0) fibers[i] = normalize_measure(per_base[i]);
  }
  return FiberedMeasure(std::move(ids), std::move(mass), std::move(fibers));
}

std::vector<FiberedAtom> reconstruct(const FiberedMeasure& m) {
  std::vector<FiberedAtom> out;
  for (std::size_t i = 0; i < m.base_count(); ++i) {
    const auto* f = m.fiber(i);
    if (!f) continue;
    for (std::size_t a = 0; a < f->size(); ++a) {
      out.push_back({m.base_ids()[i], f->points()[a], m.sigma()[i] * f->weights()[a]});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reference measures and moments

int ReferencePoint::at(const Bundle& bundle, std::size_t base) const {
  if (indices.size() == 1) {
    const int y0 = indices.front();
    if (y0 < 0 || y0 >= static_cast<int>(bundle.cost(base).size())) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "reference point " + std::to_string(y0) + " outside fiber");
    }
    return bundle.relabel(base, y0);
  }
  if (indices.size() != bundle.base_count()) {
    throw Error(ErrorCode::IndexOutOfRange,
                "reference point needs one index or one per base point");
  }
  const int y0 = indices[base];
  if (y0 < 0 || y0 >= static_cast<int>(bundle.cost(base).size())) {
    throw Error(ErrorCode::IndexOutOfRange,
                "reference point " + std::to_string(y0) + " outside fiber '" +
                    bundle.base_ids()[base] + "'");
  }
  return y0;
}

FiberedMeasure reference_delta(const Bundle& bundle, std::span<const double> sigma,
                               const ReferencePoint& y0) {
  if (sigma.size() != bundle.base_count()) {
    throw Error(ErrorCode::BaseMismatch, "sigma length differs from base size");
  }
  std::vector<std::optional<DiscreteMeasure>> fibers(bundle.base_count());
  for (std::size_t i = 0; i < bundle.base_count(); ++i) {
    fibers[i] = DiscreteMeasure::dirac(y0.at(bundle, i));
  }
  return FiberedMeasure(bundle.base_ids(), {sigma.begin(), sigma.end()},
                        std::move(fibers));
}

void require_same_base(const FiberedMeasure& a, const FiberedMeasure& b) {
  if (a.base_ids() != b.base_ids()) {
    throw Error(ErrorCode::BaseMismatch, "measures live over different base points");
  }
  for (std::size_t i = 0; i < a.base_count(); ++i) {
    if (std::abs(a.sigma()[i] - b.sigma()[i]) > kMassTolerance) {
      throw Error(ErrorCode::BaseMismatch,
                  "base weights differ at '" + a.base_ids()[i] + "'");
    }
  }
}

void require_on_bundle(const Bundle& bundle, const FiberedMeasure& m) {
  if (m.base_ids() != bundle.base_ids()) {
    throw Error(ErrorCode::BaseMismatch, "measure base differs from bundle base");
  }
  for (std::size_t i = 0; i < m.base_count(); ++i) {
    const auto* f = m.fiber(i);
    if (f && f->max_point() >= static_cast<int>(bundle.cost(i).size())) {
      throw Error(ErrorCode::SupportOutOfRange,
                  "point " + std::to_string(f->max_point()) + " outside fiber '" +
                      m.base_ids()[i] + "'");
    }
  }
}

double p_moment(const Bundle& bundle, const FiberedMeasure& m,
                const FiberedMeasure& ref, double p) {
  require_same_base(m, ref);
  require_on_bundle(bundle, m);
  require_on_bundle(bundle, ref);
  double total = 0.0;
  for (std::size_t i = 0; i < m.base_count(); ++i) {
    const auto* f = m.fiber(i);
    if (!f) continue;
    const auto* r = ref.fiber(i);
    if (!r || r->size() != 1) {
      throw Error(ErrorCode::FiberMismatch,
                  "reference fiber at '" + m.base_ids()[i] + "' is not a Dirac mass");
    }
    const int y0 = r->points()[0];
    double fiber_moment = 0.0;
    for (std::size_t a = 0; a < f->size(); ++a) {
      fiber_moment += f->weights()[a] * bundle.cost(i).powered(y0, f->points()[a], p);
    }
    total += m.sigma()[i] * fiber_moment;
  }
  return total;
}

}  // namespace fiberot
