#include "fiberot/ot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fiberot/error.hpp"

namespace fiberot {

double OTResult::distance() const {
  const double v = std::max(value_p, 0.0);
  return p == 1.0 ? v : std::pow(v, 1.0 / p);
}

// ---------------------------------------------------------------------------
// Network simplex on the transportation tableau.
//
// Nodes 0..m-1 are rows (sources), m..m+n-1 are columns (sinks). The basis is
// a spanning tree of m+n-1 cells, started from the north-west corner rule.
// Dantzig pricing, switching to Bland's rule after a run of degenerate
// pivots.

TransportSimplex::Solution TransportSimplex::solve(std::span<const double> supply,
                                                   std::span<const double> demand,
                                                   std::span<const double> cost) {
  m_ = static_cast<int>(supply.size());
  n_ = static_cast<int>(demand.size());
  cost_ = cost;
  const int cells = m_ * n_;
  flow_.assign(cells, 0.0);
  basic_.assign(cells, 0);
  basis_.clear();

  std::vector<double> a(supply.begin(), supply.end());
  std::vector<double> b(demand.begin(), demand.end());
  int i = 0, j = 0;
  while (true) {
    const double x = std::min(a[i], b[j]);
    const int cell = i * n_ + j;
    flow_[cell] = x;
    basic_[cell] = 1;
    basis_.push_back(cell);
    a[i] -= x;
    b[j] -= x;
    if (i == m_ - 1 && j == n_ - 1) break;
    if (i == m_ - 1) {
      ++j;
    } else if (j == n_ - 1) {
      ++i;
    } else if (a[i] <= b[j]) {
      ++i;
    } else {
      ++j;
    }
  }

  double cmax = 0.0;
  for (double c : cost) cmax = std::max(cmax, std::abs(c));
  const double eps = 1e-12 * std::max(1.0, cmax);

  Solution sol;
  bool bland = false;
  int degenerate_run = 0;
  const long max_pivots = 50L * (m_ + n_) * (m_ + n_) + 1000L;
  while (true) {
    compute_potentials();

    int entering = -1;
    double best = -eps;
    for (int c = 0; c < cells; ++c) {
      if (basic_[c]) continue;
      const double rc = cost_[c] - u_[c / n_] - v_[c % n_];
      if (rc < best) {
        best = rc;
        entering = c;
        if (bland) break;
      }
    }
    if (entering < 0) break;
    if (sol.pivots >= max_pivots) {
      throw Error(ErrorCode::NumericalFailure, "transport simplex pivot limit reached");
    }

    const int ei = entering / n_, ej = entering % n_;
    tree_path(ei, ej);
    // path_ holds cells from row ei to column ej; odd positions (0, 2, ...)
    // lose mass when the entering cell gains.
    double theta = std::numeric_limits<double>::infinity();
    int leave_pos = -1;
    for (std::size_t k = 0; k < path_.size(); k += 2) {
      const double f = flow_[path_[k]];
      if (f < theta || (bland && f == theta && path_[k] < path_[leave_pos])) {
        theta = f;
        leave_pos = static_cast<int>(k);
      }
    }
    theta = std::max(theta, 0.0);
    for (std::size_t k = 0; k < path_.size(); ++k) {
      double& f = flow_[path_[k]];
      f += (k % 2 == 0) ? -theta : theta;
      if (f < 0.0) f = 0.0;
    }
    const int leaving = path_[leave_pos];
    flow_[entering] = theta;
    flow_[leaving] = 0.0;
    basic_[leaving] = 0;
    basic_[entering] = 1;
    *std::find(basis_.begin(), basis_.end(), leaving) = entering;
    ++sol.pivots;

    if (theta == 0.0) {
      if (++degenerate_run > m_ + n_) bland = true;
    } else {
      degenerate_run = 0;
    }
  }

  sol.value = 0.0;
  for (int c : basis_) sol.value += flow_[c] * cost_[c];
  sol.flow = flow_;
  sol.u = u_;
  sol.v = v_;
  return sol;
}

void TransportSimplex::compute_potentials() {
  const int nodes = m_ + n_;
  adjacency_.assign(nodes, {});
  for (int c : basis_) {
    adjacency_[c / n_].push_back(c);
    adjacency_[m_ + c % n_].push_back(c);
  }
  u_.assign(m_, 0.0);
  v_.assign(n_, 0.0);
  visited_.assign(nodes, 0);
  stack_.assign(1, 0);
  visited_[0] = 1;
  while (!stack_.empty()) {
    const int node = stack_.back();
    stack_.pop_back();
    for (int c : adjacency_[node]) {
      const int r = c / n_, col = m_ + c % n_;
      const int other = node == r ? col : r;
      if (visited_[other]) continue;
      visited_[other] = 1;
      if (other == col) {
        v_[c % n_] = cost_[c] - u_[r];
      } else {
        u_[r] = cost_[c] - v_[c % n_];
      }
      stack_.push_back(other);
    }
  }
}

bool TransportSimplex::tree_path(int from_row, int to_col) {
  const int nodes = m_ + n_;
  const int target = m_ + to_col;
  parent_cell_.assign(nodes, -1);
  visited_.assign(nodes, 0);
  stack_.assign(1, from_row);
  visited_[from_row] = 1;
  while (!stack_.empty()) {
    const int node = stack_.back();
    stack_.pop_back();
    if (node == target) break;
    for (int c : adjacency_[node]) {
      const int r = c / n_, col = m_ + c % n_;
      const int other = node == r ? col : r;
      if (visited_[other]) continue;
      visited_[other] = 1;
      parent_cell_[other] = c;
      stack_.push_back(other);
    }
  }
  if (!visited_[target]) {
    throw Error(ErrorCode::NumericalFailure, "transport basis is not a spanning tree");
  }
  // Walk back from the column to the source row, then reverse.
  path_.clear();
  int node = target;
  while (node != from_row) {
    const int c = parent_cell_[node];
    path_.push_back(c);
    const int r = c / n_, col = m_ + c % n_;
    node = node == r ? col : r;
  }
  std::reverse(path_.begin(), path_.end());
  return true;
}

// ---------------------------------------------------------------------------

namespace {

void check_support(const DiscreteMeasure& m, const GroundCost& cost, const char* name) {
  if (m.empty()) {
    throw Error(ErrorCode::DegenerateInput, std::string(name) + " is empty");
  }
  if (m.max_point() >= static_cast<int>(cost.size())) {
    throw Error(ErrorCode::SupportOutOfRange,
                std::string(name) + " has point " + std::to_string(m.max_point()) +
                    " but the cost covers " + std::to_string(cost.size()));
  }
}

void check_exponent(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw Error(ErrorCode::InvalidConfig, "transport exponent p must be >= 1");
  }
}

}  // namespace

OTResult solve_ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                  const GroundCost& cost, double p) {
  check_exponent(p);
  check_support(mu, cost, "mu");
  check_support(nu, cost, "nu");
  const std::size_t m = mu.size(), n = nu.size();
  std::vector<double> c(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      c[i * n + j] = cost.powered(mu.points()[i], nu.points()[j], p);

  TransportSimplex simplex;
  auto sol = simplex.solve(mu.weights(), nu.weights(), c);

  OTResult r;
  r.p = p;
  r.value_p = sol.value;
  r.coupling.source_points.assign(mu.points().begin(), mu.points().end());
  r.coupling.target_points.assign(nu.points().begin(), nu.points().end());
  r.coupling.mass = std::move(sol.flow);
  r.phi.resize(m);
  r.psi.resize(n);
  for (std::size_t i = 0; i < m; ++i) r.phi[i] = -sol.u[i];
  for (std::size_t j = 0; j < n; ++j) r.psi[j] = -sol.v[j];
  return r;
}

double mk_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                   const GroundCost& cost, double p) {
  // Canonical argument order makes the result exactly symmetric.
  const auto before = [](const DiscreteMeasure& a, const DiscreteMeasure& b) {
    const auto pa = a.points(), pb = b.points();
    const auto wa = a.weights(), wb = b.weights();
    if (!std::equal(pa.begin(), pa.end(), pb.begin(), pb.end())) {
      return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
    }
    return std::lexicographical_compare(wa.begin(), wa.end(), wb.begin(), wb.end());
  };
  const bool swap = before(nu, mu);
  return (swap ? solve_ot(nu, mu, cost, p) : solve_ot(mu, nu, cost, p)).distance();
}

PotentialFn c_transform(const PotentialFn& xi, double lambda, double p,
                        const GroundCost& cost) {
  if (xi.values.size() != cost.size()) {
    throw Error(ErrorCode::ShapeMismatch, "potential must cover every fiber point");
  }
  std::vector<int> all(cost.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return {c_transform(xi.values, all, all, lambda, p, cost)};
}

std::vector<double> c_transform(std::span<const double> xi,
                                std::span<const int> targets,
                                std::span<const int> sources, double lambda,
                                double p, const GroundCost& cost) {
  if (xi.size() != targets.size()) {
    throw Error(ErrorCode::ShapeMismatch, "potential and its domain differ in size");
  }
  std::vector<double> out(sources.size());
  for (std::size_t a = 0; a < sources.size(); ++a) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < targets.size(); ++b) {
      const double val = -lambda * cost.powered(sources[a], targets[b], p) - xi[b];
      best = std::max(best, val);
    }
    out[a] = best;
  }
  return out;
}

std::vector<double> target_potential_on(const OTResult& result,
                                        std::span<const int> support,
                                        const GroundCost& cost) {
  const auto& src = result.coupling.source_points;
  std::vector<double> psi(support.size());
  for (std::size_t s = 0; s < support.size(); ++s) {
    // -psi(s) = min_x (c(x,s) + phi(x))
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < src.size(); ++x) {
      best = std::min(best, cost.powered(src[x], support[s], result.p) + result.phi[x]);
    }
    psi[s] = -best;
  }
  // Keep the solver's potentials where the target carries mass.
  const auto& tgt = result.coupling.target_points;
  for (std::size_t j = 0; j < tgt.size(); ++j) {
    auto it = std::find(support.begin(), support.end(), tgt[j]);
    if (it != support.end()) psi[it - support.begin()] = result.psi[j];
  }
  return psi;
}

std::optional<std::vector<int>> coupling_is_deterministic(const Coupling& c,
                                                          double tol) {
  std::vector<int> map(c.rows(), -1);
  for (std::size_t i = 0; i < c.rows(); ++i) {
    double row_mass = 0.0;
    for (std::size_t j = 0; j < c.cols(); ++j) row_mass += c(i, j);
    const double threshold = tol * row_mass;
    for (std::size_t j = 0; j < c.cols(); ++j) {
      if (c(i, j) > threshold) {
        if (map[i] >= 0) return std::nullopt;
        map[i] = static_cast<int>(j);
      }
    }
  }
  return map;
}

}  // namespace fiberot
