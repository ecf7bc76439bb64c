#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fiberot/error.hpp"
#include "fiberot/ot.hpp"

namespace fiberot {

namespace {

constexpr std::size_t kTreeBound = 4;
constexpr std::size_t kPermutationBound = 8;

struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

// Flows on a spanning tree are forced: peel leaves until the tree is empty.
// Returns +inf when the basic solution is infeasible.
double tree_cost(const std::vector<int>& cells, int m, int n,
                 std::span<const double> a, std::span<const double> b,
                 const std::vector<double>& c) {
  std::vector<double> residual(m + n);
  for (int i = 0; i < m; ++i) residual[i] = a[i];
  for (int j = 0; j < n; ++j) residual[m + j] = b[j];
  std::vector<int> degree(m + n, 0);
  for (int cell : cells) {
    ++degree[cell / n];
    ++degree[m + cell % n];
  }
  std::vector<char> used(cells.size(), 0);
  double total = 0.0;
  for (std::size_t step = 0; step < cells.size(); ++step) {
    int pick = -1, leaf = -1;
    for (std::size_t e = 0; e < cells.size() && pick < 0; ++e) {
      if (used[e]) continue;
      const int r = cells[e] / n, col = m + cells[e] % n;
      if (degree[r] == 1) {
        pick = static_cast<int>(e);
        leaf = r;
      } else if (degree[col] == 1) {
        pick = static_cast<int>(e);
        leaf = col;
      }
    }
    const int cell = cells[pick];
    const int r = cell / n, col = m + cell % n;
    const int other = leaf == r ? col : r;
    const double f = residual[leaf];
    if (f < -1e-12) return std::numeric_limits<double>::infinity();
    residual[leaf] = 0.0;
    residual[other] -= f;
    --degree[r];
    --degree[col];
    used[pick] = 1;
    total += f * c[cell];
  }
  for (double r : residual) {
    if (std::abs(r) > 1e-9) return std::numeric_limits<double>::infinity();
  }
  return total;
}

}  // namespace

double brute_force_ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                      const GroundCost& cost, double p) {
  if (mu.empty() || nu.empty()) {
    throw Error(ErrorCode::DegenerateInput, "empty measure");
  }
  if (std::max(mu.max_point(), nu.max_point()) >= static_cast<int>(cost.size())) {
    throw Error(ErrorCode::SupportOutOfRange, "support outside cost");
  }
  const int m = static_cast<int>(mu.size()), n = static_cast<int>(nu.size());
  std::vector<double> c(m * n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      c[i * n + j] = cost.powered(mu.points()[i], nu.points()[j], p);

  if (mu.size() <= kTreeBound && nu.size() <= kTreeBound) {
    // Every vertex of the transportation polytope is the basic solution of
    // some spanning tree of K_{m,n}.
    const int cells = m * n, need = m + n - 1;
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> chosen;
    auto recurse = [&](auto&& self, int start) -> void {
      if (static_cast<int>(chosen.size()) == need) {
        DisjointSet ds(m + n);
        for (int cell : chosen) {
          if (!ds.unite(cell / n, m + cell % n)) return;
        }
        best = std::min(best, tree_cost(chosen, m, n, mu.weights(), nu.weights(), c));
        return;
      }
      for (int cell = start; cell <= cells - (need - static_cast<int>(chosen.size()));
           ++cell) {
        chosen.push_back(cell);
        self(self, cell + 1);
        chosen.pop_back();
      }
    };
    recurse(recurse, 0);
    return best;
  }

  const auto uniform = [](const DiscreteMeasure& x) {
    const double w = 1.0 / static_cast<double>(x.size());
    return std::all_of(x.weights().begin(), x.weights().end(),
                       [w](double v) { return std::abs(v - w) <= 1e-12; });
  };
  if (m == n && mu.size() <= kPermutationBound && uniform(mu) && uniform(nu)) {
    // Birkhoff: the vertices are permutation matrices scaled by 1/n.
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
      double total = 0.0;
      for (int i = 0; i < n; ++i) total += c[i * n + perm[i]];
      best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best / n;
  }
  throw Error(ErrorCode::TooLarge,
              "brute force limited to 4x4 supports or uniform 8x8 supports");
}

}  // namespace fiberot
