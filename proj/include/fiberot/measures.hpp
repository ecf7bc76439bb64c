#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fiberot {

inline constexpr double kMassTolerance = 1e-12;

/// Raises a raw distance to the transport exponent. p == 1 skips pow.
inline double cost_power(double d, double p) {
  if (p == 1.0) return d;
  if (p == 2.0) return d * d;
  return std::pow(d, p);
}

struct Atom {
  int point = 0;
  double weight = 0.0;
};

/// Probability measure with finite support on the points of one fiber.
/// Atoms are sorted by point id, distinct, strictly positive and sum to one.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;

  static DiscreteMeasure dirac(int point);

  std::span<const int> points() const { return points_; }
  std::span<const double> weights() const { return weights_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  /// Mass at `point`, zero when the point is not an atom.
  double weight_of(int point) const;
  int max_point() const { return points_.empty() ? -1 : points_.back(); }

  bool operator==(const DiscreteMeasure&) const = default;

 private:
  friend DiscreteMeasure normalize_measure(std::span<const Atom> raw);
  std::vector<int> points_;
  std::vector<double> weights_;
};

/// Merges duplicate points, drops zero atoms and rescales to unit mass.
/// Throws NegativeWeight or AllZeroMass.
DiscreteMeasure normalize_measure(std::span<const Atom> raw);

/// Builds a measure from a weight vector aligned with `support`. Entries below
/// `floor` (including round-off negatives from a solver) are treated as zero.
DiscreteMeasure measure_from_weights(std::span<const int> support,
                                     std::span<const double> weights,
                                     double floor = 0.0);

struct ValidationIssue {
  std::string kind;
  std::vector<int> location;
  double amount = 0.0;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const { return issues.empty(); }
  bool has(std::string_view kind) const;
  const ValidationIssue* first(std::string_view kind) const;
};

/// Checks the metric axioms on a raw matrix. Never throws; the report lists
/// shape, finiteness, diagonal, negativity, symmetry issues and the worst
/// triangle violation (i, j, k) meaning d[i][k] > d[i][j] + d[j][k].
ValidationReport validate_ground_cost(
    const std::vector<std::vector<double>>& d, double triangle_tol = 1e-9);

/// Symmetric pairwise distance matrix on a finite point set, stored raw; the
/// transport exponent is applied at solve time.
class GroundCost {
 public:
  GroundCost() = default;
  /// Requires a square matrix with finite entries. With `require_metric` the
  /// full validation report must be clean (InvalidCost otherwise).
  explicit GroundCost(const std::vector<std::vector<double>>& d,
                      bool require_metric = false);

  static GroundCost line(std::span<const double> xs);
  static GroundCost euclidean(const std::vector<std::vector<double>>& coords);

  std::size_t size() const { return n_; }
  double operator()(int i, int j) const { return d_[i * n_ + j]; }
  double powered(int i, int j, double p) const {
    return cost_power((*this)(i, j), p);
  }
  std::vector<std::vector<double>> matrix() const;
  bool operator==(const GroundCost&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> d_;
};

/// Discrete trivial bundle: finitely many base points, each carrying a fiber
/// cost. With a shared fiber, per-base relabelings (exact isometries of the
/// shared cost) stand in for structure-group elements.
class Bundle {
 public:
  static Bundle shared(std::vector<std::string> base_ids, GroundCost cost,
                       const std::map<std::string, std::vector<int>>&
                           relabelings = {},
                       std::vector<std::vector<double>> coords = {});
  static Bundle per_fiber(std::vector<std::string> base_ids,
                          std::vector<GroundCost> costs,
                          std::vector<std::vector<std::vector<double>>>
                              coords = {});
  /// One base point "*" over a single fiber.
  static Bundle single(GroundCost cost,
                       std::vector<std::vector<double>> coords = {});

  std::size_t base_count() const { return base_ids_.size(); }
  const std::vector<std::string>& base_ids() const { return base_ids_; }
  std::optional<std::size_t> base_index(std::string_view id) const;
  bool shared_fiber() const { return shared_; }

  const GroundCost& cost(std::size_t base) const { return *costs_[base]; }
  /// Point coordinates when known (used by output and CSV ingestion only).
  const std::vector<std::vector<double>>& coords(std::size_t base) const;

  /// Image of `point` under the relabeling at `base`; identity when absent.
  int relabel(std::size_t base, int point) const;
  bool has_relabelings() const { return !relabelings_.empty(); }
  std::span<const int> relabeling(std::size_t base) const;

 private:
  std::vector<std::string> base_ids_;
  std::vector<std::shared_ptr<const GroundCost>> costs_;
  std::vector<std::shared_ptr<const std::vector<std::vector<double>>>> coords_;
  std::vector<std::vector<int>> relabelings_;  // empty or one per base
  bool shared_ = false;
};

/// m = m^• ⊗ σ over a finite base. σ-null base points carry no fiber.
class FiberedMeasure {
 public:
  FiberedMeasure() = default;
  /// Rescales sigma to unit mass (rejecting negatives) and drops fibers at
  /// σ-null points. Throws FiberMismatch if a σ-positive point has no fiber.
  FiberedMeasure(std::vector<std::string> base_ids, std::vector<double> sigma,
                 std::vector<std::optional<DiscreteMeasure>> fibers);

  /// Measure over a one-point base.
  static FiberedMeasure single(DiscreteMeasure mu, std::string id = "*");

  std::size_t base_count() const { return base_ids_.size(); }
  const std::vector<std::string>& base_ids() const { return base_ids_; }
  std::span<const double> sigma() const { return sigma_; }
  double sigma_at(std::string_view id) const;
  bool active(std::size_t base) const { return sigma_[base] > 0.0; }

  const DiscreteMeasure* fiber(std::size_t base) const;
  const DiscreteMeasure* fiber_at(std::string_view id) const;

  bool operator==(const FiberedMeasure&) const = default;

 private:
  std::vector<std::string> base_ids_;
  std::vector<double> sigma_;
  std::vector<std::optional<DiscreteMeasure>> fibers_;
};

struct FiberedAtom {
  std::string base;
  int point = 0;
  double weight = 0.0;
};

/// Splits atoms on E into the base marginal σ and conditional fiber measures.
/// Base points listed in `known_bases` but carrying no mass get σ = 0.
FiberedMeasure disintegrate(std::span<const FiberedAtom> atoms,
                            const std::vector<std::string>& known_bases = {});

/// Σ_ω σ(ω) m^ω as a merged atom list, ordered by base then point.
std::vector<FiberedAtom> reconstruct(const FiberedMeasure& m);

/// Either a single index into the shared fiber (pushed through relabelings)
/// or one index per base point.
struct ReferencePoint {
  std::vector<int> indices;

  static ReferencePoint shared(int index) { return {{index}}; }
  int at(const Bundle& bundle, std::size_t base) const;
};

/// Fibers are Dirac masses at the (relabeled) reference point.
FiberedMeasure reference_delta(const Bundle& bundle, std::span<const double> sigma,
                               const ReferencePoint& y0);

/// Σ_ω σ(ω) Σ_u m^ω(u) d(y0_ω, u)^p; `ref` must have Dirac fibers.
double p_moment(const Bundle& bundle, const FiberedMeasure& m,
                const FiberedMeasure& ref, double p);

/// Throws BaseMismatch unless both measures have the same base ids and σ.
void require_same_base(const FiberedMeasure& a, const FiberedMeasure& b);
/// Throws BaseMismatch / SupportOutOfRange when m does not live on the bundle.
void require_on_bundle(const Bundle& bundle, const FiberedMeasure& m);

}  // namespace fiberot
