#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fiberot/duality.hpp"
#include "fiberot/measures.hpp"

namespace fiberot {

using Json = nlohmann::ordered_json;

/// Named fibered measures over one bundle, as read from an instance file.
struct Instance {
  Bundle bundle;
  std::vector<std::string> names;
  std::vector<FiberedMeasure> measures;
  /// Candidate support per base point; empty when the file gives none.
  std::vector<std::vector<int>> support;
  std::optional<ReferencePoint> reference;

  /// Throws InvalidProblem for unknown names.
  const FiberedMeasure& measure(const std::string& name) const;
  std::vector<FiberedMeasure> select(const std::vector<std::string>& names) const;
};

/// Parses the instance schema (per-fiber or shared-fiber variant). Throws
/// ParseError with the offending JSON path, or the measures module errors.
Instance parse_instance(const Json& doc);
Instance load_instance(const std::filesystem::path& path);

/// One measure per CSV file of (coordinate, weight) rows over a single base;
/// the points are the sorted union of coordinates with cost |x - y|.
Instance load_csv_instance(const std::vector<std::filesystem::path>& paths);

/// Inverse of parse_instance (per-fiber layout unless the bundle is shared).
Json instance_to_json(const Instance& instance);

/// {"zeta": {k: {base: v}}, "xi": {k: {base: [v per support slot]}}}, k as
/// 0-based index strings. σ-null base points are omitted.
Json certificate_to_json(const DualCertificate& cert, const BarycenterProblem& problem);
/// Missing σ-null entries default to ζ = 1, ξ = 0. Throws ParseError.
DualCertificate certificate_from_json(const Json& doc, const BarycenterProblem& problem);

/// {base: [{"point": i, "w": v}]} with σ-null points omitted.
Json measure_to_json(const FiberedMeasure& m);

/// Value rounded to 12 significant digits.
double round_significant(double v);
/// Rounds every number in the tree to 12 significant digits; ±inf and NaN
/// become the strings "inf", "-inf", "nan".
Json rounded(const Json& doc);
/// Pretty-printed rounded JSON with a trailing newline.
std::string dump_report(const Json& doc);

}  // namespace fiberot
