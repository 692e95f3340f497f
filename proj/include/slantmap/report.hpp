#pragma once

// Runs every applicable check on a map in dependency order (target
// structure, Riemannian map, second fundamental form, slant structure,
// derived identities) and serializes the outcome deterministically.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "slantmap/check_result.hpp"
#include "slantmap/map_analysis.hpp"
#include "slantmap/slant.hpp"

namespace slantmap {

struct PointSummary {
  Eigen::VectorXd point;
  int rank = 0;
  Eigen::VectorXd singular_values;
};

struct Report {
  std::string map_id;
  std::string map_name;
  std::string provenance;
  int source_dim = 0;
  int target_dim = 0;
  AnalysisOptions options;
  std::vector<PointSummary> samples;
  std::vector<CheckResult> checks;
  std::optional<SlantReport> slant;
  /// Set when evaluation stopped early (metric not positive definite,
  /// expression outside its domain, ...).
  std::string error;

  const CheckResult* check(const std::string& name) const;
  /// 0 when every non-skipped check passes, 1 when one fails, 2 on error.
  int exit_code() const;
};

Report run_analysis(const MapSpec& map, const AnalysisOptions& options, const std::string& map_id = "",
                    const std::string& map_name = "", const std::string& provenance = "");

nlohmann::ordered_json to_json(const CheckResult& check);
nlohmann::ordered_json to_json(const Report& report);

/// Doubles are written with 17 significant digits; NaN and infinities as null.
std::string write_json(const nlohmann::ordered_json& doc, bool pretty);

}  // namespace slantmap
