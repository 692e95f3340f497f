#pragma once

// Built-in maps. Every entry is produced as a "slantmap/1" JSON document, so
// catalog maps and user files go through the same loader.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace slantmap {

struct CatalogEntry {
  std::string id;
  std::string summary;
  /// Parameter names with their defaults.
  std::vector<std::pair<std::string, double>> params;
};

const std::vector<CatalogEntry>& catalog_entries();

/// "name", "name(0.3)" or "name(alpha=0.3)". Throws SpecError for unknown
/// entries or malformed parameters.
nlohmann::json catalog_spec(std::string_view id);

/// Shortest decimal form that reads back to the same double.
std::string format_literal(double v);

}  // namespace slantmap
