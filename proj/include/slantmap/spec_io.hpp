#pragma once

// Map-spec documents, schema "slantmap/1":
//
//   {"schema": "slantmap/1", "name": "...",
//    "source": {"dim": n, "metric": "euclidean" | [[expr, ...], ...]},
//    "target": {"dim": m, "metric": ..., "complex_structure": "standard" | [[...]]},
//    "components": [expr, ...],
//    "domain": [[lo, hi], ...]}
//
// Expressions are strings (or plain numbers) over x1..xn of their chart.

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "slantmap/map_analysis.hpp"

namespace slantmap {

/// Invalid map-spec document; `pointer` is the JSON pointer of the offending value.
class SpecError : public std::runtime_error {
 public:
  SpecError(std::string pointer, const std::string& message)
      : std::runtime_error(pointer.empty() ? message : pointer + ": " + message), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

struct LoadedSpec {
  MapSpec map;
  std::string name;
  /// "catalog:<id>" or the file path.
  std::string id;
  /// Catalog id with parameters, or "fnv1a64:<hex>" of the file bytes.
  std::string provenance;
};

MapSpec map_spec_from_json(const nlohmann::json& doc);

/// Accepts "catalog:<entry>" or a path to a JSON file.
LoadedSpec load_map_spec(const std::string& id_or_path);

std::string fnv1a64_hex(std::string_view bytes);

}  // namespace slantmap
