#pragma once

// Charts and maps used across test files that are not in the catalog.

#include <string>
#include <vector>

#include "slantmap/catalog.hpp"
#include "slantmap/geometry.hpp"
#include "slantmap/map_analysis.hpp"
#include "slantmap/spec_io.hpp"

namespace fixture {

using slantmap::ChartManifold;
using slantmap::ExpressionMatrix;
using slantmap::MapSpec;

inline ExpressionMatrix matrix_of(const std::vector<std::vector<std::string>>& rows) {
  const int n = static_cast<int>(rows.size());
  ExpressionMatrix out;
  for (const auto& row : rows) {
    std::vector<slantmap::Expression> r;
    for (const auto& e : row) r.push_back(slantmap::parse_expression(e, n));
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<slantmap::Expression> components(const std::vector<std::string>& cs, int source_dim) {
  std::vector<slantmap::Expression> out;
  for (const auto& c : cs) out.push_back(slantmap::parse_expression(c, source_dim));
  return out;
}

/// Upper half-plane, g = (dx1^2 + dx2^2) / x2^2.
inline ChartManifold hyperbolic_plane() {
  return ChartManifold(2, matrix_of({{"1 / pow(x2, 2)", "0"}, {"0", "1 / pow(x2, 2)"}}));
}

/// g = e^{2 x1} (dx1^2 + dx2^2)
inline ChartManifold conformal_plane() {
  return ChartManifold(2, matrix_of({{"exp(2 * x1)", "0"}, {"0", "exp(2 * x1)"}}));
}

/// e^{2 x1} times the Euclidean metric on R^4 with the standard J: almost
/// Hermitian, not Kaehler.
inline ChartManifold conformal_hermitian4() {
  return ChartManifold(4,
                       matrix_of({{"exp(2 * x1)", "0", "0", "0"},
                                  {"0", "exp(2 * x1)", "0", "0"},
                                  {"0", "0", "exp(2 * x1)", "0"},
                                  {"0", "0", "0", "exp(2 * x1)"}}),
                       slantmap::standard_complex_structure(4));
}

/// Euclidean R^4 with J0 conjugated by a rotation of angle x1 in the
/// (x2, x3) plane: almost Hermitian, |nabla J| = 2 everywhere.
inline ChartManifold rotated_structure4() {
  return ChartManifold(4, slantmap::identity_metric(4),
                       matrix_of({{"0", "-cos(x1)", "-sin(x1)", "0"},
                                  {"cos(x1)", "0", "0", "sin(x1)"},
                                  {"sin(x1)", "0", "0", "-cos(x1)"},
                                  {"0", "-sin(x1)", "cos(x1)", "0"}}));
}

/// Euclidean R^2 with J^2 = -I that is not orthogonal.
inline ChartManifold skewed_structure2() {
  return ChartManifold(2, slantmap::identity_metric(2), matrix_of({{"0", "-2"}, {"0.5", "0"}}));
}

inline MapSpec catalog(const std::string& id) { return slantmap::map_spec_from_json(slantmap::catalog_spec(id)); }

/// compose_slant(pi/4) on the source g = dx1^2 + dx2^2 + (dx3 + x1 dx2)^2:
/// the fibers are geodesics but the horizontal distribution is not integrable.
inline MapSpec twisted() {
  ChartManifold source(3, matrix_of({{"1", "0", "0"}, {"0", "1 + pow(x1, 2)", "x1"}, {"0", "x1", "1"}}));
  ChartManifold target = ChartManifold::euclidean(4, slantmap::standard_complex_structure(4));
  return MapSpec(std::move(source), std::move(target),
                 components({"x1", "0.7071067811865476 * x2", "0.7071067811865476 * x2", "0"}, 3));
}

/// x -> 2x on R^2 into Hermitian R^2: conformal, not a Riemannian map.
inline MapSpec dilation() {
  return MapSpec(ChartManifold::euclidean(2), ChartManifold::euclidean(2, slantmap::standard_complex_structure(2)),
                 components({"2 * x1", "2 * x2"}, 2));
}

/// F(x) = (x1, x1^2) from R^1 into Euclidean R^2.
inline MapSpec parabola() {
  return MapSpec(ChartManifold::euclidean(1), ChartManifold::euclidean(2), components({"x1", "pow(x1, 2)"}, 1));
}

}  // namespace fixture
