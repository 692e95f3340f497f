#pragma once

// Pointwise analysis of a smooth map F between coordinate charts: the
// differential, the orthogonal splittings ker F* + H and
// range F* + (range F*)^perp, the second fundamental form (nabla F*), the
// tension field and the checks built on them.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "slantmap/check_result.hpp"
#include "slantmap/expr.hpp"
#include "slantmap/geometry.hpp"
#include "slantmap/metric_linalg.hpp"
#include "slantmap/sampling.hpp"

namespace slantmap {

class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MapSpec {
  /// Validates that there is one component per target coordinate and that
  /// components only use source variables. The domain defaults to [-1, 1]^n.
  MapSpec(ChartManifold source, ChartManifold target, std::vector<Expression> components,
          std::optional<Box> domain = {});

  ChartManifold source;
  ChartManifold target;
  std::vector<Expression> components;
  Box domain;

  int source_dim() const { return source.dim(); }
  int target_dim() const { return target.dim(); }
  Eigen::VectorXd evaluate(const Eigen::VectorXd& p) const;
};

struct Tolerances {
  double rank = 1e-8;
  double check = 1e-8;
  double angle = 1e-6;
};

struct AnalysisOptions {
  int points = 50;
  /// Random tangent directions (or pairs) per sample point.
  int dirs = 6;
  std::uint64_t seed = 42;
  Tolerances tol;
  /// Directions per point for the nabla J test.
  int kahler_dirs = 4;
  /// Curve parameter step for derivatives of pointwise-defined sections.
  double step = 1e-5;
};

/// Everything about F at one source point that later computations reuse.
struct PointFrame {
  Eigen::VectorXd point;
  Eigen::VectorXd image;
  /// (gamma, i) = dF^gamma / dx_i
  Eigen::MatrixXd jacobian;
  InnerProduct g1;
  InnerProduct g2;
  ChristoffelData gamma1;
  ChristoffelData gamma2;
  TangentSplit split;
  /// sff[gamma](i, j): coordinate components of (nabla F*), symmetric in (i, j).
  std::vector<Eigen::MatrixXd> sff;
  /// J at F(p) when the target carries one.
  std::optional<Eigen::MatrixXd> complex_structure;
  double rank_tol = 1e-8;

  int rank() const { return split.rank; }
  Eigen::VectorXd push(const Eigen::VectorXd& x) const { return jacobian * x; }
  /// Orthogonal projectors onto the four subspaces, in coordinates.
  Eigen::MatrixXd range_projector() const { return split.range.projector(); }
  Eigen::MatrixXd perp_projector() const { return split.range_perp.projector(); }
  Eigen::MatrixXd horizontal_projector() const { return split.horizontal.projector(); }
  Eigen::MatrixXd vertical_projector() const { return split.kernel.projector(); }
  const Eigen::MatrixXd& j() const;
};

Eigen::MatrixXd differential(const MapSpec& map, const Eigen::VectorXd& p);

PointFrame evaluate_frame(const MapSpec& map, const Eigen::VectorXd& p, double rank_tol);
std::vector<PointFrame> evaluate_frames(const MapSpec& map, std::span<const Eigen::VectorXd> points,
                                        double rank_tol);

/// Deterministic per-point direction stream, independent of evaluation order.
Sampler direction_sampler(std::uint64_t seed, std::uint64_t stream, std::size_t point_index);

/// (nabla F*)(X, Y) at the frame's point.
Eigen::VectorXd second_fundamental_form(const PointFrame& frame, const Eigen::VectorXd& x,
                                        const Eigen::VectorXd& y);
Eigen::VectorXd second_fundamental_form(const MapSpec& map, const Eigen::VectorXd& p, const Eigen::VectorXd& x,
                                        const Eigen::VectorXd& y);

/// Trace of (nabla F*) under g1, computed in coordinates (g1^{ij} B_ij).
Eigen::VectorXd tension_field(const PointFrame& frame);

/// S_V in the range basis: S(a, b) = g2(V, (nabla F*)(h_a, h_b)). A small
/// range component of V (at most tol relative) is projected away with the
/// norm of V preserved; larger ones are rejected.
Eigen::MatrixXd s_v_operator(const PointFrame& frame, const Eigen::VectorXd& v, double tol = 1e-8);

/// Sum of (nabla F*)(v_i, v_i) over the kernel basis. Throws AnalysisError
/// when the kernel is trivial.
Eigen::VectorXd fiber_mean_curvature(const PointFrame& frame);

/// Frames at p + h X and p - h X for differentiating sections along the
/// coordinate line through p in direction X.
struct CurveFrames {
  Eigen::VectorXd direction;
  double step;
  PointFrame plus;
  PointFrame minus;
};

CurveFrames curve_frames(const MapSpec& map, const PointFrame& at, const Eigen::VectorXd& x, double step);

/// A vector field along F (a section of F^{-1} TM2), defined pointwise.
using TargetSection = std::function<Eigen::VectorXd(const PointFrame&)>;
/// A vector field on the source, defined pointwise.
using SourceField = std::function<Eigen::VectorXd(const PointFrame&)>;

/// nabla^F_X s = ds/dt + Gamma2(F* X, s), with ds/dt by central differences.
Eigen::VectorXd pullback_derivative(const PointFrame& at, const CurveFrames& curve, const TargetSection& s);
/// nabla^1_X w = dw/dt + Gamma1(X, w).
Eigen::VectorXd source_derivative(const PointFrame& at, const CurveFrames& curve, const SourceField& w);

/// Rank agrees at every frame.
CheckResult check_rank_constant(std::span<const PointFrame> frames);

/// Gram matrix of F* on the horizontal basis against the identity.
CheckResult is_riemannian_map(std::span<const PointFrame> frames, double tol);

/// Range component of (nabla F*)(X, Y) for horizontal X, Y.
CheckResult check_sff_range_perp(std::span<const PointFrame> frames, int dirs, double tol, std::uint64_t seed);

/// Max over frames of |tau - (fiber trace + horizontal trace)| of the SFF.
CheckResult check_tension_split(std::span<const PointFrame> frames, double tol);

struct TotallyGeodesicContext {
  /// The map is slant and the target Kaehler, so the normal-bundle
  /// condition is meaningful.
  bool normal_condition_applies = false;
};

/// Definition ((nabla F*) = 0 on all tangent pairs) as the verdict, with the
/// three independent conditions as parts: fibers totally geodesic, the
/// horizontal distribution totally geodesic (via g1(nabla_X Y, W) and
/// g1(nabla_U W, Y) on projected extensions), and the normal-bundle
/// condition relating S, B, C and nabla^{F perp}. The value
/// "conditions_agree" records whether the joint verdict of the conditions
/// matches the definition.
CheckResult check_totally_geodesic(const MapSpec& map, std::span<const PointFrame> frames,
                                   const AnalysisOptions& options, const TotallyGeodesicContext& context);

}  // namespace slantmap
