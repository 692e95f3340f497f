#pragma once

// Structure of a Riemannian map into an almost Hermitian chart: the
// decompositions J F*X = phi F*X + omega F*X and J V = B V + C V, the slant
// angle, the operator Q = *F* phi F* on the horizontal space, and the
// checks that relate them to the second fundamental form.
//
// Block matrices are expressed in the orthonormal bases of the frame's
// TangentSplit; vector-valued results are in chart coordinates.

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "slantmap/check_result.hpp"
#include "slantmap/map_analysis.hpp"

namespace slantmap {

enum class SlantClass { Invariant, AntiInvariant, ProperSlant, NotSlant, NotRiemannian };

const char* to_string(SlantClass c);

struct PointOperators {
  Eigen::MatrixXd phi;    // r x r, range -> range
  Eigen::MatrixXd omega;  // (m-r) x r, range -> range_perp
  Eigen::MatrixXd b;      // r x (m-r), range_perp -> range
  Eigen::MatrixXd c;      // (m-r) x (m-r), range_perp -> range_perp
  Eigen::MatrixXd q;      // r x r, on the horizontal basis
  /// sec(theta) phi and sec(theta) Q; absent when theta is not given or
  /// sec(theta) is undefined.
  std::optional<Eigen::MatrixXd> j_tilde;
  std::optional<Eigen::MatrixXd> j_hat;
};

PointOperators point_operators(const PointFrame& frame, std::optional<double> theta = {});

struct Decomposition {
  Eigen::VectorXd tangential;  // in range F*
  Eigen::VectorXd normal;      // in (range F*)^perp
};

/// J F*X split into phi F*X and omega F*X.
Decomposition phi_omega_decompose(const PointFrame& frame, const Eigen::VectorXd& x);
/// J V split into B V and C V; V must be orthogonal to range F* within tol.
Decomposition bc_decompose(const PointFrame& frame, const Eigen::VectorXd& v, double tol = 1e-8);

/// Angle between J F*X and range F*, computed as atan2(|omega F*X|, |phi F*X|)
/// which equals arccos(|phi F*X| / |J F*X|) but keeps full accuracy near 0
/// and pi/2. Throws AnalysisError when X lies in the kernel.
double slant_angle(const PointFrame& frame, const Eigen::VectorXd& x);

/// Q = *F* o phi o F* as an n x n matrix in source coordinates, built from
/// the metric adjoint of the differential.
Eigen::MatrixXd q_operator_coordinates(const PointFrame& frame);
/// Q in the horizontal basis.
Eigen::MatrixXd q_operator(const PointFrame& frame);

/// Orthonormal horizontal frame {e1, sec(theta) Q e1, e2, sec(theta) Q e2, ...}.
/// Throws AnalysisError when Q vanishes (theta = pi/2) or the horizontal
/// space does not split into Q-planes.
std::vector<Eigen::VectorXd> adapted_frame(const PointFrame& frame, double theta);

struct ParallelDefect {
  Eigen::VectorXd defect;
  /// The same quantity by a second route, for comparison.
  Eigen::VectorXd reference;
};

/// (nabla~_X omega) F*Y = nabla^{F perp}_X (omega F*Y) - omega F*(nabla^1_X Y),
/// with reference C (nabla F*)(X, Y) - (nabla F*)(X, QY), which it equals
/// when the target is Kaehler.
ParallelDefect omega_parallel_defect(const MapSpec& map, const PointFrame& frame, const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& y, double step);
ParallelDefect omega_parallel_defect(const MapSpec& map, const PointFrame& frame, const CurveFrames& curve,
                                     const Eigen::VectorXd& y);

/// nabla^F_X (phi F*Y) - phi F*(nabla^1_X Y) - (nabla F*)(X, QY), with
/// reference F*(nabla^1_X QY) - phi F*(nabla^1_X Y) (Y' = QY realizes phi F*Y = F*Y').
ParallelDefect phi_parallel_defect(const MapSpec& map, const PointFrame& frame, const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& y, double step);
ParallelDefect phi_parallel_defect(const MapSpec& map, const PointFrame& frame, const CurveFrames& curve,
                                   const Eigen::VectorXd& y);

/// Frobenius norm over horizontal basis pairs (X, Y) and range_perp basis V of
///   g2(S_{omega F*Y} F*X, B V) - g2(nabla^{F perp}_X omega F*Y, C V)
///     + g2(nabla^{F perp}_X omega phi F*Y, V),
/// with omega phi F*Y computed as omega F*(QY).
double normal_condition_residual(const MapSpec& map, const PointFrame& frame, double step);

struct TargetStructure {
  bool almost_hermitian = false;
  bool kahler = false;
};

struct SlantReport {
  SlantClass classification = SlantClass::NotRiemannian;
  std::string reason;
  /// angles[i] are the sampled theta(X) at the i-th point.
  std::vector<std::vector<double>> angles;
  double mean_angle = 0.0;
  double max_deviation = 0.0;
  std::optional<Witness> deviation_witness;

  double lambda = 0.0;  // phi^2 = lambda on range F*
  double lambda_residual = 0.0;
  double mu = 0.0;  // Q^2 = mu on the horizontal space
  double mu_residual = 0.0;

  bool omega_parallel = false;
  double omega_defect = 0.0;
  bool phi_parallel = false;
  double phi_defect = 0.0;
  bool phwc = false;
  bool pseudo_homothetic = false;

  std::vector<CheckResult> checks;

  bool is_slant() const;
  /// sec(theta) is finite: invariant or proper slant.
  bool sec_defined() const;
  const CheckResult* check(const std::string& name) const;
};

/// Samples the slant angle and runs every slant-dependent check. Checks
/// whose preconditions fail are reported as skipped with a reason.
SlantReport classify_slant(const MapSpec& map, std::span<const PointFrame> frames, const AnalysisOptions& options,
                           const CheckResult& riemannian, const TargetStructure& target);

}  // namespace slantmap
