#pragma once

// Single-patch coordinate charts carrying a Riemannian metric and, for
// targets, an optional almost complex structure. Both are given entrywise as
// expressions in the chart coordinates x1..xn.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "slantmap/check_result.hpp"
#include "slantmap/expr.hpp"
#include "slantmap/metric_linalg.hpp"

namespace slantmap {

/// A requested computation needs structure the chart does not carry.
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Row-major square matrix of expressions.
using ExpressionMatrix = std::vector<std::vector<Expression>>;

class ChartManifold {
 public:
  /// The metric must be square and symmetric as ASTs; J, when given, square
  /// of the same size and the dimension even.
  ChartManifold(int dim, ExpressionMatrix metric, std::optional<ExpressionMatrix> complex_structure = {});

  static ChartManifold euclidean(int dim, std::optional<ExpressionMatrix> complex_structure = {});

  int dim() const { return dim_; }
  bool has_complex_structure() const { return complex_.has_value(); }
  const ExpressionMatrix& metric() const { return metric_; }
  const std::optional<ExpressionMatrix>& complex_structure() const { return complex_; }

  Eigen::MatrixXd metric_at(const Eigen::VectorXd& p) const;
  /// Throws DomainError naming p when the metric is not positive definite there.
  InnerProduct inner_product_at(const Eigen::VectorXd& p) const;

  struct MetricJet {
    Eigen::MatrixXd g;
    std::vector<Eigen::MatrixXd> dg;  // dg[k](i, j) = d_k g_ij
  };
  MetricJet metric_jet(const Eigen::VectorXd& p) const;

  /// J(p) as a (1,1) tensor: column j is J applied to the j-th coordinate vector.
  Eigen::MatrixXd complex_structure_at(const Eigen::VectorXd& p) const;
  /// d_k J(p) for every k.
  std::vector<Eigen::MatrixXd> complex_structure_derivatives(const Eigen::VectorXd& p) const;

 private:
  int dim_;
  ExpressionMatrix metric_;
  std::optional<ExpressionMatrix> complex_;
};

/// The complex structure pairing (x1,x2), (x3,x4), ...: J e1 = e2, J e2 = -e1.
ExpressionMatrix standard_complex_structure(int dim);

/// delta_ij as constant expressions.
ExpressionMatrix identity_metric(int dim);

std::string describe_point(const Eigen::VectorXd& p);

/// Levi-Civita connection coefficients at a point,
/// gamma[k](i, j) = Gamma^k_ij, symmetric in (i, j) exactly.
struct ChristoffelData {
  std::vector<Eigen::MatrixXd> gamma;

  int dim() const { return static_cast<int>(gamma.size()); }
  double operator()(int k, int i, int j) const { return gamma[k](i, j); }
  /// Gamma^k_ij X^i Y^j
  Eigen::VectorXd contract(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
};

ChristoffelData christoffel(const ChartManifold& chart, const Eigen::VectorXd& p);

CheckResult check_almost_hermitian(const ChartManifold& chart, std::span<const Eigen::VectorXd> points,
                                   double tol);

/// (nabla_X J) Y at p for coordinate-constant extensions of X and Y.
Eigen::VectorXd complex_structure_derivative(const ChartManifold& chart, const Eigen::VectorXd& p,
                                             const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Norm of the tensor nabla J at each point, evaluated in an orthonormal
/// frame grown from `directions` seeded random unit vectors. The norm does
/// not depend on which orthonormal frame is used.
CheckResult check_kahler(const ChartManifold& chart, std::span<const Eigen::VectorXd> points, int directions,
                         double tol, std::uint64_t seed);

}  // namespace slantmap
