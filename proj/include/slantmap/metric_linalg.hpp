#pragma once

// Linear algebra relative to a symmetric positive-definite inner product.
// Every metric problem is reduced to a Euclidean one through the Cholesky
// factor G = L L^T: a vector x has whitened coordinates L^T x.

#include <span>
#include <stdexcept>

#include <Eigen/Dense>

namespace slantmap {

class NotPositiveDefinite : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class InnerProduct {
 public:
  /// Throws NotPositiveDefinite if G is not symmetric (1e-12 relative) or
  /// has a non-positive eigenvalue.
  explicit InnerProduct(Eigen::MatrixXd gram);

  static InnerProduct euclidean(int n);

  int dim() const { return static_cast<int>(gram_.rows()); }
  const Eigen::MatrixXd& gram() const { return gram_; }
  /// Lower Cholesky factor L with G = L L^T.
  const Eigen::MatrixXd& factor() const { return factor_; }

  double operator()(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const { return x.dot(gram_ * y); }
  double norm(const Eigen::VectorXd& x) const;

  /// G^{-1} b
  Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const;

  /// L^T x
  Eigen::MatrixXd whiten(const Eigen::MatrixXd& x) const;
  /// L^{-T} y, the inverse of whiten.
  Eigen::MatrixXd unwhiten(const Eigen::MatrixXd& y) const;

 private:
  Eigen::MatrixXd gram_;
  Eigen::MatrixXd factor_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

/// Columns orthonormal under `metric`.
struct SubspaceBasis {
  Eigen::MatrixXd columns;
  InnerProduct metric;

  int size() const { return static_cast<int>(columns.cols()); }
  int ambient_dim() const { return static_cast<int>(columns.rows()); }
  Eigen::VectorXd operator[](int i) const { return columns.col(i); }

  /// Max-abs deviation of the Gram matrix of the columns from the identity.
  double gram_residual() const;
  /// Coordinates of v in this basis: c_i = g(v, b_i).
  Eigen::VectorXd coefficients(const Eigen::VectorXd& v) const;
  /// Matrix P with P v = project(v, *this).
  Eigen::MatrixXd projector() const;
};

/// Modified Gram-Schmidt with one re-orthogonalization pass. Vectors whose
/// residual norm falls below tol * (largest input norm) are dropped.
SubspaceBasis gram_schmidt(std::span<const Eigen::VectorXd> vectors, const InnerProduct& ip, double tol);

/// B = G1^{-1} A^T G2, so that g1(x, B y) = g2(A x, y).
Eigen::MatrixXd metric_adjoint(const Eigen::MatrixXd& a, const InnerProduct& g1, const InnerProduct& g2);

struct TangentSplit {
  int rank = 0;
  /// Singular values of the whitened matrix, decreasing.
  Eigen::VectorXd singular_values;
  SubspaceBasis kernel;      // in the source, g1-orthonormal
  SubspaceBasis horizontal;  // in the source, g1-orthogonal to kernel
  SubspaceBasis range;       // in the target, g2-orthonormal; A h_i = s_i r_i
  SubspaceBasis range_perp;  // in the target, completes range
};

/// Rank and the four orthonormal bases of a linear map A : (R^n, g1) -> (R^m, g2).
/// The rank counts singular values above tol * s_max. Horizontal vectors are
/// ordered by decreasing singular value with their first nonzero component
/// positive; each range vector is paired with its horizontal vector.
TangentSplit split_tangent(const Eigen::MatrixXd& a, const InnerProduct& g1, const InnerProduct& g2,
                           double tol);

Eigen::VectorXd project(const Eigen::VectorXd& v, const SubspaceBasis& basis);

}  // namespace slantmap
