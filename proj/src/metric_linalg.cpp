#include "slantmap/metric_linalg.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/SVD>

namespace slantmap {

namespace {

// First component above a small relative threshold is made positive.
void canonical_sign(Eigen::Ref<Eigen::VectorXd> v, Eigen::Ref<Eigen::VectorXd> partner) {
  const double scale = v.cwiseAbs().maxCoeff();
  if (scale == 0.0) return;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-12 * scale) {
      if (v[i] < 0.0) {
        v = -v;
        if (partner.size() > 0) partner = -partner;
      }
      return;
    }
  }
}

void canonical_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::VectorXd none;
  canonical_sign(v, none);
}

}  // namespace

InnerProduct::InnerProduct(Eigen::MatrixXd gram) : gram_(std::move(gram)) {
  if (gram_.rows() != gram_.cols() || gram_.rows() == 0)
    throw NotPositiveDefinite("inner product matrix must be square and non-empty");
  if (!gram_.allFinite()) throw NotPositiveDefinite("inner product matrix has non-finite entries");
  const double scale = gram_.cwiseAbs().maxCoeff();
  if ((gram_ - gram_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw NotPositiveDefinite("inner product matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram_, Eigen::EigenvaluesOnly);
  if (!(eig.eigenvalues().minCoeff() > 0.0))
    throw NotPositiveDefinite("inner product matrix is not positive definite");
  llt_.compute(gram_);
  if (llt_.info() != Eigen::Success) throw NotPositiveDefinite("Cholesky factorization failed");
  factor_ = llt_.matrixL();
}

InnerProduct InnerProduct::euclidean(int n) { return InnerProduct(Eigen::MatrixXd::Identity(n, n)); }

double InnerProduct::norm(const Eigen::VectorXd& x) const { return std::sqrt(std::max(0.0, (*this)(x, x))); }

Eigen::MatrixXd InnerProduct::solve(const Eigen::MatrixXd& b) const { return llt_.solve(b); }

Eigen::MatrixXd InnerProduct::whiten(const Eigen::MatrixXd& x) const { return factor_.transpose() * x; }

Eigen::MatrixXd InnerProduct::unwhiten(const Eigen::MatrixXd& y) const {
  return factor_.transpose().triangularView<Eigen::Upper>().solve(y);
}

double SubspaceBasis::gram_residual() const {
  if (size() == 0) return 0.0;
  const Eigen::MatrixXd gram = columns.transpose() * metric.gram() * columns;
  return (gram - Eigen::MatrixXd::Identity(size(), size())).cwiseAbs().maxCoeff();
}

Eigen::VectorXd SubspaceBasis::coefficients(const Eigen::VectorXd& v) const {
  return columns.transpose() * (metric.gram() * v);
}

Eigen::MatrixXd SubspaceBasis::projector() const { return columns * columns.transpose() * metric.gram(); }

SubspaceBasis gram_schmidt(std::span<const Eigen::VectorXd> vectors, const InnerProduct& ip, double tol) {
  const int n = ip.dim();
  double max_norm = 0.0;
  for (const auto& v : vectors) max_norm = std::max(max_norm, ip.norm(v));

  std::vector<Eigen::VectorXd> kept;
  for (const auto& v : vectors) {
    if (max_norm == 0.0) break;
    Eigen::VectorXd w = v;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : kept) w -= ip(q, w) * q;
    const double r = ip.norm(w);
    if (r < tol * max_norm) continue;
    kept.push_back(w / r);
  }

  Eigen::MatrixXd cols(n, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) cols.col(static_cast<Eigen::Index>(i)) = kept[i];
  return SubspaceBasis{std::move(cols), ip};
}

Eigen::MatrixXd metric_adjoint(const Eigen::MatrixXd& a, const InnerProduct& g1, const InnerProduct& g2) {
  if (a.cols() != g1.dim() || a.rows() != g2.dim())
    throw std::invalid_argument("metric_adjoint: dimension mismatch");
  return g1.solve(a.transpose() * g2.gram());
}

TangentSplit split_tangent(const Eigen::MatrixXd& a, const InnerProduct& g1, const InnerProduct& g2,
                           double tol) {
  if (a.cols() != g1.dim() || a.rows() != g2.dim())
    throw std::invalid_argument("split_tangent: dimension mismatch");
  const Eigen::Index n = a.cols();
  const Eigen::Index m = a.rows();

  // A_w = L2^T A L1^{-T}
  const Eigen::MatrixXd whitened = g2.whiten(a * g1.unwhiten(Eigen::MatrixXd::Identity(n, n)));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(whitened, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::MatrixXd u = svd.matrixU();
  Eigen::MatrixXd v = svd.matrixV();
  const Eigen::VectorXd& s = svd.singularValues();

  int rank = 0;
  const double smax = s.size() > 0 ? s[0] : 0.0;
  if (smax > 0.0)
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s[i] > tol * smax) ++rank;

  Eigen::MatrixXd horizontal = g1.unwhiten(v.leftCols(rank));
  Eigen::MatrixXd kernel = g1.unwhiten(v.rightCols(n - rank));
  Eigen::MatrixXd range = g2.unwhiten(u.leftCols(rank));
  Eigen::MatrixXd perp = g2.unwhiten(u.rightCols(m - rank));

  for (int i = 0; i < rank; ++i) {
    Eigen::VectorXd h = horizontal.col(i);
    Eigen::VectorXd r = range.col(i);
    canonical_sign(h, r);
    horizontal.col(i) = h;
    range.col(i) = r;
  }
  for (Eigen::Index i = 0; i < kernel.cols(); ++i) {
    Eigen::VectorXd k = kernel.col(i);
    canonical_sign(k);
    kernel.col(i) = k;
  }
  for (Eigen::Index i = 0; i < perp.cols(); ++i) {
    Eigen::VectorXd q = perp.col(i);
    canonical_sign(q);
    perp.col(i) = q;
  }

  TangentSplit out{rank,
                   s,
                   SubspaceBasis{std::move(kernel), g1},
                   SubspaceBasis{std::move(horizontal), g1},
                   SubspaceBasis{std::move(range), g2},
                   SubspaceBasis{std::move(perp), g2}};
  return out;
}

Eigen::VectorXd project(const Eigen::VectorXd& v, const SubspaceBasis& basis) {
  if (basis.size() == 0) return Eigen::VectorXd::Zero(v.size());
  return basis.columns * basis.coefficients(v);
}

}  // namespace slantmap
