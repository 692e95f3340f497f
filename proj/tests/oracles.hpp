#pragma once

// Independent reference computations for the tests: central finite
// differences of plain evaluations, and dense inverses instead of the
// library's Cholesky path.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "slantmap/geometry.hpp"
#include "slantmap/map_analysis.hpp"

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

inline double rel_err(const VectorXd& a, const VectorXd& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

inline MatrixXd metric_values(const slantmap::ChartManifold& chart, const VectorXd& p) {
  MatrixXd g(chart.dim(), chart.dim());
  for (int i = 0; i < chart.dim(); ++i)
    for (int j = 0; j < chart.dim(); ++j) g(i, j) = slantmap::eval(chart.metric()[i][j], p);
  return g;
}

/// Gamma^k_ij from central differences of the metric entries.
inline std::vector<MatrixXd> fd_christoffel(const slantmap::ChartManifold& chart, const VectorXd& p,
                                         double h = 1e-5) {
  const int n = chart.dim();
  std::vector<MatrixXd> dg(n);
  for (int k = 0; k < n; ++k) {
    VectorXd e = VectorXd::Unit(n, k) * h;
    dg[k] = (metric_values(chart, p + e) - metric_values(chart, p - e)) / (2 * h);
  }
  const MatrixXd ginv = metric_values(chart, p).inverse();
  std::vector<MatrixXd> gamma(n, MatrixXd::Zero(n, n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l)
          gamma[k](i, j) += 0.5 * ginv(k, l) * (dg[i](l, j) + dg[j](l, i) - dg[l](i, j));
  return gamma;
}

inline VectorXd contract(const std::vector<MatrixXd>& gamma, const VectorXd& x, const VectorXd& y) {
  VectorXd out(static_cast<Eigen::Index>(gamma.size()));
  for (std::size_t k = 0; k < gamma.size(); ++k) out[static_cast<Eigen::Index>(k)] = x.dot(gamma[k] * y);
  return out;
}

inline MatrixXd fd_jacobian(const slantmap::MapSpec& map, const VectorXd& p, double h = 1e-5) {
  MatrixXd a(map.target_dim(), map.source_dim());
  for (int i = 0; i < map.source_dim(); ++i) {
    VectorXd e = VectorXd::Unit(map.source_dim(), i) * h;
    a.col(i) = (map.evaluate(p + e) - map.evaluate(p - e)) / (2 * h);
  }
  return a;
}

/// (nabla F*)(X, Y) with every derivative taken by central differences.
inline VectorXd fd_sff(const slantmap::MapSpec& map, const VectorXd& p, const VectorXd& x, const VectorXd& y,
                    double h = 1e-4) {
  auto f = [&](double s, double t) { return map.evaluate(p + s * x + t * y); };
  const VectorXd mixed = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * h * h);
  const MatrixXd a = fd_jacobian(map, p);
  const auto g1 = fd_christoffel(map.source, p);
  const auto g2 = fd_christoffel(map.target, map.evaluate(p));
  return mixed - a * contract(g1, x, y) + contract(g2, a * x, a * y);
}

/// (nabla F*)(X, Y) from one central difference of the first-derivative
/// Jacobian along X, so the step can be 1e-5 without second-difference
/// roundoff.
inline VectorXd fd_sff_first_order(const slantmap::MapSpec& map, const VectorXd& p, const VectorXd& x,
                                   const VectorXd& y, double h = 1e-5) {
  const VectorXd dy = (slantmap::differential(map, p + h * x) * y - slantmap::differential(map, p - h * x) * y) / (2 * h);
  const MatrixXd a = slantmap::differential(map, p);
  const auto g1 = fd_christoffel(map.source, p, h);
  const auto g2 = fd_christoffel(map.target, map.evaluate(p), h);
  return dy - a * contract(g1, x, y) + contract(g2, a * x, a * y);
}

/// Uniform doubles from a fixed engine, for hand-rolled property generators.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo = -1.0, double hi = 1.0) {
    return lo + (hi - lo) * static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  int integer(int lo, int hi) { return lo + static_cast<int>((engine_() >> 33) % static_cast<std::uint64_t>(hi - lo + 1)); }
  VectorXd vector(int n) {
    VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform();
    return v;
  }
  MatrixXd matrix(int r, int c) {
    MatrixXd m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = uniform();
    return m;
  }
  /// Symmetric positive definite with eigenvalues in [0.5, 3].
  MatrixXd spd(int n) {
    const MatrixXd q = orthogonal(n);
    VectorXd d(n);
    for (int i = 0; i < n; ++i) d[i] = uniform(0.5, 3.0);
    MatrixXd g = q * d.asDiagonal() * q.transpose();
    return 0.5 * (g + g.transpose());
  }
  MatrixXd orthogonal(int n) {
    Eigen::HouseholderQR<MatrixXd> qr(matrix(n, n));
    return qr.householderQ() * MatrixXd::Identity(n, n);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace oracle
