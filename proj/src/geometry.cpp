#include "slantmap/geometry.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "slantmap/sampling.hpp"

namespace slantmap {

namespace {

void require_square(const ExpressionMatrix& m, int dim, const char* what) {
  if (static_cast<int>(m.size()) != dim)
    throw std::invalid_argument(std::string(what) + " must have " + std::to_string(dim) + " rows");
  for (const auto& row : m)
    if (static_cast<int>(row.size()) != dim)
      throw std::invalid_argument(std::string(what) + " must have " + std::to_string(dim) + " columns");
  for (const auto& row : m)
    for (const auto& e : row)
      if (e.max_variable() > dim)
        throw std::invalid_argument(std::string(what) + " entry '" + to_string(e) +
                                    "' references a variable beyond the chart dimension");
}

Eigen::MatrixXd evaluate(const ExpressionMatrix& m, const Eigen::VectorXd& p) {
  const auto n = static_cast<Eigen::Index>(m.size());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = eval(m[i][j], p);
  return out;
}

}  // namespace

std::string describe_point(const Eigen::VectorXd& p) {
  std::string s = "(";
  char buf[32];
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", p[i]);
    if (i) s += ", ";
    s += buf;
  }
  return s + ")";
}

ChartManifold::ChartManifold(int dim, ExpressionMatrix metric, std::optional<ExpressionMatrix> complex_structure)
    : dim_(dim), metric_(std::move(metric)), complex_(std::move(complex_structure)) {
  if (dim_ < 1) throw std::invalid_argument("chart dimension must be positive");
  require_square(metric_, dim_, "metric");
  for (int i = 0; i < dim_; ++i)
    for (int j = i + 1; j < dim_; ++j)
      if (!(metric_[i][j] == metric_[j][i]))
        throw std::invalid_argument("metric is not symmetric at entry (" + std::to_string(i + 1) + ", " +
                                    std::to_string(j + 1) + ")");
  if (complex_) {
    if (dim_ % 2 != 0) throw std::invalid_argument("an almost complex structure needs an even dimension");
    require_square(*complex_, dim_, "complex structure");
  }
}

ChartManifold ChartManifold::euclidean(int dim, std::optional<ExpressionMatrix> complex_structure) {
  return ChartManifold(dim, identity_metric(dim), std::move(complex_structure));
}

ExpressionMatrix identity_metric(int dim) {
  ExpressionMatrix m;
  for (int i = 0; i < dim; ++i) {
    m.emplace_back();
    for (int j = 0; j < dim; ++j) m.back().push_back(ast::lit(i == j ? 1.0 : 0.0));
  }
  return m;
}

ExpressionMatrix standard_complex_structure(int dim) {
  if (dim % 2 != 0) throw std::invalid_argument("standard complex structure needs an even dimension");
  ExpressionMatrix m;
  for (int i = 0; i < dim; ++i) {
    m.emplace_back();
    for (int j = 0; j < dim; ++j) {
      // J e_{2a} = e_{2a+1}, J e_{2a+1} = -e_{2a} (0-based)
      if (j % 2 == 0 && i == j + 1)
        m.back().push_back(ast::lit(1.0));
      else if (j % 2 == 1 && i == j - 1)
        m.back().push_back(ast::neg(ast::lit(1.0)));
      else
        m.back().push_back(ast::lit(0.0));
    }
  }
  return m;
}

Eigen::MatrixXd ChartManifold::metric_at(const Eigen::VectorXd& p) const {
  Eigen::MatrixXd g(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = i; j < dim_; ++j) g(i, j) = g(j, i) = eval(metric_[i][j], p);
  return g;
}

InnerProduct ChartManifold::inner_product_at(const Eigen::VectorXd& p) const {
  try {
    return InnerProduct(metric_at(p));
  } catch (const NotPositiveDefinite& e) {
    throw DomainError(std::string("metric not positive definite at ") + describe_point(p) + ": " + e.what());
  }
}

ChartManifold::MetricJet ChartManifold::metric_jet(const Eigen::VectorXd& p) const {
  MetricJet out;
  out.g.resize(dim_, dim_);
  out.dg.assign(static_cast<std::size_t>(dim_), Eigen::MatrixXd::Zero(dim_, dim_));
  for (int i = 0; i < dim_; ++i)
    for (int j = i; j < dim_; ++j) {
      const Jet2 jet = eval_jet2(metric_[i][j], p);
      out.g(i, j) = out.g(j, i) = jet.value;
      for (int k = 0; k < dim_; ++k) out.dg[k](i, j) = out.dg[k](j, i) = jet.grad[k];
    }
  return out;
}

Eigen::MatrixXd ChartManifold::complex_structure_at(const Eigen::VectorXd& p) const {
  if (!complex_) throw ConfigurationError("chart has no almost complex structure");
  return evaluate(*complex_, p);
}

std::vector<Eigen::MatrixXd> ChartManifold::complex_structure_derivatives(const Eigen::VectorXd& p) const {
  if (!complex_) throw ConfigurationError("chart has no almost complex structure");
  std::vector<Eigen::MatrixXd> d(static_cast<std::size_t>(dim_), Eigen::MatrixXd::Zero(dim_, dim_));
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) {
      const Expression& e = (*complex_)[i][j];
      if (e.is_constant()) continue;
      const Jet2 jet = eval_jet2(e, p);
      for (int k = 0; k < dim_; ++k) d[k](i, j) = jet.grad[k];
    }
  return d;
}

Eigen::VectorXd ChristoffelData::contract(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  Eigen::VectorXd out(dim());
  for (int k = 0; k < dim(); ++k) out[k] = x.dot(gamma[k] * y);
  return out;
}

ChristoffelData christoffel(const ChartManifold& chart, const Eigen::VectorXd& p) {
  const int n = chart.dim();
  const auto jet = chart.metric_jet(p);
  InnerProduct ip = [&] {
    try {
      return InnerProduct(jet.g);
    } catch (const NotPositiveDefinite& e) {
      throw DomainError(std::string("metric not positive definite at ") + describe_point(p) + ": " + e.what());
    }
  }();

  // First kind: first[l](i, j) = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
  Eigen::MatrixXd first(n, n * n);
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const double v = 0.5 * (jet.dg[i](j, l) + jet.dg[j](i, l) - jet.dg[l](i, j));
        first(l, i * n + j) = v;
        first(l, j * n + i) = v;
      }
  const Eigen::MatrixXd second = ip.solve(first);

  ChristoffelData out;
  out.gamma.assign(static_cast<std::size_t>(n), Eigen::MatrixXd::Zero(n, n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) out.gamma[k](i, j) = out.gamma[k](j, i) = second(k, i * n + j);
  return out;
}

CheckResult check_almost_hermitian(const ChartManifold& chart, std::span<const Eigen::VectorXd> points,
                                   double tol) {
  if (!chart.has_complex_structure()) throw ConfigurationError("chart has no almost complex structure");
  const int n = chart.dim();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  MaxResidual square, compat;
  for (const auto& p : points) {
    const Eigen::MatrixXd j = chart.complex_structure_at(p);
    const Eigen::MatrixXd g = chart.metric_at(p);
    square.observe((j * j + id).norm(), p);
    compat.observe((j.transpose() * g * j - g).norm(), p);
  }
  CheckResult a = square.finish("j_squared_minus_identity", tol);
  CheckResult b = compat.finish("metric_compatibility", tol);

  CheckResult out;
  out.name = "almost_hermitian";
  out.tol = tol;
  out.samples = static_cast<int>(points.size());
  out.residual = std::max(a.residual, b.residual);
  out.status = (a.passed() && b.passed()) ? CheckStatus::Pass : CheckStatus::Fail;
  if (a.failed()) out.witness = a.witness;
  else if (b.failed()) out.witness = b.witness;
  out.parts = {std::move(a), std::move(b)};
  return out;
}

Eigen::VectorXd complex_structure_derivative(const ChartManifold& chart, const Eigen::VectorXd& p,
                                             const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const Eigen::MatrixXd j = chart.complex_structure_at(p);
  const auto dj = chart.complex_structure_derivatives(p);
  const ChristoffelData gamma = christoffel(chart, p);

  // d_X(J) Y + Gamma(X, J Y) - J Gamma(X, Y)
  Eigen::VectorXd out = gamma.contract(x, j * y) - j * gamma.contract(x, y);
  for (int i = 0; i < chart.dim(); ++i) out += x[i] * (dj[i] * y);
  return out;
}

CheckResult check_kahler(const ChartManifold& chart, std::span<const Eigen::VectorXd> points, int directions,
                         double tol, std::uint64_t seed) {
  if (!chart.has_complex_structure()) throw ConfigurationError("chart has no almost complex structure");
  const int n = chart.dim();
  MaxResidual worst;
  for (std::size_t idx = 0; idx < points.size(); ++idx) {
    const Eigen::VectorXd& p = points[idx];
    const InnerProduct g = chart.inner_product_at(p);
    Sampler rng(mix_seed(seed, 0x6b61686c6572ULL, idx));

    std::vector<Eigen::VectorXd> seeds;
    for (int d = 0; d < directions; ++d) seeds.push_back(rng.unit_vector(g));
    for (int i = 0; i < n; ++i) seeds.push_back(Eigen::VectorXd::Unit(n, i));
    const SubspaceBasis frame = gram_schmidt(seeds, g, 1e-10);

    double total = 0.0;
    double largest = -1.0;
    Eigen::VectorXd wx, wy;
    for (int a = 0; a < frame.size(); ++a)
      for (int b = 0; b < frame.size(); ++b) {
        const double r = g.norm(complex_structure_derivative(chart, p, frame[a], frame[b]));
        total += r * r;
        if (r > largest) {
          largest = r;
          wx = frame[a];
          wy = frame[b];
        }
      }
    worst.observe(std::sqrt(total), p, {{"X", wx}, {"Y", wy}});
  }
  return worst.finish("kahler", tol);
}

}  // namespace slantmap
