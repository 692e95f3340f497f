#include "slantmap/map_analysis.hpp"

#include <cmath>
#include <string>

#include "slantmap/slant.hpp"

namespace slantmap {

namespace {

void mirror_upper(Eigen::MatrixXd& h) {
  for (Eigen::Index j = 0; j < h.cols(); ++j)
    for (Eigen::Index i = j + 1; i < h.rows(); ++i) h(i, j) = h(j, i);
}

}  // namespace

MapSpec::MapSpec(ChartManifold source_chart, ChartManifold target_chart, std::vector<Expression> comps,
                 std::optional<Box> box)
    : source(std::move(source_chart)),
      target(std::move(target_chart)),
      components(std::move(comps)),
      domain(box ? std::move(*box) : Box::cube(source.dim())) {
  if (static_cast<int>(components.size()) != target.dim())
    throw std::invalid_argument("map has " + std::to_string(components.size()) + " components but the target has dimension " +
                                std::to_string(target.dim()));
  for (const auto& c : components)
    if (c.max_variable() > source.dim())
      throw std::invalid_argument("component '" + to_string(c) + "' references a variable beyond the source dimension");
  if (domain.dim() != source.dim()) throw std::invalid_argument("domain box dimension differs from the source dimension");
  for (const auto& b : domain.bounds)
    if (!(b[0] <= b[1])) throw std::invalid_argument("domain box has an empty interval");
}

Eigen::VectorXd MapSpec::evaluate(const Eigen::VectorXd& p) const {
  Eigen::VectorXd out(target_dim());
  for (int g = 0; g < target_dim(); ++g) out[g] = eval(components[g], p);
  return out;
}

const Eigen::MatrixXd& PointFrame::j() const {
  if (!complex_structure) throw ConfigurationError("target chart has no almost complex structure");
  return *complex_structure;
}

Eigen::MatrixXd differential(const MapSpec& map, const Eigen::VectorXd& p) {
  Eigen::MatrixXd a(map.target_dim(), map.source_dim());
  for (int g = 0; g < map.target_dim(); ++g) a.row(g) = eval_jet2(map.components[g], p).grad.transpose();
  return a;
}

PointFrame evaluate_frame(const MapSpec& map, const Eigen::VectorXd& p, double rank_tol) {
  const int n = map.source_dim();
  const int m = map.target_dim();
  if (p.size() != n) throw std::invalid_argument("point dimension differs from the source dimension");

  Eigen::VectorXd image(m);
  Eigen::MatrixXd a(m, n);
  std::vector<Eigen::MatrixXd> hess;
  hess.reserve(static_cast<std::size_t>(m));
  for (int g = 0; g < m; ++g) {
    Jet2 jet = eval_jet2(map.components[g], p);
    image[g] = jet.value;
    a.row(g) = jet.grad.transpose();
    hess.push_back(std::move(jet.hess));
  }

  InnerProduct g1 = map.source.inner_product_at(p);
  InnerProduct g2 = map.target.inner_product_at(image);
  ChristoffelData gamma1 = christoffel(map.source, p);
  ChristoffelData gamma2 = christoffel(map.target, image);
  TangentSplit split = split_tangent(a, g1, g2, rank_tol);

  // B^g_ij = d_i d_j F^g - Gamma1^k_ij d_k F^g + Gamma2^g_ab d_i F^a d_j F^b
  std::vector<Eigen::MatrixXd> sff(static_cast<std::size_t>(m));
  for (int g = 0; g < m; ++g) {
    Eigen::MatrixXd b = hess[g];
    for (int k = 0; k < n; ++k) b -= a(g, k) * gamma1.gamma[k];
    b += a.transpose() * gamma2.gamma[g] * a;
    mirror_upper(b);
    sff[g] = std::move(b);
  }

  std::optional<Eigen::MatrixXd> j;
  if (map.target.has_complex_structure()) j = map.target.complex_structure_at(image);

  return PointFrame{p,
                    std::move(image),
                    std::move(a),
                    std::move(g1),
                    std::move(g2),
                    std::move(gamma1),
                    std::move(gamma2),
                    std::move(split),
                    std::move(sff),
                    std::move(j),
                    rank_tol};
}

std::vector<PointFrame> evaluate_frames(const MapSpec& map, std::span<const Eigen::VectorXd> points,
                                        double rank_tol) {
  std::vector<PointFrame> frames;
  frames.reserve(points.size());
  for (const auto& p : points) frames.push_back(evaluate_frame(map, p, rank_tol));
  return frames;
}

Sampler direction_sampler(std::uint64_t seed, std::uint64_t stream, std::size_t point_index) {
  return Sampler(mix_seed(seed, stream, point_index));
}

Eigen::VectorXd second_fundamental_form(const PointFrame& frame, const Eigen::VectorXd& x,
                                        const Eigen::VectorXd& y) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(frame.sff.size()));
  for (std::size_t g = 0; g < frame.sff.size(); ++g) out[static_cast<Eigen::Index>(g)] = x.dot(frame.sff[g] * y);
  return out;
}

Eigen::VectorXd second_fundamental_form(const MapSpec& map, const Eigen::VectorXd& p, const Eigen::VectorXd& x,
                                        const Eigen::VectorXd& y) {
  return second_fundamental_form(evaluate_frame(map, p, 1e-8), x, y);
}

Eigen::VectorXd tension_field(const PointFrame& frame) {
  const Eigen::MatrixXd ginv = frame.g1.solve(Eigen::MatrixXd::Identity(frame.g1.dim(), frame.g1.dim()));
  Eigen::VectorXd tau(static_cast<Eigen::Index>(frame.sff.size()));
  for (std::size_t g = 0; g < frame.sff.size(); ++g)
    tau[static_cast<Eigen::Index>(g)] = (ginv.cwiseProduct(frame.sff[g])).sum();
  return tau;
}

Eigen::MatrixXd s_v_operator(const PointFrame& frame, const Eigen::VectorXd& v, double tol) {
  const Eigen::VectorXd along_range = project(v, frame.split.range);
  const double vnorm = frame.g2.norm(v);
  if (frame.g2.norm(along_range) > tol * std::max(1.0, vnorm))
    throw std::invalid_argument("S_V: V is not orthogonal to range F*");
  Eigen::VectorXd normal = v - along_range;
  const double nn = frame.g2.norm(normal);
  if (nn > 0.0) normal *= vnorm / nn;

  const int r = frame.rank();
  Eigen::MatrixXd s(r, r);
  for (int a = 0; a < r; ++a)
    for (int b = a; b < r; ++b)
      s(a, b) = s(b, a) =
          frame.g2(normal, second_fundamental_form(frame, frame.split.horizontal[a], frame.split.horizontal[b]));
  return s;
}

Eigen::VectorXd fiber_mean_curvature(const PointFrame& frame) {
  const SubspaceBasis& ker = frame.split.kernel;
  if (ker.size() == 0) throw AnalysisError("map is an immersion: the fibers are points");
  Eigen::VectorXd h = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(frame.sff.size()));
  for (int i = 0; i < ker.size(); ++i) h += second_fundamental_form(frame, ker[i], ker[i]);
  return h;
}

CurveFrames curve_frames(const MapSpec& map, const PointFrame& at, const Eigen::VectorXd& x, double step) {
  return CurveFrames{x, step, evaluate_frame(map, at.point + step * x, at.rank_tol),
                     evaluate_frame(map, at.point - step * x, at.rank_tol)};
}

Eigen::VectorXd pullback_derivative(const PointFrame& at, const CurveFrames& curve, const TargetSection& s) {
  const Eigen::VectorXd ds = (s(curve.plus) - s(curve.minus)) / (2.0 * curve.step);
  return ds + at.gamma2.contract(at.push(curve.direction), s(at));
}

Eigen::VectorXd source_derivative(const PointFrame& at, const CurveFrames& curve, const SourceField& w) {
  const Eigen::VectorXd dw = (w(curve.plus) - w(curve.minus)) / (2.0 * curve.step);
  return dw + at.gamma1.contract(curve.direction, w(at));
}

CheckResult check_rank_constant(std::span<const PointFrame> frames) {
  CheckResult c;
  c.name = "rank_constant";
  c.samples = static_cast<int>(frames.size());
  c.status = CheckStatus::Pass;
  if (frames.empty()) return c;
  const int r0 = frames.front().rank();
  int lo = r0, hi = r0;
  for (const auto& f : frames) {
    lo = std::min(lo, f.rank());
    hi = std::max(hi, f.rank());
    if (f.rank() != r0 && c.passed()) {
      c.status = CheckStatus::Fail;
      c.witness = Witness{f.point, {}};
      c.reason = "not a subimmersion on this box: rank " + std::to_string(f.rank()) + " at " +
                 describe_point(f.point) + " but " + std::to_string(r0) + " at " +
                 describe_point(frames.front().point);
    }
  }
  c.residual = hi - lo;
  c.values = {{"rank", r0}, {"rank_min", lo}, {"rank_max", hi}};
  return c;
}

CheckResult is_riemannian_map(std::span<const PointFrame> frames, double tol) {
  MaxResidual worst;
  for (const auto& f : frames) {
    const int r = f.rank();
    if (r == 0) {
      worst.observe(0.0, f.point);
      continue;
    }
    const Eigen::MatrixXd pushed = f.jacobian * f.split.horizontal.columns;
    const Eigen::MatrixXd gram = pushed.transpose() * f.g2.gram() * pushed;
    worst.observe((gram - Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff(), f.point);
  }
  CheckResult c = worst.finish("riemannian_map", tol);
  CheckResult rank = check_rank_constant(frames);
  if (rank.failed()) {
    c.status = CheckStatus::Fail;
    c.reason = rank.reason;
  }
  c.values = rank.values;
  c.parts.push_back(std::move(rank));
  return c;
}

CheckResult check_sff_range_perp(std::span<const PointFrame> frames, int dirs, double tol, std::uint64_t seed) {
  MaxResidual worst;
  for (std::size_t idx = 0; idx < frames.size(); ++idx) {
    const PointFrame& f = frames[idx];
    const SubspaceBasis& h = f.split.horizontal;
    if (h.size() == 0) continue;
    auto observe = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
      const Eigen::VectorXd tangential = project(second_fundamental_form(f, x, y), f.split.range);
      worst.observe(f.g2.norm(tangential), f.point, {{"X", x}, {"Y", y}});
    };
    for (int a = 0; a < h.size(); ++a)
      for (int b = a; b < h.size(); ++b) observe(h[a], h[b]);
    Sampler rng = direction_sampler(seed, 0x7366665f7270ULL, idx);
    for (int d = 0; d < dirs; ++d) {
      const Eigen::VectorXd x = rng.unit_vector_in(h);
      const Eigen::VectorXd y = rng.unit_vector_in(h);
      observe(x, y);
    }
  }
  return worst.finish("sff_range_perp", tol);
}

CheckResult check_tension_split(std::span<const PointFrame> frames, double tol) {
  MaxResidual worst;
  for (const auto& f : frames) {
    Eigen::VectorXd parts = Eigen::VectorXd::Zero(f.jacobian.rows());
    if (f.split.kernel.size() > 0) parts += fiber_mean_curvature(f);
    for (int a = 0; a < f.split.horizontal.size(); ++a)
      parts += second_fundamental_form(f, f.split.horizontal[a], f.split.horizontal[a]);
    worst.observe(f.g2.norm(tension_field(f) - parts), f.point);
  }
  return worst.finish("tension_split", tol);
}

CheckResult check_totally_geodesic(const MapSpec& map, std::span<const PointFrame> frames,
                                   const AnalysisOptions& options, const TotallyGeodesicContext& context) {
  const double tol = options.tol.check;
  MaxResidual definition, fibers, horizontal, normal;

  for (const auto& f : frames) {
    const SubspaceBasis& ker = f.split.kernel;
    const SubspaceBasis& hor = f.split.horizontal;

    // Definition: Frobenius norm of (nabla F*) in an orthonormal frame of T_p M1.
    double total = 0.0, largest = -1.0;
    Eigen::VectorXd wx, wy;
    std::vector<Eigen::VectorXd> basis;
    for (int i = 0; i < ker.size(); ++i) basis.push_back(ker[i]);
    for (int i = 0; i < hor.size(); ++i) basis.push_back(hor[i]);
    for (const auto& x : basis)
      for (const auto& y : basis) {
        const double r = f.g2.norm(second_fundamental_form(f, x, y));
        total += r * r;
        if (r > largest) {
          largest = r;
          wx = x;
          wy = y;
        }
      }
    definition.observe(std::sqrt(total), f.point, {{"X", wx}, {"Y", wy}});

    // Fibers: g1(nabla_U W, Y) with W extended as a vertical field.
    if (ker.size() > 0 && hor.size() > 0) {
      double sum = 0.0;
      for (int a = 0; a < ker.size(); ++a) {
        const CurveFrames curve = curve_frames(map, f, ker[a], options.step);
        for (int b = 0; b < ker.size(); ++b) {
          const Eigen::VectorXd w0 = ker[b];
          const Eigen::VectorXd dw = source_derivative(f, curve, [&](const PointFrame& q) -> Eigen::VectorXd {
            return q.vertical_projector() * w0;
          });
          for (int c = 0; c < hor.size(); ++c) sum += std::pow(f.g1(dw, hor[c]), 2);
        }
      }
      fibers.observe(std::sqrt(sum), f.point);
    } else {
      fibers.observe(0.0, f.point);
    }

    // Horizontal distribution: g1(nabla_X Y, W) with Y extended as a horizontal field.
    if (ker.size() > 0 && hor.size() > 0) {
      double sum = 0.0;
      for (int a = 0; a < hor.size(); ++a) {
        const CurveFrames curve = curve_frames(map, f, hor[a], options.step);
        for (int b = 0; b < hor.size(); ++b) {
          const Eigen::VectorXd y0 = hor[b];
          const Eigen::VectorXd dy = source_derivative(f, curve, [&](const PointFrame& q) -> Eigen::VectorXd {
            return q.horizontal_projector() * y0;
          });
          for (int c = 0; c < ker.size(); ++c) sum += std::pow(f.g1(dy, ker[c]), 2);
        }
      }
      horizontal.observe(std::sqrt(sum), f.point);
    } else {
      horizontal.observe(0.0, f.point);
    }
    if (context.normal_condition_applies) normal.observe(normal_condition_residual(map, f, options.step), f.point);
  }

  CheckResult def = definition.finish("definition", tol);
  CheckResult fib = fibers.finish("fibers_totally_geodesic", tol);
  CheckResult hor = horizontal.finish("horizontal_totally_geodesic", tol);
  CheckResult nor = context.normal_condition_applies
                        ? normal.finish("normal_condition", tol)
                        : CheckResult::skip("normal_condition", "requires a slant map into a Kaehler target");

  CheckResult out;
  out.name = "totally_geodesic";
  out.status = def.status;
  out.residual = def.residual;
  out.tol = tol;
  out.samples = def.samples;
  out.witness = def.witness;
  if (!nor.skipped()) {
    const bool joint = fib.passed() && hor.passed() && nor.passed();
    out.values.emplace_back("conditions_agree", joint == def.passed() ? 1.0 : 0.0);
  }
  out.parts = {std::move(def), std::move(fib), std::move(hor), std::move(nor)};
  return out;
}

}  // namespace slantmap
