#include "slantmap/slant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace slantmap {

namespace {

constexpr double kHalfPi = 1.5707963267948966;

constexpr std::uint64_t kAngleStream = 0x616e676c65ULL;
constexpr std::uint64_t kPairStream = 0x7061697273ULL;
constexpr std::uint64_t kGramStream = 0x6772616d73ULL;
constexpr std::uint64_t kQRelationStream = 0x71726c74ULL;

Eigen::VectorXd omega_push(const PointFrame& q, const Eigen::VectorXd& y) {
  return q.perp_projector() * (q.j() * q.push(y));
}

Eigen::VectorXd phi_push(const PointFrame& q, const Eigen::VectorXd& y) {
  return q.range_projector() * (q.j() * q.push(y));
}

double max_abs(const Eigen::MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

const char* to_string(SlantClass c) {
  switch (c) {
    case SlantClass::Invariant: return "invariant";
    case SlantClass::AntiInvariant: return "anti_invariant";
    case SlantClass::ProperSlant: return "proper_slant";
    case SlantClass::NotSlant: return "not_slant";
    case SlantClass::NotRiemannian: return "not_riemannian";
  }
  return "unknown";
}

PointOperators point_operators(const PointFrame& frame, std::optional<double> theta) {
  const Eigen::MatrixXd& j = frame.j();
  const Eigen::MatrixXd& r = frame.split.range.columns;
  const Eigen::MatrixXd& n = frame.split.range_perp.columns;
  const Eigen::MatrixXd gj = frame.g2.gram() * j;
  PointOperators ops;
  ops.phi = r.transpose() * gj * r;
  ops.omega = n.transpose() * gj * r;
  ops.b = r.transpose() * gj * n;
  ops.c = n.transpose() * gj * n;
  ops.q = q_operator(frame);
  if (theta && std::cos(*theta) > 1e-8) {
    const double sec = 1.0 / std::cos(*theta);
    ops.j_tilde = sec * ops.phi;
    ops.j_hat = sec * ops.q;
  }
  return ops;
}

Decomposition phi_omega_decompose(const PointFrame& frame, const Eigen::VectorXd& x) {
  const Eigen::VectorXd jx = frame.j() * frame.push(x);
  Eigen::VectorXd t = project(jx, frame.split.range);
  Eigen::VectorXd nrm = jx - t;
  return {std::move(t), std::move(nrm)};
}

Decomposition bc_decompose(const PointFrame& frame, const Eigen::VectorXd& v, double tol) {
  const double vn = frame.g2.norm(v);
  if (frame.g2.norm(project(v, frame.split.range)) > tol * std::max(1.0, vn))
    throw std::invalid_argument("bc_decompose: V is not orthogonal to range F*");
  const Eigen::VectorXd jv = frame.j() * v;
  Eigen::VectorXd t = project(jv, frame.split.range);
  Eigen::VectorXd nrm = jv - t;
  return {std::move(t), std::move(nrm)};
}

double slant_angle(const PointFrame& frame, const Eigen::VectorXd& x) {
  const Eigen::VectorXd fx = frame.push(x);
  const double len = frame.g2.norm(fx);
  if (!(len > frame.rank_tol * std::max(1.0, frame.g1.norm(x))))
    throw AnalysisError("slant angle: X lies in ker F* at " + describe_point(frame.point));
  const Decomposition d = phi_omega_decompose(frame, x);
  return std::atan2(frame.g2.norm(d.normal), frame.g2.norm(d.tangential));
}

Eigen::MatrixXd q_operator_coordinates(const PointFrame& frame) {
  return metric_adjoint(frame.jacobian, frame.g1, frame.g2) * frame.range_projector() * frame.j() *
         frame.jacobian;
}

Eigen::MatrixXd q_operator(const PointFrame& frame) {
  const Eigen::MatrixXd& h = frame.split.horizontal.columns;
  return h.transpose() * frame.g1.gram() * q_operator_coordinates(frame) * h;
}

std::vector<Eigen::VectorXd> adapted_frame(const PointFrame& frame, double theta) {
  const double c = std::cos(theta);
  if (!(c > 1e-8)) throw AnalysisError("Q vanishes, no adapted frame");
  const int r = frame.rank();
  if (r % 2 != 0)
    throw AnalysisError("horizontal space has odd dimension " + std::to_string(r) + ", no adapted frame");
  const Eigen::MatrixXd jhat = q_operator(frame) / c;

  std::vector<Eigen::VectorXd> coords;
  for (int k = 0; k < r && static_cast<int>(coords.size()) < r; ++k) {
    Eigen::VectorXd e = Eigen::VectorXd::Unit(r, k);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& prev : coords) e -= prev.dot(e) * prev;
    const double len = e.norm();
    if (len < 1e-3) continue;
    e /= len;
    Eigen::VectorXd je = jhat * e;
    coords.push_back(std::move(e));
    coords.push_back(std::move(je));
  }
  if (static_cast<int>(coords.size()) != r)
    throw AnalysisError("horizontal space does not split into Q-planes at " + describe_point(frame.point));

  std::vector<Eigen::VectorXd> out;
  out.reserve(coords.size());
  for (const auto& v : coords) out.push_back(frame.split.horizontal.columns * v);
  return out;
}

ParallelDefect omega_parallel_defect(const MapSpec& map, const PointFrame& frame, const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& y, double step) {
  return omega_parallel_defect(map, frame, curve_frames(map, frame, x, step), y);
}

ParallelDefect omega_parallel_defect(const MapSpec&, const PointFrame& frame, const CurveFrames& curve,
                                     const Eigen::VectorXd& y) {
  const Eigen::VectorXd& x = curve.direction;
  const Eigen::MatrixXd pp = frame.perp_projector();
  const Eigen::VectorXd along =
      pp * pullback_derivative(frame, curve, [&](const PointFrame& q) -> Eigen::VectorXd { return omega_push(q, y); });
  const Eigen::VectorXd nabla_xy = frame.gamma1.contract(x, y);
  ParallelDefect out;
  out.defect = along - omega_push(frame, nabla_xy);
  out.reference = pp * (frame.j() * second_fundamental_form(frame, x, y)) -
                  second_fundamental_form(frame, x, q_operator_coordinates(frame) * y);
  return out;
}

ParallelDefect phi_parallel_defect(const MapSpec& map, const PointFrame& frame, const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& y, double step) {
  return phi_parallel_defect(map, frame, curve_frames(map, frame, x, step), y);
}

ParallelDefect phi_parallel_defect(const MapSpec&, const PointFrame& frame, const CurveFrames& curve,
                                   const Eigen::VectorXd& y) {
  const Eigen::VectorXd& x = curve.direction;
  const Eigen::VectorXd nabla_xy = frame.gamma1.contract(x, y);
  const Eigen::VectorXd qy = q_operator_coordinates(frame) * y;

  const Eigen::VectorXd along =
      pullback_derivative(frame, curve, [&](const PointFrame& q) -> Eigen::VectorXd { return phi_push(q, y); });
  const Eigen::VectorXd nabla_qy = source_derivative(
      frame, curve, [&](const PointFrame& q) -> Eigen::VectorXd { return q_operator_coordinates(q) * y; });

  ParallelDefect out;
  out.defect = along - phi_push(frame, nabla_xy) - second_fundamental_form(frame, x, qy);
  out.reference = frame.push(nabla_qy) - phi_push(frame, nabla_xy);
  return out;
}

double normal_condition_residual(const MapSpec& map, const PointFrame& frame, double step) {
  const SubspaceBasis& hor = frame.split.horizontal;
  const SubspaceBasis& perp = frame.split.range_perp;
  if (hor.size() == 0 || perp.size() == 0) return 0.0;
  const Eigen::MatrixXd pr = frame.range_projector();
  const Eigen::MatrixXd pp = frame.perp_projector();
  const Eigen::MatrixXd& j = frame.j();

  double sum = 0.0;
  for (int a = 0; a < hor.size(); ++a) {
    const Eigen::VectorXd x = hor[a];
    const CurveFrames curve = curve_frames(map, frame, x, step);
    for (int b = 0; b < hor.size(); ++b) {
      const Eigen::VectorXd y = hor[b];
      const Eigen::VectorXd w = omega_push(frame, y);
      Eigen::VectorXd shape = Eigen::VectorXd::Zero(w.size());
      for (int c = 0; c < hor.size(); ++c)
        shape += frame.g2(w, second_fundamental_form(frame, x, hor[c])) * frame.split.range[c];
      const Eigen::VectorXd d1 = pp * pullback_derivative(frame, curve, [&](const PointFrame& q) -> Eigen::VectorXd {
                                   return omega_push(q, y);
                                 });
      const Eigen::VectorXd d2 = pp * pullback_derivative(frame, curve, [&](const PointFrame& q) -> Eigen::VectorXd {
                                   return omega_push(q, q_operator_coordinates(q) * y);
                                 });
      for (int k = 0; k < perp.size(); ++k) {
        const Eigen::VectorXd v = perp[k];
        const Eigen::VectorXd jv = j * v;
        const double term = frame.g2(shape, pr * jv) - frame.g2(d1, pp * jv) + frame.g2(d2, v);
        sum += term * term;
      }
    }
  }
  return std::sqrt(sum);
}

bool SlantReport::is_slant() const {
  return classification == SlantClass::Invariant || classification == SlantClass::AntiInvariant ||
         classification == SlantClass::ProperSlant;
}

bool SlantReport::sec_defined() const {
  return classification == SlantClass::Invariant || classification == SlantClass::ProperSlant;
}

const CheckResult* SlantReport::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

const std::vector<std::string>& slant_check_names() {
  static const std::vector<std::string> names = {
      "slant",           "phi_squared_scalar",         "q_squared_scalar", "block_identities",
      "gram_identities", "adapted_frame",              "normal_derivative_identity",
      "phi_derivative_routes", "sff_q_relation",     "harmonic_iff_minimal_fibers",
      "phwc",            "pseudo_homothetic"};
  return names;
}

struct PairSweep {
  MaxResidual omega_defect, omega_identity, phi_defect, phi_routes;
  MaxResidual jhat_definition, range_identity, kernel_identity;
};

}  // namespace

SlantReport classify_slant(const MapSpec& map, std::span<const PointFrame> frames, const AnalysisOptions& options,
                           const CheckResult& riemannian, const TargetStructure& target) {
  if (!map.target.has_complex_structure())
    throw ConfigurationError("slant analysis needs a target with an almost complex structure");

  SlantReport rep;
  const double tol = options.tol.check;
  const double angle_tol = options.tol.angle;

  if (!riemannian.passed()) {
    rep.classification = SlantClass::NotRiemannian;
    rep.reason = riemannian.reason.empty() ? "not a Riemannian map" : riemannian.reason;
    for (const auto& n : slant_check_names()) rep.checks.push_back(CheckResult::skip(n, "not a Riemannian map"));
    return rep;
  }

  // Angle samples: the horizontal basis plus random unit directions.
  std::vector<std::vector<Eigen::VectorXd>> directions(frames.size());
  std::vector<double> all;
  for (std::size_t idx = 0; idx < frames.size(); ++idx) {
    const PointFrame& f = frames[idx];
    const SubspaceBasis& h = f.split.horizontal;
    std::vector<double> thetas;
    if (h.size() > 0) {
      Sampler rng = direction_sampler(options.seed, kAngleStream, idx);
      for (int a = 0; a < h.size(); ++a) directions[idx].push_back(h[a]);
      for (int d = 0; d < options.dirs; ++d) directions[idx].push_back(rng.unit_vector_in(h));
      for (const auto& x : directions[idx]) thetas.push_back(slant_angle(f, x));
    }
    all.insert(all.end(), thetas.begin(), thetas.end());
    rep.angles.push_back(std::move(thetas));
  }

  if (all.empty()) {
    rep.classification = SlantClass::NotSlant;
    rep.reason = "no horizontal directions";
    for (const auto& n : slant_check_names()) rep.checks.push_back(CheckResult::skip(n, "no horizontal directions"));
    return rep;
  }

  std::vector<double> sorted = all;
  std::sort(sorted.begin(), sorted.end());
  double total = 0.0;
  for (double t : sorted) total += t;
  rep.mean_angle = total / static_cast<double>(sorted.size());

  rep.max_deviation = -1.0;
  for (std::size_t idx = 0; idx < frames.size(); ++idx)
    for (std::size_t k = 0; k < rep.angles[idx].size(); ++k) {
      const double dev = std::abs(rep.angles[idx][k] - rep.mean_angle);
      if (dev > rep.max_deviation) {
        rep.max_deviation = dev;
        rep.deviation_witness = Witness{frames[idx].point, {{"X", directions[idx][k]}}};
      }
    }

  if (rep.max_deviation > angle_tol) {
    rep.classification = SlantClass::NotSlant;
    rep.reason = "slant angle varies by " + std::to_string(rep.max_deviation) + " rad";
  } else if (rep.mean_angle <= angle_tol) {
    rep.classification = SlantClass::Invariant;
  } else if (rep.mean_angle >= kHalfPi - angle_tol) {
    rep.classification = SlantClass::AntiInvariant;
  } else {
    rep.classification = SlantClass::ProperSlant;
  }

  {
    CheckResult c;
    c.name = "slant";
    c.status = rep.is_slant() ? CheckStatus::Pass : CheckStatus::Fail;
    c.residual = rep.max_deviation;
    c.tol = angle_tol;
    c.samples = static_cast<int>(all.size());
    c.reason = rep.reason;
    if (!rep.is_slant()) c.witness = rep.deviation_witness;
    c.values = {{"mean_angle", rep.mean_angle}};
    rep.checks.push_back(std::move(c));
  }

  const double cos2 = std::pow(std::cos(rep.mean_angle), 2);
  const double sin2 = std::pow(std::sin(rep.mean_angle), 2);

  // phi^2 = lambda on range F* and Q^2 = mu on the horizontal space, fitted
  // by least squares over the angle directions.
  {
    double lnum = 0.0, lden = 0.0, mnum = 0.0, mden = 0.0;
    std::vector<Eigen::MatrixXd> qcs;
    for (std::size_t idx = 0; idx < frames.size(); ++idx) {
      const PointFrame& f = frames[idx];
      qcs.push_back(q_operator_coordinates(f));
      for (const auto& x : directions[idx]) {
        const Eigen::VectorXd w = f.push(x);
        const Eigen::VectorXd phi2 = phi_push(f, qcs.back() * x);
        lnum += f.g2(phi2, w);
        lden += f.g2(w, w);
        const Eigen::VectorXd q2 = qcs.back() * (qcs.back() * x);
        mnum += f.g1(q2, x);
        mden += f.g1(x, x);
      }
    }
    rep.lambda = lnum / lden;
    rep.mu = mnum / mden;
    MaxResidual lres, mres;
    for (std::size_t idx = 0; idx < frames.size(); ++idx) {
      const PointFrame& f = frames[idx];
      for (const auto& x : directions[idx]) {
        const Eigen::VectorXd w = f.push(x);
        const Eigen::VectorXd phi2 = phi_push(f, qcs[idx] * x);
        lres.observe(f.g2.norm(phi2 - rep.lambda * w) / f.g2.norm(w), f.point, {{"X", x}});
        const Eigen::VectorXd q2 = qcs[idx] * (qcs[idx] * x);
        mres.observe(f.g1.norm(q2 - rep.mu * x) / f.g1.norm(x), f.point, {{"X", x}});
      }
    }
    rep.lambda_residual = lres.value();
    rep.mu_residual = mres.value();

    CheckResult lc = lres.finish("phi_squared_scalar", tol);
    if (lc.passed() && !(rep.lambda >= -1.0 - tol && rep.lambda <= tol)) {
      lc.status = CheckStatus::Fail;
      lc.reason = "lambda outside [-1, 0]";
    }
    lc.values = {{"lambda", rep.lambda}, {"minus_cos2_mean_angle", -cos2}, {"gap", std::abs(rep.lambda + cos2)}};
    rep.checks.push_back(std::move(lc));

    CheckResult mc = mres.finish("q_squared_scalar", tol);
    mc.values = {{"mu", rep.mu}, {"minus_cos2_mean_angle", -cos2}, {"lambda_mu_gap", std::abs(rep.lambda - rep.mu)}};
    rep.checks.push_back(std::move(mc));
  }

  if (target.almost_hermitian) {
    MaxResidual worst;
    for (const auto& f : frames) {
      const PointOperators ops = point_operators(f);
      const int r = f.rank();
      double res = 0.0;
      res = std::max(res, max_abs(ops.phi + ops.phi.transpose()));
      res = std::max(res, max_abs(ops.c + ops.c.transpose()));
      res = std::max(res, max_abs(ops.b + ops.omega.transpose()));
      res = std::max(res, max_abs(ops.phi * ops.phi + ops.b * ops.omega + Eigen::MatrixXd::Identity(r, r)));
      res = std::max(res, max_abs(ops.omega * ops.phi + ops.c * ops.omega));
      res = std::max(res, max_abs(ops.q + ops.q.transpose()));
      worst.observe(res, f.point);
    }
    rep.checks.push_back(worst.finish("block_identities", tol));
  } else {
    rep.checks.push_back(CheckResult::skip("block_identities", "target is not almost Hermitian"));
  }

  if (rep.is_slant()) {
    MaxResidual worst;
    for (std::size_t idx = 0; idx < frames.size(); ++idx) {
      const PointFrame& f = frames[idx];
      Sampler rng = direction_sampler(options.seed, kGramStream, idx);
      for (int d = 0; d < options.dirs; ++d) {
        const Eigen::VectorXd x = rng.unit_vector_in(f.split.horizontal);
        const Eigen::VectorXd y = rng.unit_vector_in(f.split.horizontal);
        const Decomposition dx = phi_omega_decompose(f, x);
        const Decomposition dy = phi_omega_decompose(f, y);
        const double g = f.g1(x, y);
        const double r1 = std::abs(f.g2(dx.tangential, dy.tangential) - cos2 * g);
        const double r2 = std::abs(f.g2(dx.normal, dy.normal) - sin2 * g);
        worst.observe(std::max(r1, r2), f.point, {{"X", x}, {"Y", y}});
      }
    }
    rep.checks.push_back(worst.finish("gram_identities", tol));
  } else {
    rep.checks.push_back(CheckResult::skip("gram_identities", "map is not slant"));
  }

  if (rep.sec_defined()) {
    MaxResidual worst;
    const double sec = 1.0 / std::cos(rep.mean_angle);
    for (const auto& f : frames) {
      try {
        const std::vector<Eigen::VectorXd> e = adapted_frame(f, rep.mean_angle);
        const Eigen::MatrixXd qc = q_operator_coordinates(f);
        double res = 0.0;
        for (std::size_t a = 0; a < e.size(); ++a) {
          for (std::size_t b = 0; b < e.size(); ++b)
            res = std::max(res, std::abs(f.g1(e[a], e[b]) - (a == b ? 1.0 : 0.0)));
          if (a % 2 == 1) res = std::max(res, f.g1.norm(sec * (qc * e[a]) + e[a - 1]));
        }
        worst.observe(res, f.point);
      } catch (const AnalysisError&) {
        worst.observe(std::numeric_limits<double>::infinity(), f.point);
      }
    }
    rep.checks.push_back(worst.finish("adapted_frame", tol));
  } else {
    rep.checks.push_back(CheckResult::skip(
        "adapted_frame", rep.classification == SlantClass::AntiInvariant ? "Q vanishes, no adapted frame"
                                                                           : "map is not slant"));
  }

  // Connection-dependent quantities on random horizontal pairs.
  PairSweep sweep;
  MaxResidual mixed;
  const std::optional<double> sec =
      rep.sec_defined() ? std::optional<double>(1.0 / std::cos(rep.mean_angle)) : std::nullopt;
  for (std::size_t idx = 0; idx < frames.size(); ++idx) {
    const PointFrame& f = frames[idx];
    const SubspaceBasis& h = f.split.horizontal;
    const SubspaceBasis& ker = f.split.kernel;
    if (h.size() == 0) continue;

    double msum = 0.0;
    for (int a = 0; a < h.size(); ++a)
      for (int u = 0; u < ker.size(); ++u) msum += std::pow(f.g2.norm(second_fundamental_form(f, h[a], ker[u])), 2);
    mixed.observe(std::sqrt(msum), f.point);

    const Eigen::MatrixXd qc = q_operator_coordinates(f);
    Sampler rng = direction_sampler(options.seed, kPairStream, idx);
    for (int d = 0; d < options.dirs; ++d) {
      const Eigen::VectorXd x = rng.unit_vector_in(h);
      const Eigen::VectorXd y = rng.unit_vector_in(h);
      const CurveFrames curve = curve_frames(map, f, x, options.step);
      const std::vector<std::pair<std::string, Eigen::VectorXd>> w = {{"X", x}, {"Y", y}};

      const ParallelDefect om = omega_parallel_defect(map, f, curve, y);
      sweep.omega_defect.observe(f.g2.norm(om.defect), f.point, w);
      sweep.omega_identity.observe(f.g2.norm(om.defect - om.reference), f.point, w);

      const ParallelDefect ph = phi_parallel_defect(map, f, curve, y);
      sweep.phi_defect.observe(f.g2.norm(ph.defect), f.point, w);
      sweep.phi_routes.observe(f.g2.norm(ph.defect - ph.reference), f.point, w);

      if (sec) {
        // (nabla_X J^)Y = sec(theta) (nabla_X (QY) - Q nabla_X Y)
        const Eigen::VectorXd nqy = source_derivative(
            f, curve, [&](const PointFrame& q) -> Eigen::VectorXd { return q_operator_coordinates(q) * y; });
        const Eigen::VectorXd djy = *sec * (nqy - qc * f.gamma1.contract(x, y));
        sweep.jhat_definition.observe(f.g1.norm(djy), f.point, w);
        sweep.range_identity.observe(f.g2.norm(f.push(djy) - *sec * ph.defect), f.point, w);
        double kres = 0.0;
        const Eigen::VectorXd py = phi_push(f, y);
        for (int u = 0; u < ker.size(); ++u)
          kres = std::max(kres, std::abs(f.g1(djy, ker[u]) -
                                         *sec * f.g2(py, second_fundamental_form(f, x, ker[u]))));
        sweep.kernel_identity.observe(kres, f.point, w);
      }
    }
  }
  rep.omega_defect = sweep.omega_defect.value();
  rep.omega_parallel = rep.omega_defect <= tol;
  rep.phi_defect = sweep.phi_defect.value();
  rep.phi_parallel = rep.phi_defect <= tol;

  if (target.kahler)
    rep.checks.push_back(sweep.omega_identity.finish("normal_derivative_identity", tol));
  else
    rep.checks.push_back(CheckResult::skip("normal_derivative_identity", "target is not Kaehler"));
  rep.checks.push_back(sweep.phi_routes.finish("phi_derivative_routes", tol));

  std::string parallel_gate;
  if (!rep.is_slant())
    parallel_gate = "map is not slant";
  else if (!target.kahler)
    parallel_gate = "target is not Kaehler";
  else if (!rep.omega_parallel)
    parallel_gate = "precondition unmet: omega is not parallel";

  if (parallel_gate.empty()) {
    MaxResidual worst;
    for (std::size_t idx = 0; idx < frames.size(); ++idx) {
      const PointFrame& f = frames[idx];
      if (f.split.horizontal.size() == 0) continue;
      const Eigen::MatrixXd qc = q_operator_coordinates(f);
      Sampler rng = direction_sampler(options.seed, kQRelationStream, idx);
      for (int d = 0; d < options.dirs; ++d) {
        const Eigen::VectorXd x = rng.unit_vector_in(f.split.horizontal);
        const Eigen::VectorXd y = rng.unit_vector_in(f.split.horizontal);
        const Eigen::VectorXd lhs = second_fundamental_form(f, qc * x, qc * y);
        worst.observe(f.g2.norm(lhs + cos2 * second_fundamental_form(f, x, y)), f.point, {{"X", x}, {"Y", y}});
      }
    }
    rep.checks.push_back(worst.finish("sff_q_relation", tol));
  } else {
    rep.checks.push_back(CheckResult::skip("sff_q_relation", parallel_gate));
  }

  std::string harmonic_gate = parallel_gate;
  if (harmonic_gate.empty() && !rep.sec_defined()) harmonic_gate = "needs slant angle below pi/2";
  if (harmonic_gate.empty()) {
    double tau_max = 0.0, mean_max = 0.0;
    MaxResidual diff;
    for (const auto& f : frames) {
      const Eigen::VectorXd tau = tension_field(f);
      const Eigen::VectorXd mean =
          f.split.kernel.size() > 0 ? fiber_mean_curvature(f) : Eigen::VectorXd::Zero(tau.size());
      tau_max = std::max(tau_max, f.g2.norm(tau));
      mean_max = std::max(mean_max, f.g2.norm(mean));
      diff.observe(f.g2.norm(tau - mean), f.point);
    }
    CheckResult c = diff.finish("harmonic_iff_minimal_fibers", tol);
    const bool harmonic = tau_max <= tol;
    const bool minimal = mean_max <= tol;
    if (harmonic != minimal) {
      c.status = CheckStatus::Fail;
      c.reason = harmonic ? "harmonic but fibers are not minimal" : "fibers are minimal but map is not harmonic";
    }
    c.values = {{"tension_max", tau_max}, {"fiber_mean_curvature_max", mean_max},
                {"harmonic", harmonic ? 1.0 : 0.0}, {"minimal_fibers", minimal ? 1.0 : 0.0}};
    rep.checks.push_back(std::move(c));
  } else {
    rep.checks.push_back(CheckResult::skip("harmonic_iff_minimal_fibers", harmonic_gate));
  }

  if (sec) {
    MaxResidual square, hermitian;
    for (const auto& f : frames) {
      const Eigen::MatrixXd jh = *sec * q_operator(f);
      const Eigen::Index r = jh.rows();
      square.observe(max_abs(jh * jh + Eigen::MatrixXd::Identity(r, r)), f.point);
      hermitian.observe(max_abs(jh.transpose() * jh - Eigen::MatrixXd::Identity(r, r)), f.point);
    }
    CheckResult sq = square.finish("j_hat_squared", tol);
    CheckResult he = hermitian.finish("hermitian_metric", tol);
    CheckResult c;
    c.name = "phwc";
    c.status = sq.passed() && he.passed() ? CheckStatus::Pass : CheckStatus::Fail;
    c.residual = std::max(sq.residual, he.residual);
    c.tol = tol;
    c.samples = sq.samples;
    c.witness = sq.failed() ? sq.witness : he.witness;
    c.parts = {std::move(sq), std::move(he)};
    rep.phwc = c.passed();
    rep.checks.push_back(std::move(c));
  } else {
    rep.checks.push_back(CheckResult::skip(
        "phwc", rep.classification == SlantClass::AntiInvariant ? "J-hat undefined: slant angle is pi/2"
                                                                 : "map is not slant"));
  }

  if (rep.phwc) {
    CheckResult phi = sweep.phi_defect.finish("phi_parallel", tol);
    CheckResult mix = mixed.finish("mixed_sff", tol);
    CheckResult ri = sweep.range_identity.finish("range_identity", tol);
    CheckResult ki = sweep.kernel_identity.finish("kernel_identity", tol);
    CheckResult c;
    c.name = "pseudo_homothetic";
    c.status = phi.passed() && mix.passed() ? CheckStatus::Pass : CheckStatus::Fail;
    c.residual = std::max(phi.residual, mix.residual);
    c.tol = tol;
    c.samples = phi.samples;
    c.witness = phi.failed() ? phi.witness : mix.witness;
    if (ri.failed() || ki.failed()) {
      c.status = CheckStatus::Fail;
      c.reason = "derivative of J-hat disagrees with its expression through the second fundamental form";
    }
    const double definition = sweep.jhat_definition.value();
    c.values = {{"j_hat_derivative_max", definition},
                {"definition_agrees", (definition <= tol) == (phi.passed() && mix.passed()) ? 1.0 : 0.0}};
    c.parts = {std::move(phi), std::move(mix), std::move(ri), std::move(ki)};
    rep.pseudo_homothetic = c.passed();
    rep.checks.push_back(std::move(c));
  } else {
    rep.checks.push_back(CheckResult::skip("pseudo_homothetic", "requires a PHWC map"));
  }

  return rep;
}

}  // namespace slantmap
