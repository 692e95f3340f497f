#include "slantmap/report.hpp"

#include <cmath>
#include <cstdio>

namespace slantmap {

namespace {

using nlohmann::ordered_json;

constexpr std::uint64_t kKahlerStream = 0x6b61686c6572ULL;

ordered_json vector_json(const Eigen::VectorXd& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

CheckResult norm_check(std::string name, std::span<const PointFrame> frames,
                       Eigen::VectorXd (*field)(const PointFrame&), double tol) {
  MaxResidual worst;
  for (const auto& f : frames) worst.observe(f.g2.norm(field(f)), f.point);
  return worst.finish(std::move(name), tol);
}

Eigen::VectorXd fiber_mean_or_zero(const PointFrame& f) {
  if (f.split.kernel.size() == 0) return Eigen::VectorXd::Zero(f.jacobian.rows());
  return fiber_mean_curvature(f);
}

void write_double(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

bool is_flat(const ordered_json& j) {
  for (const auto& e : j)
    if (e.is_array() || e.is_object()) return false;
  return true;
}

void write_value(std::string& out, const ordered_json& j, bool pretty, int depth) {
  const auto newline = [&](int d) {
    if (!pretty) return;
    out += '\n';
    out.append(static_cast<std::size_t>(2 * d), ' ');
  };
  switch (j.type()) {
    case ordered_json::value_t::null: out += "null"; break;
    case ordered_json::value_t::boolean: out += j.get<bool>() ? "true" : "false"; break;
    case ordered_json::value_t::number_integer: out += std::to_string(j.get<std::int64_t>()); break;
    case ordered_json::value_t::number_unsigned: out += std::to_string(j.get<std::uint64_t>()); break;
    case ordered_json::value_t::number_float: write_double(out, j.get<double>()); break;
    case ordered_json::value_t::string: out += j.dump(); break;
    case ordered_json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        break;
      }
      const bool inline_items = is_flat(j);
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += pretty && inline_items ? ", " : ",";
        first = false;
        if (!inline_items) newline(depth + 1);
        write_value(out, e, pretty, depth + 1);
      }
      if (!inline_items) newline(depth);
      out += ']';
      break;
    }
    case ordered_json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        break;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += ordered_json(it.key()).dump();
        out += pretty ? ": " : ":";
        write_value(out, it.value(), pretty, depth + 1);
      }
      newline(depth);
      out += '}';
      break;
    }
    default: out += "null"; break;
  }
}

}  // namespace

const CheckResult* Report::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

int Report::exit_code() const {
  if (!error.empty()) return 2;
  for (const auto& c : checks)
    if (c.failed()) return 1;
  return 0;
}

Report run_analysis(const MapSpec& map, const AnalysisOptions& options, const std::string& map_id,
                    const std::string& map_name, const std::string& provenance) {
  Report rep;
  rep.map_id = map_id;
  rep.map_name = map_name;
  rep.provenance = provenance;
  rep.source_dim = map.source_dim();
  rep.target_dim = map.target_dim();
  rep.options = options;
  const double tol = options.tol.check;

  try {
    const std::vector<Eigen::VectorXd> points = sample_points(map.domain, options.points, options.seed);
    const std::vector<PointFrame> frames = evaluate_frames(map, points, options.tol.rank);
    for (const auto& f : frames) rep.samples.push_back({f.point, f.rank(), f.split.singular_values});

    TargetStructure target;
    if (map.target.has_complex_structure()) {
      std::vector<Eigen::VectorXd> images;
      for (const auto& f : frames) images.push_back(f.image);
      CheckResult herm = check_almost_hermitian(map.target, images, tol);
      target.almost_hermitian = herm.passed();
      rep.checks.push_back(std::move(herm));
      CheckResult kahler = check_kahler(map.target, images, options.kahler_dirs, tol, mix_seed(options.seed, kKahlerStream));
      target.kahler = target.almost_hermitian && kahler.passed();
      rep.checks.push_back(std::move(kahler));
    } else {
      rep.checks.push_back(CheckResult::skip("almost_hermitian", "target has no almost complex structure"));
      rep.checks.push_back(CheckResult::skip("kahler", "target has no almost complex structure"));
    }

    CheckResult riemannian = is_riemannian_map(frames, tol);
    const bool is_riemannian = riemannian.passed();
    rep.checks.push_back(riemannian);

    if (is_riemannian)
      rep.checks.push_back(check_sff_range_perp(frames, options.dirs, tol, options.seed));
    else
      rep.checks.push_back(CheckResult::skip("sff_range_perp", "not a Riemannian map"));
    rep.checks.push_back(check_tension_split(frames, tol));
    rep.checks.push_back(norm_check("harmonic", frames, tension_field, tol));
    rep.checks.push_back(norm_check("minimal_fibers", frames, fiber_mean_or_zero, tol));

    TotallyGeodesicContext context;
    if (map.target.has_complex_structure()) {
      SlantReport slant = classify_slant(map, frames, options, riemannian, target);
      context.normal_condition_applies = slant.is_slant() && target.kahler;
      for (const auto& c : slant.checks) rep.checks.push_back(c);
      rep.slant = std::move(slant);
    }
    rep.checks.push_back(check_totally_geodesic(map, frames, options, context));
  } catch (const std::exception& e) {
    rep.error = e.what();
  }
  return rep;
}

ordered_json to_json(const CheckResult& c) {
  ordered_json j;
  j["name"] = c.name;
  j["status"] = to_string(c.status);
  if (!c.skipped()) {
    j["residual"] = c.residual;
    j["tol"] = c.tol;
    j["samples"] = c.samples;
  }
  if (!c.reason.empty()) j["reason"] = c.reason;
  if (!c.values.empty()) {
    ordered_json v = ordered_json::object();
    for (const auto& [k, x] : c.values) v[k] = x;
    j["values"] = std::move(v);
  }
  if (c.witness) {
    ordered_json w;
    w["point"] = vector_json(c.witness->point);
    for (const auto& [k, x] : c.witness->vectors) w[k] = vector_json(x);
    j["witness"] = std::move(w);
  }
  if (!c.parts.empty()) {
    ordered_json parts = ordered_json::array();
    for (const auto& p : c.parts) parts.push_back(to_json(p));
    j["parts"] = std::move(parts);
  }
  return j;
}

ordered_json to_json(const Report& r) {
  ordered_json j;
  j["schema"] = "slantmap-report/1";

  ordered_json map;
  map["id"] = r.map_id;
  map["name"] = r.map_name;
  map["provenance"] = r.provenance;
  map["source_dim"] = r.source_dim;
  map["target_dim"] = r.target_dim;
  j["map"] = std::move(map);

  ordered_json opts;
  opts["seed"] = r.options.seed;
  opts["points"] = r.options.points;
  opts["dirs"] = r.options.dirs;
  opts["kahler_dirs"] = r.options.kahler_dirs;
  opts["step"] = r.options.step;
  opts["tolerances"] = {{"check", r.options.tol.check}, {"angle", r.options.tol.angle}, {"rank", r.options.tol.rank}};
  j["options"] = std::move(opts);

  if (!r.error.empty()) j["error"] = r.error;

  if (r.slant) {
    const SlantReport& s = *r.slant;
    ordered_json sj;
    sj["classification"] = to_string(s.classification);
    if (!s.reason.empty()) sj["reason"] = s.reason;
    sj["mean_angle"] = s.mean_angle;
    sj["max_deviation"] = s.max_deviation;
    if (s.deviation_witness) {
      ordered_json w;
      w["point"] = vector_json(s.deviation_witness->point);
      for (const auto& [k, x] : s.deviation_witness->vectors) w[k] = vector_json(x);
      sj["deviation_witness"] = std::move(w);
    }
    sj["lambda"] = s.lambda;
    sj["lambda_residual"] = s.lambda_residual;
    sj["mu"] = s.mu;
    sj["mu_residual"] = s.mu_residual;
    sj["omega_parallel"] = s.omega_parallel;
    sj["omega_defect"] = s.omega_defect;
    sj["phi_parallel"] = s.phi_parallel;
    sj["phi_defect"] = s.phi_defect;
    sj["phwc"] = s.phwc;
    sj["pseudo_homothetic"] = s.pseudo_homothetic;
    ordered_json angles = ordered_json::array();
    for (const auto& row : s.angles) angles.push_back(row);
    sj["angles"] = std::move(angles);
    j["slant"] = std::move(sj);
  }

  ordered_json checks = ordered_json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  j["checks"] = std::move(checks);

  ordered_json samples = ordered_json::array();
  for (const auto& s : r.samples)
    samples.push_back({{"point", vector_json(s.point)}, {"rank", s.rank}, {"singular_values", vector_json(s.singular_values)}});
  j["samples"] = std::move(samples);

  int passed = 0, failed = 0, skipped = 0;
  for (const auto& c : r.checks) (c.passed() ? passed : c.failed() ? failed : skipped) += 1;
  j["summary"] = {{"passed", passed}, {"failed", failed}, {"skipped", skipped}, {"exit_code", r.exit_code()}};
  return j;
}

std::string write_json(const ordered_json& doc, bool pretty) {
  std::string out;
  write_value(out, doc, pretty, 0);
  out += '\n';
  return out;
}

}  // namespace slantmap
