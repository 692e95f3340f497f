#include <doctest.h>

#include <cmath>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "slantmap/map_analysis.hpp"
#include "slantmap/sampling.hpp"

using namespace slantmap;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd pt(std::initializer_list<double> xs) {
  VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

std::vector<PointFrame> frames_of(const MapSpec& map, int count, std::uint64_t seed) {
  const auto pts = sample_points(map.domain, count, seed);
  return evaluate_frames(map, pts, 1e-8);
}

}  // namespace

TEST_CASE("map spec validation") {
  CHECK_THROWS_AS(MapSpec(ChartManifold::euclidean(2), ChartManifold::euclidean(3), fixture::components({"x1", "x2"}, 2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(MapSpec(ChartManifold::euclidean(1), ChartManifold::euclidean(1), fixture::components({"x2"}, 2)),
                  std::invalid_argument);
}

TEST_CASE("second fundamental form of the parabola at the origin") {
  const MapSpec m = fixture::parabola();
  const VectorXd b = second_fundamental_form(m, pt({0.0}), pt({1.0}), pt({1.0}));
  CHECK(b[0] == doctest::Approx(0.0));
  CHECK(b[1] == doctest::Approx(2.0));
  const VectorXd tau = tension_field(evaluate_frame(m, pt({0.0}), 1e-8));
  CHECK((tau - pt({0.0, 2.0})).norm() < 1e-12);
}

TEST_CASE("second fundamental form agrees with the finite-difference oracle") {
  const std::vector<MapSpec> maps = {fixture::catalog("curved_target"), fixture::catalog("warped_fiber"),
                                     fixture::catalog("example4"),      fixture::twisted(),
                                     fixture::parabola(),               fixture::catalog("nonslant")};
  oracle::Gen g(2718);
  for (const auto& m : maps) {
    for (int t = 0; t < 8; ++t) {
      const VectorXd p = g.vector(m.source_dim()) * 0.8;
      const VectorXd x = g.vector(m.source_dim()), y = g.vector(m.source_dim());
      const PointFrame f = evaluate_frame(m, p, 1e-8);
      const VectorXd lib = second_fundamental_form(f, x, y);
      CHECK(oracle::rel_err(lib, oracle::fd_sff(m, p, x, y)) < 1e-6);
      CHECK((lib - second_fundamental_form(f, y, x)).norm() <= 1e-14 * std::max(1.0, lib.norm()));
    }
  }
}

TEST_CASE("SFF equals the pullback derivative of F* Y minus F* of the source derivative") {
  const MapSpec m = fixture::catalog("curved_target");
  oracle::Gen g(17);
  for (int t = 0; t < 10; ++t) {
    const PointFrame f = evaluate_frame(m, g.vector(2) * 0.7, 1e-8);
    const VectorXd x = g.vector(2), y = g.vector(2);
    const CurveFrames curve = curve_frames(m, f, x, 1e-5);
    const VectorXd lhs = pullback_derivative(f, curve, [&](const PointFrame& q) -> VectorXd { return q.push(y); });
    const VectorXd dy = source_derivative(f, curve, [&](const PointFrame&) -> VectorXd { return y; });
    CHECK((lhs - f.push(dy) - second_fundamental_form(f, x, y)).norm() < 1e-8);
  }
}

TEST_CASE("tension field is the g1 trace of the oracle SFF") {
  const std::vector<MapSpec> maps = {fixture::catalog("warped_fiber"), fixture::twisted(),
                                     fixture::catalog("curved_target")};
  oracle::Gen g(3);
  for (const auto& m : maps) {
    const int n = m.source_dim();
    const VectorXd p = g.vector(n) * 0.6;
    const MatrixXd ginv = oracle::metric_values(m.source, p).inverse();
    VectorXd tau = VectorXd::Zero(m.target_dim());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) tau += ginv(i, j) * oracle::fd_sff(m, p, VectorXd::Unit(n, i), VectorXd::Unit(n, j));
    CHECK(oracle::rel_err(tension_field(evaluate_frame(m, p, 1e-8)), tau) < 1e-6);
  }
}

TEST_CASE("Riemannian map check") {
  CHECK(is_riemannian_map(frames_of(fixture::catalog("identity2"), 10, 1), 1e-10).passed());
  CHECK(is_riemannian_map(frames_of(fixture::catalog("warped_fiber"), 10, 1), 1e-10).passed());
  CHECK(is_riemannian_map(frames_of(fixture::twisted(), 10, 1), 1e-10).passed());
  CHECK(is_riemannian_map(frames_of(fixture::catalog("compose_slant"), 10, 1), 1e-10).passed());
  const CheckResult dil = is_riemannian_map(frames_of(fixture::dilation(), 10, 1), 1e-10);
  CHECK(dil.failed());
  CHECK(dil.residual == doctest::Approx(3.0));
}

TEST_CASE("rank changes are reported as a failure with a witness") {
  const MapSpec fold(ChartManifold::euclidean(2), ChartManifold::euclidean(2),
                     fixture::components({"pow(x1, 2)", "x2"}, 2));
  const std::vector<VectorXd> pts = {pt({0.5, 0.1}), pt({0.0, 0.3}), pt({-0.2, 0.4})};
  const auto frames = evaluate_frames(fold, pts, 1e-8);
  const CheckResult r = check_rank_constant(frames);
  CHECK(r.failed());
  CHECK(*r.value("rank_min") == 1.0);
  CHECK(*r.value("rank_max") == 2.0);
  REQUIRE(r.witness.has_value());
  CHECK(r.witness->point == pts[1]);
  CHECK(is_riemannian_map(frames, 1e-8).failed());
}

TEST_CASE("tension splits into fiber and horizontal traces on every catalog map") {
  for (const auto& e : catalog_entries()) {
    const MapSpec m = fixture::catalog(e.id);
    CHECK_MESSAGE(check_tension_split(frames_of(m, 10, 5), 1e-10).passed(), e.id);
  }
}

TEST_CASE("range component of the SFF vanishes for Riemannian maps") {
  for (const char* id : {"example4", "curved_target", "warped_fiber", "compose_slant"}) {
    CHECK_MESSAGE(check_sff_range_perp(frames_of(fixture::catalog(id), 10, 5), 4, 1e-8, 5).passed(), id);
  }
  CHECK(check_sff_range_perp(frames_of(fixture::twisted(), 10, 5), 4, 1e-8, 5).passed());
}

TEST_CASE("S_V is symmetric and matches g2(V, SFF) on the horizontal basis") {
  const MapSpec m = fixture::catalog("curved_target");
  const PointFrame f = evaluate_frame(m, pt({0.3, -0.4}), 1e-8);
  REQUIRE(f.split.range_perp.size() == 2);
  const VectorXd v = f.split.range_perp[0] + 0.5 * f.split.range_perp[1];
  const MatrixXd s = s_v_operator(f, v);
  CHECK((s - s.transpose()).norm() < 1e-14);
  for (int a = 0; a < f.split.horizontal.size(); ++a)
    for (int b = 0; b < f.split.horizontal.size(); ++b)
      CHECK(s(a, b) == doctest::Approx(f.g2(v, second_fundamental_form(f, f.split.horizontal[a], f.split.horizontal[b]))));
  CHECK_THROWS(s_v_operator(f, f.split.range[0]));
}

TEST_CASE("fiber mean curvature") {
  const PointFrame imm = evaluate_frame(fixture::catalog("example4"), pt({0.1, 0.2, 0.3, 0.4}), 1e-8);
  CHECK(fiber_mean_curvature(imm).norm() < 1e-12);
  CHECK_THROWS_AS(fiber_mean_curvature(evaluate_frame(fixture::catalog("identity2"), pt({0.1, 0.2}), 1e-8)),
                  AnalysisError);

  // warped_fiber: the fiber d/dx3 has SFF(v, v) = -F* Gamma1(v, v) with unit v,
  // compared against the oracle SFF.
  const MapSpec w = fixture::catalog("warped_fiber");
  const VectorXd p = pt({0.2, -0.3, 0.5});
  const PointFrame f = evaluate_frame(w, p, 1e-8);
  REQUIRE(f.split.kernel.size() == 1);
  const VectorXd v = f.split.kernel[0];
  CHECK(oracle::rel_err(fiber_mean_curvature(f), oracle::fd_sff(w, p, v, v)) < 1e-6);
  // By hand: g = dx1^2 + dx2^2 + e^{2 x1} (dx3 + x1 dx2)^2 gives
  // Gamma(d3, d3) = -e^{2 x1} d1, so with v = e^{-x1} d3 the fiber term is
  // -F*(nabla_v v) = F* d1 = (1, 0, 0, 0) at every point.
  CHECK((fiber_mean_curvature(f) - pt({1, 0, 0, 0})).norm() < 1e-12);
  for (const auto& q : frames_of(fixture::catalog("compose_slant(0.3)"), 5, 1))
    CHECK(fiber_mean_curvature(q).norm() < 1e-12);
}

TEST_CASE("direction streams depend only on seed, stream and point index") {
  Sampler a = direction_sampler(42, 7, 3);
  Sampler b = direction_sampler(42, 7, 3);
  Sampler c = direction_sampler(42, 7, 4);
  const double x = a.uniform();
  CHECK(x == b.uniform());
  CHECK(x != c.uniform());
  CHECK(sample_points(Box::cube(3), 5, 9) == sample_points(Box::cube(3), 5, 9));
}

TEST_CASE("totally geodesic: flat identity and linear slant maps") {
  AnalysisOptions opt;
  for (const char* id : {"identity2", "compose_slant", "example4"}) {
    const MapSpec m = fixture::catalog(id);
    const CheckResult tg = check_totally_geodesic(m, frames_of(m, 10, 2), opt, {true});
    CHECK_MESSAGE(tg.passed(), id);
    for (const auto& p : tg.parts) CHECK_MESSAGE(p.passed(), id << " " << p.name);
    CHECK(*tg.value("conditions_agree") == 1.0);
  }
}

TEST_CASE("totally geodesic: twisted source fails only through the horizontal distribution") {
  const MapSpec m = fixture::twisted();
  AnalysisOptions opt;
  const CheckResult tg = check_totally_geodesic(m, frames_of(m, 10, 2), opt, {true});
  CHECK(tg.failed());
  CHECK(tg.part("definition")->failed());
  CHECK(tg.part("fibers_totally_geodesic")->passed());
  CHECK(tg.part("horizontal_totally_geodesic")->failed());
  CHECK(tg.part("normal_condition")->passed());
  CHECK(*tg.value("conditions_agree") == 1.0);
}

TEST_CASE("totally geodesic: warped fiber fails the fiber and horizontal conditions") {
  const MapSpec m = fixture::catalog("warped_fiber");
  AnalysisOptions opt;
  const CheckResult tg = check_totally_geodesic(m, frames_of(m, 10, 2), opt, {true});
  CHECK(tg.failed());
  CHECK(tg.part("fibers_totally_geodesic")->failed());
  CHECK(tg.part("horizontal_totally_geodesic")->failed());
  CHECK(tg.part("normal_condition")->passed());
  CHECK(*tg.value("conditions_agree") == 1.0);

  const CheckResult no_normal = check_totally_geodesic(m, frames_of(m, 3, 2), opt, {false});
  CHECK(no_normal.part("normal_condition")->skipped());
  CHECK_FALSE(no_normal.value("conditions_agree").has_value());
}
