#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "slantmap/expr.hpp"

using namespace slantmap;
using Eigen::VectorXd;

namespace {

VectorXd pt(std::initializer_list<double> xs) {
  VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// Random expression over x1..xn that is smooth everywhere.
Expression random_expression(oracle::Gen& g, int n, int depth) {
  if (depth == 0 || g.uniform(0, 1) < 0.2) {
    if (g.uniform(0, 1) < 0.3) return ast::lit(std::round(g.uniform(-3, 3) * 4) / 4);
    return ast::var(g.integer(1, n));
  }
  const Expression a = random_expression(g, n, depth - 1);
  switch (g.integer(0, 8)) {
    case 0: return ast::add(a, random_expression(g, n, depth - 1));
    case 1: return ast::sub(a, random_expression(g, n, depth - 1));
    case 2: return ast::mul(a, random_expression(g, n, depth - 1));
    case 3: return ast::div(a, ast::add(ast::lit(2), ast::cos(random_expression(g, n, depth - 1))));
    case 4: return ast::sin(a);
    case 5: return ast::cos(a);
    case 6: return ast::exp(ast::sin(a));
    case 7: return ast::pow(a, g.integer(-1, 3) == -1 ? 2 : g.integer(0, 3));
    default: return ast::neg(a);
  }
}

}  // namespace

TEST_CASE("parse respects precedence and prints fully parenthesized") {
  CHECK(to_string(parse_expression("x1 + 2*x2", 2)) == "(x1 + (2 * x2))");
  CHECK(to_string(parse_expression("pow(x1, -2)", 1)) == "pow(x1, -2)");
  CHECK(to_string(parse_expression("x1 - x2 - 1", 2)) == "((x1 - x2) - 1)");
  CHECK(to_string(parse_expression("x1 / x2 / 2", 2)) == "((x1 / x2) / 2)");
  CHECK(to_string(parse_expression("-x1", 1)) == "(-x1)");
  CHECK(to_string(parse_expression("sqrt(3)", 1)) == "sqrt(3)");
}

TEST_CASE("parse errors carry a byte offset") {
  auto offset_of = [](const char* text, int dim) -> long {
    try {
      parse_expression(text, dim);
    } catch (const ParseError& e) {
      return static_cast<long>(e.offset());
    }
    return -1;
  };
  CHECK(offset_of("x0 + 1", 2) == 0);
  CHECK(offset_of("x1 + x3", 2) == 5);
  CHECK(offset_of("x1 + foo(x1)", 2) == 5);
  CHECK(offset_of("x1 +", 2) == 4);
  CHECK(offset_of("(x1", 2) == 3);
  CHECK(offset_of("pow(x1, 1.5)", 2) >= 0);
  CHECK(offset_of("x1 x2", 2) == 3);
}

TEST_CASE("eval of simple forms") {
  CHECK(eval(parse_expression("(x2 + x3) / sqrt(3)", 3), pt({0, 1, 2})) == doctest::Approx(std::sqrt(3.0)));
  CHECK(eval(parse_expression("pow(x1, 3) - 2", 1), pt({2})) == 6.0);
  CHECK(eval(parse_expression("exp(log(x1))", 1), pt({1.5})) == doctest::Approx(1.5));
  CHECK(eval(parse_expression("sqrt(x1)", 1), pt({0})) == 0.0);
}

TEST_CASE("domain errors name the offending subexpression") {
  CHECK_THROWS_AS(eval(parse_expression("log(x1)", 1), pt({-1})), DomainError);
  CHECK_THROWS_AS(eval(parse_expression("1 / x1", 1), pt({0})), DomainError);
  CHECK_THROWS_AS(eval(parse_expression("pow(x1, -1)", 1), pt({0})), DomainError);
  CHECK_THROWS_AS(eval_jet2(parse_expression("sqrt(x1)", 1), pt({0})), DomainError);
  try {
    eval(parse_expression("x2 + log(x1 - 1)", 2), pt({0, 0}));
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("(x1 - 1)") != std::string::npos);
  }
}

TEST_CASE("jet of a fixed expression matches frozen finite-difference values") {
  // f = sin(x1) * exp(x2) + pow(x1, 2) * x3 at (0.3, -0.2, 1.1)
  const Expression f = parse_expression("sin(x1) * exp(x2) + pow(x1, 2) * x3", 3);
  const VectorXd p = pt({0.3, -0.2, 1.1});
  const Jet2 j = eval_jet2(f, p);

  // Central differences of plain evaluations (h = 1e-5 for the gradient,
  // 1e-4 for the Hessian), frozen.
  const double value = 0.34095148134959935;
  const VectorXd grad = pt({1.442163363171711, 0.24195148135286446, 0.090000000002588});
  Eigen::MatrixXd hess(3, 3);
  hess << 1.9580485191572627, 0.7821633632443259, 0.5999999996841865,
          0.7821633632443259, 0.24195148246031195, 0.0,
          0.5999999996841865, 0.0, 0.0;

  CHECK(j.value == doctest::Approx(value).epsilon(1e-13));
  CHECK((j.grad - grad).norm() < 1e-9);
  CHECK((j.hess - hess).norm() < 1e-6);

  // The oracle itself, recomputed.
  const double h = 1e-4;
  Eigen::MatrixXd fd(3, 3);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const VectorXd ea = VectorXd::Unit(3, a) * h, eb = VectorXd::Unit(3, b) * h;
      fd(a, b) = (eval(f, p + ea + eb) - eval(f, p + ea - eb) - eval(f, p - ea + eb) + eval(f, p - ea - eb)) /
                 (4 * h * h);
    }
  CHECK((fd - hess).norm() < 1e-6);
}

TEST_CASE("property: random expressions round-trip, and jets agree with evaluation") {
  oracle::Gen g(20240501);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = g.integer(1, 4);
    const Expression e = random_expression(g, n, 4);
    const std::string text = to_string(e);
    const Expression back = parse_expression(text, n);
    REQUIRE_MESSAGE(back == e, text);
    CHECK(to_string(back) == text);

    const VectorXd p = g.vector(n);
    double plain = 0.0;
    Jet2 jet;
    try {
      plain = eval(e, p);
      jet = eval_jet2(e, p);
    } catch (const DomainError&) {
      continue;  // pow(0, k) corner
    }
    if (!std::isfinite(plain) || std::abs(plain) > 1e6) continue;
    CHECK(jet.value == doctest::Approx(plain).epsilon(1e-12));
    CHECK(jet.hess == jet.hess.transpose());

    const double h = 1e-6;
    for (int i = 0; i < n; ++i) {
      const VectorXd e_i = VectorXd::Unit(n, i) * h;
      const double fd = (eval(e, p + e_i) - eval(e, p - e_i)) / (2 * h);
      CHECK_MESSAGE(std::abs(fd - jet.grad[i]) <= 1e-5 * std::max(1.0, std::abs(fd)), text);
    }
  }
}

TEST_CASE("jet of a linear form over sqrt(3)") {
  const Expression e = parse_expression("(x2+x3)/sqrt(3)", 4);
  const VectorXd p = pt({0, 1, 2, 0});
  const Jet2 j = eval_jet2(e, p);
  const double r = 1.0 / std::sqrt(3.0);
  CHECK(std::abs(j.value - std::sqrt(3.0)) <= 1e-15);
  CHECK((j.grad - pt({0, r, r, 0})).norm() <= 1e-15);
  CHECK(j.hess.isZero());
  // central differences at h = 1e-5
  for (int i = 0; i < 4; ++i) {
    const VectorXd h = VectorXd::Unit(4, i) * 1e-5;
    CHECK(std::abs((eval(e, p + h) - eval(e, p - h)) / 2e-5 - j.grad[i]) <= 1e-8);
  }
}

TEST_CASE("constant expressions have zero derivatives") {
  const Expression c = parse_expression("sqrt(3) * cos(1)", 2);
  CHECK(c.is_constant());
  const Jet2 j = eval_jet2(c, pt({0.1, 0.2}));
  CHECK(j.grad.isZero());
  CHECK(j.hess.isZero());
}
