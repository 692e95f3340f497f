#pragma once

// Scalar formulas in chart coordinates and their second-order forward jets.
//
// Grammar (whitespace-insensitive):
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := NUMBER | VAR | FUNC '(' expr ')' | 'pow' '(' expr ',' INT ')'
//           | '(' expr ')' | '-' factor
//   FUNC   := sqrt | sin | cos | exp | log
//   VAR    := x1 .. xn
//
// Expressions are immutable once built and can be evaluated concurrently.

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace slantmap {

enum class NodeKind {
  Literal,
  Variable,
  Neg,
  Sqrt,
  Sin,
  Cos,
  Exp,
  Log,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind;
  double literal = 0.0;  // Literal
  int index = 0;         // Variable, 1-based
  int exponent = 0;      // Pow
  NodePtr lhs;           // unary operand or left operand
  NodePtr rhs;           // right operand of binary nodes
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, const std::string& message);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Raised when a jet cannot be formed: sqrt/log of a non-positive value,
/// division by zero, or a negative power of zero.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Expression {
 public:
  explicit Expression(NodePtr root);

  const Node& root() const { return *root_; }
  const NodePtr& node() const { return root_; }

  /// Largest variable index referenced, 0 for constant expressions.
  int max_variable() const;
  bool is_constant() const { return max_variable() == 0; }

  friend bool operator==(const Expression& a, const Expression& b);

 private:
  NodePtr root_;
};

Expression parse_expression(std::string_view text, int dim);

/// Canonical, fully parenthesized form. Re-parsing it yields an identical AST.
std::string to_string(const Expression& expr);

/// Value, gradient and symmetric Hessian of a scalar function at a point.
struct Jet2 {
  double value = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;

  static Jet2 constant(double c, int n);
  static Jet2 variable(int index0, double x, int n);
};

Jet2 eval_jet2(const Expression& expr, const Eigen::VectorXd& p);
double eval(const Expression& expr, const Eigen::VectorXd& p);

// AST builders, mostly for tests and programmatic catalogs.
namespace ast {
Expression lit(double v);
Expression var(int index);
Expression neg(const Expression& a);
Expression sqrt(const Expression& a);
Expression sin(const Expression& a);
Expression cos(const Expression& a);
Expression exp(const Expression& a);
Expression log(const Expression& a);
Expression add(const Expression& a, const Expression& b);
Expression sub(const Expression& a, const Expression& b);
Expression mul(const Expression& a, const Expression& b);
Expression div(const Expression& a, const Expression& b);
Expression pow(const Expression& a, int k);
}  // namespace ast

}  // namespace slantmap
