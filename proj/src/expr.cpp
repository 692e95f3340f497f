#include "slantmap/expr.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

namespace slantmap {

ParseError::ParseError(std::size_t offset, const std::string& message)
    : std::runtime_error("at byte " + std::to_string(offset) + ": " + message), offset_(offset) {}

Expression::Expression(NodePtr root) : root_(std::move(root)) {}

namespace {

int max_var(const Node& n) {
  switch (n.kind) {
    case NodeKind::Literal:
      return 0;
    case NodeKind::Variable:
      return n.index;
    default: {
      int m = n.lhs ? max_var(*n.lhs) : 0;
      if (n.rhs) m = std::max(m, max_var(*n.rhs));
      return m;
    }
  }
}

bool same(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::Literal:
      // Bitwise comparison of the parsed value; both sides come from from_chars.
      return a.literal == b.literal && std::signbit(a.literal) == std::signbit(b.literal);
    case NodeKind::Variable:
      return a.index == b.index;
    case NodeKind::Pow:
      return a.exponent == b.exponent && same(*a.lhs, *b.lhs);
    default:
      if (!same(*a.lhs, *b.lhs)) return false;
      if (a.rhs || b.rhs) return a.rhs && b.rhs && same(*a.rhs, *b.rhs);
      return true;
  }
}

NodePtr make_unary(NodeKind kind, NodePtr operand) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(operand);
  return n;
}

NodePtr make_binary(NodeKind kind, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

NodePtr make_literal(double v) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Literal;
  n->literal = v;
  return n;
}

NodePtr make_variable(int index) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Variable;
  n->index = index;
  return n;
}

NodePtr make_pow(NodePtr base, int k) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Pow;
  n->lhs = std::move(base);
  n->exponent = k;
  return n;
}

struct FunctionName {
  std::string_view name;
  NodeKind kind;
};

constexpr std::array<FunctionName, 6> kFunctions{{
    {"sqrt", NodeKind::Sqrt},
    {"sin", NodeKind::Sin},
    {"cos", NodeKind::Cos},
    {"exp", NodeKind::Exp},
    {"log", NodeKind::Log},
    {"pow", NodeKind::Pow},
}};

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

class Parser {
 public:
  Parser(std::string_view text, int dim) : text_(text), dim_(dim) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }
  [[noreturn]] void fail_at(std::size_t at, const std::string& msg) const { throw ParseError(at, msg); }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
                                   text_[pos_] == '\r'))
      ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= text_.size()) fail(std::string("expected '") + c + "' before end of input");
      fail(std::string("expected '") + c + "'");
    }
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = make_binary(NodeKind::Add, lhs, term());
      else if (accept('-'))
        lhs = make_binary(NodeKind::Sub, lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    for (;;) {
      if (accept('*'))
        lhs = make_binary(NodeKind::Mul, lhs, factor());
      else if (accept('/'))
        lhs = make_binary(NodeKind::Div, lhs, factor());
      else
        return lhs;
    }
  }

  NodePtr factor() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '-') {
      ++pos_;
      return make_unary(NodeKind::Neg, factor());
    }
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if (is_digit(c) || c == '.') return make_literal(number());
    if (is_ident_start(c)) return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  double number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t q = pos_ + 1;
      if (q < text_.size() && (text_[q] == '+' || text_[q] == '-')) ++q;
      if (q < text_.size() && is_digit(text_[q])) {
        pos_ = q;
        while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
      }
    }
    double v = 0.0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) fail_at(start, "malformed number");
    return v;
  }

  int integer() {
    skip_ws();
    const std::size_t start = pos_;
    bool negative = false;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) {
      negative = text_[pos_] == '-';
      ++pos_;
      skip_ws();
    }
    const std::size_t digits = pos_;
    while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    if (digits == pos_) fail_at(start, "pow exponent must be an integer literal");
    if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E'))
      fail_at(start, "pow exponent must be an integer literal");
    int k = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + digits, text_.data() + pos_, k);
    if (ec != std::errc()) fail_at(start, "pow exponent out of range");
    return negative ? -k : k;
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);

    if (name.size() >= 2 && name[0] == 'x' && is_digit(name[1])) {
      bool all_digits = true;
      for (std::size_t i = 1; i < name.size(); ++i) all_digits = all_digits && is_digit(name[i]);
      if (all_digits) {
        int idx = 0;
        auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), idx);
        if (ec != std::errc() || idx < 1) fail_at(start, "invalid variable '" + std::string(name) + "'");
        if (idx > dim_)
          fail_at(start, "variable '" + std::string(name) + "' out of range for dimension " +
                             std::to_string(dim_));
        return make_variable(idx);
      }
    }

    for (const auto& f : kFunctions) {
      if (f.name != name) continue;
      expect('(');
      NodePtr arg = expr();
      if (f.kind == NodeKind::Pow) {
        expect(',');
        const int k = integer();
        expect(')');
        return make_pow(arg, k);
      }
      expect(')');
      return make_unary(f.kind, arg);
    }
    fail_at(start, "unknown identifier '" + std::string(name) + "'");
  }

  std::string_view text_;
  int dim_;
  std::size_t pos_ = 0;
};

std::string format_literal(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

void print(const Node& n, std::string& out) {
  auto unary = [&](const char* name) {
    out += name;
    out += '(';
    print(*n.lhs, out);
    out += ')';
  };
  auto binary = [&](const char* op) {
    out += '(';
    print(*n.lhs, out);
    out += op;
    print(*n.rhs, out);
    out += ')';
  };
  switch (n.kind) {
    case NodeKind::Literal:
      out += format_literal(n.literal);
      break;
    case NodeKind::Variable:
      out += 'x';
      out += std::to_string(n.index);
      break;
    case NodeKind::Neg:
      out += "(-";
      print(*n.lhs, out);
      out += ')';
      break;
    case NodeKind::Sqrt: unary("sqrt"); break;
    case NodeKind::Sin: unary("sin"); break;
    case NodeKind::Cos: unary("cos"); break;
    case NodeKind::Exp: unary("exp"); break;
    case NodeKind::Log: unary("log"); break;
    case NodeKind::Add: binary(" + "); break;
    case NodeKind::Sub: binary(" - "); break;
    case NodeKind::Mul: binary(" * "); break;
    case NodeKind::Div: binary(" / "); break;
    case NodeKind::Pow:
      out += "pow(";
      print(*n.lhs, out);
      out += ", ";
      out += std::to_string(n.exponent);
      out += ')';
      break;
  }
}

std::string describe(const Node& n) {
  std::string s;
  print(n, s);
  return s;
}

// Mirrors the upper triangle so the Hessian is symmetric bit for bit.
void mirror_upper(Eigen::MatrixXd& h) {
  for (Eigen::Index j = 0; j < h.cols(); ++j)
    for (Eigen::Index i = j + 1; i < h.rows(); ++i) h(i, j) = h(j, i);
}

// f(u) with f'(u) = d1, f''(u) = d2.
Jet2 chain(const Jet2& u, double value, double d1, double d2) {
  Jet2 r;
  r.value = value;
  r.grad = d1 * u.grad;
  r.hess = d1 * u.hess;
  if (d2 != 0.0) r.hess.noalias() += d2 * (u.grad * u.grad.transpose());
  mirror_upper(r.hess);
  return r;
}

Jet2 multiply(const Jet2& a, const Jet2& b) {
  Jet2 r;
  r.value = a.value * b.value;
  r.grad = a.value * b.grad + b.value * a.grad;
  r.hess = a.value * b.hess + b.value * a.hess;
  r.hess.noalias() += a.grad * b.grad.transpose();
  r.hess.noalias() += b.grad * a.grad.transpose();
  mirror_upper(r.hess);
  return r;
}

double ipow(double x, int k) {
  if (k < 0) return 1.0 / ipow(x, -k);
  double r = 1.0;
  double b = x;
  while (k > 0) {
    if (k & 1) r *= b;
    b *= b;
    k >>= 1;
  }
  return r;
}

[[noreturn]] void domain_fail(const Node& n, const std::string& what, double arg) {
  throw DomainError(what + " (argument " + format_literal(arg) + ") in '" + describe(n) + "'");
}

Jet2 jet(const Node& n, const Eigen::VectorXd& p) {
  const int dim = static_cast<int>(p.size());
  switch (n.kind) {
    case NodeKind::Literal:
      return Jet2::constant(n.literal, dim);
    case NodeKind::Variable:
      return Jet2::variable(n.index - 1, p[n.index - 1], dim);
    case NodeKind::Neg: {
      Jet2 u = jet(*n.lhs, p);
      u.value = -u.value;
      u.grad = -u.grad;
      u.hess = -u.hess;
      return u;
    }
    case NodeKind::Sqrt: {
      const Jet2 u = jet(*n.lhs, p);
      if (!(u.value > 0.0)) domain_fail(n, "sqrt of non-positive value", u.value);
      const double s = std::sqrt(u.value);
      return chain(u, s, 0.5 / s, -0.25 / (s * u.value));
    }
    case NodeKind::Sin: {
      const Jet2 u = jet(*n.lhs, p);
      const double s = std::sin(u.value);
      return chain(u, s, std::cos(u.value), -s);
    }
    case NodeKind::Cos: {
      const Jet2 u = jet(*n.lhs, p);
      const double c = std::cos(u.value);
      return chain(u, c, -std::sin(u.value), -c);
    }
    case NodeKind::Exp: {
      const Jet2 u = jet(*n.lhs, p);
      const double e = std::exp(u.value);
      return chain(u, e, e, e);
    }
    case NodeKind::Log: {
      const Jet2 u = jet(*n.lhs, p);
      if (!(u.value > 0.0)) domain_fail(n, "log of non-positive value", u.value);
      return chain(u, std::log(u.value), 1.0 / u.value, -1.0 / (u.value * u.value));
    }
    case NodeKind::Add:
    case NodeKind::Sub: {
      Jet2 a = jet(*n.lhs, p);
      const Jet2 b = jet(*n.rhs, p);
      if (n.kind == NodeKind::Add) {
        a.value += b.value;
        a.grad += b.grad;
        a.hess += b.hess;
      } else {
        a.value -= b.value;
        a.grad -= b.grad;
        a.hess -= b.hess;
      }
      return a;
    }
    case NodeKind::Mul:
      return multiply(jet(*n.lhs, p), jet(*n.rhs, p));
    case NodeKind::Div: {
      const Jet2 a = jet(*n.lhs, p);
      const Jet2 b = jet(*n.rhs, p);
      if (b.value == 0.0) domain_fail(n, "division by zero", b.value);
      const double inv = 1.0 / b.value;
      return multiply(a, chain(b, inv, -inv * inv, 2.0 * inv * inv * inv));
    }
    case NodeKind::Pow: {
      const int k = n.exponent;
      if (k == 0) return Jet2::constant(1.0, dim);
      const Jet2 u = jet(*n.lhs, p);
      if (k < 0 && u.value == 0.0) domain_fail(n, "negative power of zero", u.value);
      const double d2 = (k == 1) ? 0.0 : k * (k - 1) * ipow(u.value, k - 2);
      return chain(u, ipow(u.value, k), k * ipow(u.value, k - 1), d2);
    }
  }
  throw std::logic_error("unreachable node kind");
}

double value(const Node& n, const Eigen::VectorXd& p) {
  switch (n.kind) {
    case NodeKind::Literal: return n.literal;
    case NodeKind::Variable: return p[n.index - 1];
    case NodeKind::Neg: return -value(*n.lhs, p);
    case NodeKind::Sqrt: {
      const double u = value(*n.lhs, p);
      if (u < 0.0) domain_fail(n, "sqrt of negative value", u);
      return std::sqrt(u);
    }
    case NodeKind::Sin: return std::sin(value(*n.lhs, p));
    case NodeKind::Cos: return std::cos(value(*n.lhs, p));
    case NodeKind::Exp: return std::exp(value(*n.lhs, p));
    case NodeKind::Log: {
      const double u = value(*n.lhs, p);
      if (!(u > 0.0)) domain_fail(n, "log of non-positive value", u);
      return std::log(u);
    }
    case NodeKind::Add: return value(*n.lhs, p) + value(*n.rhs, p);
    case NodeKind::Sub: return value(*n.lhs, p) - value(*n.rhs, p);
    case NodeKind::Mul: return value(*n.lhs, p) * value(*n.rhs, p);
    case NodeKind::Div: {
      const double b = value(*n.rhs, p);
      if (b == 0.0) domain_fail(n, "division by zero", b);
      return value(*n.lhs, p) / b;
    }
    case NodeKind::Pow: {
      if (n.exponent == 0) return 1.0;
      const double u = value(*n.lhs, p);
      if (n.exponent < 0 && u == 0.0) domain_fail(n, "negative power of zero", u);
      return ipow(u, n.exponent);
    }
  }
  throw std::logic_error("unreachable node kind");
}

void require_dim(const Expression& e, const Eigen::VectorXd& p) {
  if (e.max_variable() > p.size())
    throw std::invalid_argument("point of dimension " + std::to_string(p.size()) +
                                " too small for '" + to_string(e) + "'");
}

}  // namespace

int Expression::max_variable() const { return max_var(*root_); }

bool operator==(const Expression& a, const Expression& b) { return same(*a.root_, *b.root_); }

Expression parse_expression(std::string_view text, int dim) {
  if (dim < 1) throw std::invalid_argument("dimension must be positive");
  return Expression(Parser(text, dim).parse());
}

std::string to_string(const Expression& expr) { return describe(expr.root()); }

Jet2 Jet2::constant(double c, int n) {
  Jet2 j;
  j.value = c;
  j.grad = Eigen::VectorXd::Zero(n);
  j.hess = Eigen::MatrixXd::Zero(n, n);
  return j;
}

Jet2 Jet2::variable(int index0, double x, int n) {
  Jet2 j = constant(x, n);
  j.grad[index0] = 1.0;
  return j;
}

Jet2 eval_jet2(const Expression& expr, const Eigen::VectorXd& p) {
  require_dim(expr, p);
  return jet(expr.root(), p);
}

double eval(const Expression& expr, const Eigen::VectorXd& p) {
  require_dim(expr, p);
  return value(expr.root(), p);
}

namespace ast {
Expression lit(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("literal must be finite");
  // Negative literals are stored as negations, the form the parser produces.
  if (std::signbit(v)) return Expression(make_unary(NodeKind::Neg, make_literal(-v)));
  return Expression(make_literal(v));
}
Expression var(int index) { return Expression(make_variable(index)); }
Expression neg(const Expression& a) { return Expression(make_unary(NodeKind::Neg, a.node())); }
Expression sqrt(const Expression& a) { return Expression(make_unary(NodeKind::Sqrt, a.node())); }
Expression sin(const Expression& a) { return Expression(make_unary(NodeKind::Sin, a.node())); }
Expression cos(const Expression& a) { return Expression(make_unary(NodeKind::Cos, a.node())); }
Expression exp(const Expression& a) { return Expression(make_unary(NodeKind::Exp, a.node())); }
Expression log(const Expression& a) { return Expression(make_unary(NodeKind::Log, a.node())); }
Expression add(const Expression& a, const Expression& b) {
  return Expression(make_binary(NodeKind::Add, a.node(), b.node()));
}
Expression sub(const Expression& a, const Expression& b) {
  return Expression(make_binary(NodeKind::Sub, a.node(), b.node()));
}
Expression mul(const Expression& a, const Expression& b) {
  return Expression(make_binary(NodeKind::Mul, a.node(), b.node()));
}
Expression div(const Expression& a, const Expression& b) {
  return Expression(make_binary(NodeKind::Div, a.node(), b.node()));
}
Expression pow(const Expression& a, int k) { return Expression(make_pow(a.node(), k)); }
}  // namespace ast

}  // namespace slantmap
