#pragma once

// Small expression language for user-defined chart metrics: coordinates
// x1..x9, decimal literals, + - * / ^, unary minus, parentheses, and the
// functions sin cos sinh cosh exp sqrt. Parsed expressions evaluate at a
// coordinate vector and differentiate symbolically (used for Christoffel
// symbols and curvature of custom charts).

#include <Eigen/Dense>

#include <cctype>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lorroll {

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, std::size_t position)
      : std::runtime_error(msg + " (at position " + std::to_string(position) + ")"),
        pos(position) {}
  std::size_t pos;
};

namespace expr {

// Log is internal only (produced by differentiation of general powers); the
// surface grammar does not expose it.
enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Sinh, Cosh, Exp, Sqrt, Log };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  Op op;
  double value = 0.0;  // Const
  int var = -1;        // Var (0-based coordinate index)
  NodePtr a, b;
};

inline NodePtr constant(double v) { return std::make_shared<Node>(Node{Op::Const, v, -1, nullptr, nullptr}); }
inline NodePtr variable(int i) { return std::make_shared<Node>(Node{Op::Var, 0.0, i, nullptr, nullptr}); }
inline NodePtr unary(Op op, NodePtr a) { return std::make_shared<Node>(Node{op, 0.0, -1, std::move(a), nullptr}); }
inline NodePtr binary(Op op, NodePtr a, NodePtr b) {
  return std::make_shared<Node>(Node{op, 0.0, -1, std::move(a), std::move(b)});
}

inline bool is_const(const NodePtr& n, double v) { return n->op == Op::Const && n->value == v; }

// Lightly simplifying constructors keep derivative trees small.
inline NodePtr add(NodePtr a, NodePtr b) {
  if (is_const(a, 0)) return b;
  if (is_const(b, 0)) return a;
  if (a->op == Op::Const && b->op == Op::Const) return constant(a->value + b->value);
  return binary(Op::Add, std::move(a), std::move(b));
}
inline NodePtr sub(NodePtr a, NodePtr b) {
  if (is_const(b, 0)) return a;
  if (a->op == Op::Const && b->op == Op::Const) return constant(a->value - b->value);
  return binary(Op::Sub, std::move(a), std::move(b));
}
inline NodePtr mul(NodePtr a, NodePtr b) {
  if (is_const(a, 0) || is_const(b, 0)) return constant(0);
  if (is_const(a, 1)) return b;
  if (is_const(b, 1)) return a;
  if (a->op == Op::Const && b->op == Op::Const) return constant(a->value * b->value);
  return binary(Op::Mul, std::move(a), std::move(b));
}
inline NodePtr div(NodePtr a, NodePtr b) {
  if (is_const(a, 0)) return constant(0);
  if (is_const(b, 1)) return a;
  return binary(Op::Div, std::move(a), std::move(b));
}
inline NodePtr neg(NodePtr a) {
  if (a->op == Op::Const) return constant(-a->value);
  return unary(Op::Neg, std::move(a));
}

inline double eval(const Node& n, const Eigen::VectorXd& x) {
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var:
      if (n.var >= x.size()) throw std::invalid_argument("expression references coordinate beyond chart dimension");
      return x(n.var);
    case Op::Add: return eval(*n.a, x) + eval(*n.b, x);
    case Op::Sub: return eval(*n.a, x) - eval(*n.b, x);
    case Op::Mul: return eval(*n.a, x) * eval(*n.b, x);
    case Op::Div: return eval(*n.a, x) / eval(*n.b, x);
    case Op::Pow: return std::pow(eval(*n.a, x), eval(*n.b, x));
    case Op::Neg: return -eval(*n.a, x);
    case Op::Sin: return std::sin(eval(*n.a, x));
    case Op::Cos: return std::cos(eval(*n.a, x));
    case Op::Sinh: return std::sinh(eval(*n.a, x));
    case Op::Cosh: return std::cosh(eval(*n.a, x));
    case Op::Exp: return std::exp(eval(*n.a, x));
    case Op::Sqrt: return std::sqrt(eval(*n.a, x));
    case Op::Log: return std::log(eval(*n.a, x));
  }
  return 0.0;
}

inline NodePtr derivative(const NodePtr& n, int var) {
  switch (n->op) {
    case Op::Const: return constant(0);
    case Op::Var: return constant(n->var == var ? 1.0 : 0.0);
    case Op::Add: return add(derivative(n->a, var), derivative(n->b, var));
    case Op::Sub: return sub(derivative(n->a, var), derivative(n->b, var));
    case Op::Mul:
      return add(mul(derivative(n->a, var), n->b), mul(n->a, derivative(n->b, var)));
    case Op::Div:
      return div(sub(mul(derivative(n->a, var), n->b), mul(n->a, derivative(n->b, var))),
                 mul(n->b, n->b));
    case Op::Pow: {
      // Constant exponent: c u^(c-1) u'; general: u^v (v' log u + v u'/u).
      if (n->b->op == Op::Const) {
        const double c = n->b->value;
        return mul(mul(constant(c), binary(Op::Pow, n->a, constant(c - 1.0))), derivative(n->a, var));
      }
      NodePtr du = derivative(n->a, var), dv = derivative(n->b, var);
      NodePtr bracket = add(mul(dv, unary(Op::Log, n->a)), div(mul(n->b, du), n->a));
      return mul(binary(Op::Pow, n->a, n->b), bracket);
    }
    case Op::Neg: return neg(derivative(n->a, var));
    case Op::Sin: return mul(unary(Op::Cos, n->a), derivative(n->a, var));
    case Op::Cos: return neg(mul(unary(Op::Sin, n->a), derivative(n->a, var)));
    case Op::Sinh: return mul(unary(Op::Cosh, n->a), derivative(n->a, var));
    case Op::Cosh: return mul(unary(Op::Sinh, n->a), derivative(n->a, var));
    case Op::Exp: return mul(unary(Op::Exp, n->a), derivative(n->a, var));
    case Op::Sqrt:
      return div(derivative(n->a, var), mul(constant(2.0), unary(Op::Sqrt, n->a)));
    case Op::Log: return div(derivative(n->a, var), n->a);
  }
  return constant(0);
}

class Parser {
 public:
  explicit Parser(std::string text) : text_(std::move(text)) {}

  NodePtr parse() {
    NodePtr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("unexpected trailing input", pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  NodePtr parse_expr() {
    NodePtr e = parse_term();
    for (;;) {
      if (eat('+')) e = add(e, parse_term());
      else if (eat('-')) e = sub(e, parse_term());
      else return e;
    }
  }

  NodePtr parse_term() {
    NodePtr e = parse_unary();
    for (;;) {
      if (eat('*')) e = mul(e, parse_unary());
      else if (eat('/')) e = div(e, parse_unary());
      else return e;
    }
  }

  NodePtr parse_unary() {
    if (eat('-')) return neg(parse_unary());
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (eat('^')) return binary(Op::Pow, base, parse_unary());  // right associative
    return base;
  }

  NodePtr parse_primary() {
    skip_ws();
    const std::size_t start = pos_;
    if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_expr();
      if (!eat(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::string ident;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])))) {
        ident += text_[pos_++];
      }
      if (ident.size() == 2 && ident[0] == 'x' && ident[1] >= '1' && ident[1] <= '9')
        return variable(ident[1] - '1');
      static const std::pair<const char*, Op> fns[] = {
          {"sin", Op::Sin}, {"cos", Op::Cos},   {"sinh", Op::Sinh},
          {"cosh", Op::Cosh}, {"exp", Op::Exp}, {"sqrt", Op::Sqrt}};
      for (const auto& [name, op] : fns) {
        if (ident == name) {
          if (!eat('(')) throw ParseError("expected '(' after function name", pos_);
          NodePtr arg = parse_expr();
          if (!eat(')')) throw ParseError("expected ')'", pos_);
          return unary(op, arg);
        }
      }
      throw ParseError("unknown identifier '" + ident + "'", start);
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    std::size_t idx = 0;
    double v;
    try {
      v = std::stod(text_.substr(pos_), &idx);
    } catch (const std::exception&) {
      throw ParseError("malformed number", start);
    }
    pos_ += idx;
    return constant(v);
  }

  std::string text_;
  std::size_t pos_ = 0;
};

}  // namespace expr

/// A parsed scalar expression with exact symbolic derivatives.
class Expression {
 public:
  Expression() : root_(expr::constant(0)) {}
  static Expression parse(const std::string& text) { return Expression(expr::Parser(text).parse()); }
  static Expression zero() { return Expression(); }

  double operator()(const Eigen::VectorXd& x) const { return expr::eval(*root_, x); }
  Expression derivative(int var) const { return Expression(expr::derivative(root_, var)); }

 private:
  explicit Expression(expr::NodePtr root) : root_(std::move(root)) {}
  expr::NodePtr root_;
};

}  // namespace lorroll
