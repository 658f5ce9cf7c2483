#include "ucb/expr.hpp"

#include <cctype>
#include <cmath>

namespace ucb {

enum class Op { Const, X1, X2, AbsX, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Log };

struct Expr::Node {
  Op op;
  Real value = 0;
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr, Real v = 0) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->value = v;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr run() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing input");
    return e;
  }

 private:
  const std::string& s_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& why) {
    throw InvalidConfig("expression error at offset " + std::to_string(pos_) + ": " + why);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool eat_word(const char* w) {
    skip_ws();
    const size_t len = std::strlen(w);
    if (s_.compare(pos_, len, w) == 0) {
      // reject identifier continuation, e.g. "expx"
      const size_t end = pos_ + len;
      if (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_'))
        return false;
      pos_ = end;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (eat('+'))
        lhs = make(Op::Add, lhs, term());
      else if (eat('-'))
        lhs = make(Op::Sub, lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    for (;;) {
      if (eat('*'))
        lhs = make(Op::Mul, lhs, factor());
      else if (eat('/'))
        lhs = make(Op::Div, lhs, factor());
      else
        return lhs;
    }
  }

  // unary minus binds looser than '^', so -x1^2 parses as -(x1^2)
  NodePtr factor() {
    if (eat('-')) return make(Op::Neg, factor());
    NodePtr base = primary();
    if (eat('^')) return make(Op::Pow, base, factor());  // right associative
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t used = 0;
      Real v = 0;
      try {
        v = std::stod(s_.substr(pos_), &used);
      } catch (const std::exception&) {
        fail("bad number");
      }
      pos_ += used;
      return make(Op::Const, nullptr, nullptr, v);
    }
    if (eat_word("x1")) return make(Op::X1);
    if (eat_word("x2")) return make(Op::X2);
    if (eat_word("pi")) return make(Op::Const, nullptr, nullptr, kPi);
    if (eat('|')) {
      if (!eat_word("x") || !eat('|')) fail("expected |x|");
      return make(Op::AbsX);
    }
    if (eat_word("sin")) return func(Op::Sin);
    if (eat_word("cos")) return func(Op::Cos);
    if (eat_word("exp")) return func(Op::Exp);
    if (eat_word("log")) return func(Op::Log);
    if (eat('(')) {
      NodePtr e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    fail("unexpected token");
  }

  NodePtr func(Op op) {
    if (!eat('(')) fail("expected '(' after function name");
    NodePtr arg = expr();
    if (!eat(')')) fail("expected ')'");
    return make(op, arg);
  }
};

Real eval_node(const Expr::Node& n, Real x1, Real x2) {
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::X1: return x1;
    case Op::X2: return x2;
    case Op::AbsX: return std::sqrt(x1 * x1 + x2 * x2);
    case Op::Add: return eval_node(*n.a, x1, x2) + eval_node(*n.b, x1, x2);
    case Op::Sub: return eval_node(*n.a, x1, x2) - eval_node(*n.b, x1, x2);
    case Op::Mul: return eval_node(*n.a, x1, x2) * eval_node(*n.b, x1, x2);
    case Op::Div: return eval_node(*n.a, x1, x2) / eval_node(*n.b, x1, x2);
    case Op::Pow: return std::pow(eval_node(*n.a, x1, x2), eval_node(*n.b, x1, x2));
    case Op::Neg: return -eval_node(*n.a, x1, x2);
    case Op::Sin: return std::sin(eval_node(*n.a, x1, x2));
    case Op::Cos: return std::cos(eval_node(*n.a, x1, x2));
    case Op::Exp: return std::exp(eval_node(*n.a, x1, x2));
    case Op::Log: return std::log(eval_node(*n.a, x1, x2));
  }
  return 0;
}

}  // namespace

Expr Expr::parse(const std::string& text) { return Expr(Parser(text).run()); }

Real Expr::eval(Real x1, Real x2) const { return eval_node(*root_, x1, x2); }

Expr::Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
Expr::Expr(Expr&&) noexcept = default;
Expr& Expr::operator=(Expr&&) noexcept = default;
Expr::Expr(const Expr&) = default;
Expr& Expr::operator=(const Expr&) = default;
Expr::~Expr() = default;

}  // namespace ucb
