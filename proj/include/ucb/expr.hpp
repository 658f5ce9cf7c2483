#pragma once

#include <memory>
#include <string>

#include "ucb/common.hpp"

namespace ucb {

// Arithmetic expressions over the plane, used for user-supplied weight
// functions. Grammar:
//   expr    := term (('+'|'-') term)*
//   term    := factor (('*'|'/') factor)*
//   factor  := unary ('^' factor)?
//   unary   := '-' unary | primary
//   primary := number | 'x1' | 'x2' | '|x|' | 'pi'
//            | ('sin'|'cos'|'exp'|'log') '(' expr ')' | '(' expr ')'
class Expr {
 public:
  static Expr parse(const std::string& text);  // throws InvalidConfig on bad syntax
  Real eval(Real x1, Real x2) const;

  Expr(Expr&&) noexcept;
  Expr& operator=(Expr&&) noexcept;
  Expr(const Expr&);
  Expr& operator=(const Expr&);
  ~Expr();

  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> root);
  std::shared_ptr<const Node> root_;
};

}  // namespace ucb
