#pragma once

#include <memory>
#include <span>
#include <string>

namespace spde {

// Arithmetic expressions for user-supplied spectral densities. Grammar:
// + - * / ^ with the usual precedence, unary minus, parentheses, numeric
// literals, the constant pi, variables x1..x9 (components of xi), r (|xi|),
// and the functions exp, abs, sqrt, norm. norm() with no arguments is |xi|;
// with arguments it is the Euclidean norm of those values.
class Expression {
 public:
  static Expression parse(const std::string& text);

  double eval(std::span<const double> xi) const;

  Expression(Expression&&) noexcept;
  Expression& operator=(Expression&&) noexcept;
  ~Expression();

  struct Node;

 private:
  Expression();
  std::unique_ptr<Node> root_;
};

}  // namespace spde
