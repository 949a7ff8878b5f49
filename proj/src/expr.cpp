#include "spde/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "spde/util.hpp"

namespace spde {

struct Expression::Node {
  enum class Op { Const, Var, Radius, Add, Sub, Mul, Div, Pow, Neg, Exp, Abs, Sqrt, Norm };
  Op op;
  double value = 0.0;
  int var = 0;  // 0-based component index
  std::vector<std::unique_ptr<Node>> kids;

  double eval(std::span<const double> xi) const {
    switch (op) {
      case Op::Const: return value;
      case Op::Var:
        if (var >= static_cast<int>(xi.size()))
          throw std::out_of_range("expression references x" + std::to_string(var + 1) +
                                  " but dim is " + std::to_string(xi.size()));
        return xi[static_cast<size_t>(var)];
      case Op::Radius: {
        double s = 0.0;
        for (double v : xi) s += v * v;
        return std::sqrt(s);
      }
      case Op::Add: return kids[0]->eval(xi) + kids[1]->eval(xi);
      case Op::Sub: return kids[0]->eval(xi) - kids[1]->eval(xi);
      case Op::Mul: return kids[0]->eval(xi) * kids[1]->eval(xi);
      case Op::Div: return kids[0]->eval(xi) / kids[1]->eval(xi);
      case Op::Pow: return std::pow(kids[0]->eval(xi), kids[1]->eval(xi));
      case Op::Neg: return -kids[0]->eval(xi);
      case Op::Exp: return std::exp(kids[0]->eval(xi));
      case Op::Abs: return std::abs(kids[0]->eval(xi));
      case Op::Sqrt: return std::sqrt(kids[0]->eval(xi));
      case Op::Norm: {
        double s = 0.0;
        for (const auto& k : kids) {
          const double v = k->eval(xi);
          s += v * v;
        }
        return std::sqrt(s);
      }
    }
    return 0.0;
  }
};

namespace {

using Node = Expression::Node;
using NodePtr = std::unique_ptr<Node>;

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

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::invalid_argument("expression error at position " +
                                std::to_string(pos_) + ": " + msg);
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

  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  static NodePtr make(Node::Op op) {
    auto n = std::make_unique<Node>();
    n->op = op;
    return n;
  }
  static NodePtr binary(Node::Op op, NodePtr a, NodePtr b) {
    NodePtr n = make(op);
    n->kids.push_back(std::move(a));
    n->kids.push_back(std::move(b));
    return n;
  }

  NodePtr expr() {
    NodePtr a = term();
    for (;;) {
      if (eat('+')) a = binary(Node::Op::Add, std::move(a), term());
      else if (eat('-')) a = binary(Node::Op::Sub, std::move(a), term());
      else return a;
    }
  }

  NodePtr term() {
    NodePtr a = factor();
    for (;;) {
      if (eat('*')) a = binary(Node::Op::Mul, std::move(a), factor());
      else if (eat('/')) a = binary(Node::Op::Div, std::move(a), factor());
      else return a;
    }
  }

  NodePtr factor() {  // right-associative power binds tighter than unary minus on the left
    NodePtr a = unary();
    if (eat('^')) return binary(Node::Op::Pow, std::move(a), factor());
    return a;
  }

  NodePtr unary() {
    if (eat('-')) {
      NodePtr n = make(Node::Op::Neg);
      n->kids.push_back(unary());
      return n;
    }
    (void)eat('+');
    return primary();
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return ident();
    if (eat('(')) {
      NodePtr e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr number() {
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("bad number");
    pos_ += static_cast<size_t>(end - begin);
    NodePtr n = make(Node::Op::Const);
    n->value = v;
    return n;
  }

  NodePtr ident() {
    size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    const std::string name = s_.substr(start, pos_ - start);

    if (name == "pi") {
      NodePtr n = make(Node::Op::Const);
      n->value = kPi;
      return n;
    }
    if (name == "r") return make(Node::Op::Radius);
    if (name.size() >= 2 && name[0] == 'x' && std::isdigit(static_cast<unsigned char>(name[1]))) {
      const int idx = std::atoi(name.c_str() + 1);
      if (idx < 1 || idx > 9) fail("variable index out of range: " + name);
      NodePtr n = make(Node::Op::Var);
      n->var = idx - 1;
      return n;
    }

    if (!eat('(')) fail("unknown identifier '" + name + "'");
    std::vector<NodePtr> args;
    if (!eat(')')) {
      do {
        args.push_back(expr());
      } while (eat(','));
      if (!eat(')')) fail("expected ')' in call to " + name);
    }

    auto expect_arity = [&](size_t k) {
      if (args.size() != k) fail(name + " expects " + std::to_string(k) + " argument(s)");
    };
    if (name == "exp") {
      expect_arity(1);
      NodePtr n = make(Node::Op::Exp);
      n->kids.push_back(std::move(args[0]));
      return n;
    }
    if (name == "abs") {
      expect_arity(1);
      NodePtr n = make(Node::Op::Abs);
      n->kids.push_back(std::move(args[0]));
      return n;
    }
    if (name == "sqrt") {
      expect_arity(1);
      NodePtr n = make(Node::Op::Sqrt);
      n->kids.push_back(std::move(args[0]));
      return n;
    }
    if (name == "norm") {
      if (args.empty()) return make(Node::Op::Radius);
      NodePtr n = make(Node::Op::Norm);
      for (auto& a : args) n->kids.push_back(std::move(a));
      return n;
    }
    fail("unknown function '" + name + "'");
  }
};

}  // namespace

Expression::Expression() = default;
Expression::Expression(Expression&&) noexcept = default;
Expression& Expression::operator=(Expression&&) noexcept = default;
Expression::~Expression() = default;

Expression Expression::parse(const std::string& text) {
  Expression e;
  e.root_ = Parser(text).run();
  return e;
}

double Expression::eval(std::span<const double> xi) const {
  return root_->eval(xi);
}

}  // namespace spde
