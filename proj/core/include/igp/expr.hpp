#pragma once

// Closed-form scalar fields f(x, y) read from configuration text.
//
// Grammar (fixed; no user functions):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' ['-'] number)*
//   primary := number | 'x' | 'y' | func '(' expr ')' | '(' expr ')'
//   func    := exp | sin | cos | sqrt
//
// So "-x^2" is -(x^2) and "1-x^2" at x=2 is -3.

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace igp {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at byte " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Raised by Expr::eval on sqrt of a negative, division by zero or a
/// non-real power. subexpression() is the printed offending node.
class DomainError : public std::runtime_error {
 public:
  DomainError(const std::string& what, std::string subexpr)
      : std::runtime_error(what + " in '" + subexpr + "'"), subexpr_(std::move(subexpr)) {}
  const std::string& subexpression() const noexcept { return subexpr_; }

 private:
  std::string subexpr_;
};

enum class NodeKind { Number, VarX, VarY, Add, Sub, Mul, Div, Neg, Pow, Call };
enum class Func { Exp, Sin, Cos, Sqrt };

struct ExprNode {
  NodeKind kind;
  double value = 0.0;  // Number literal, or the exponent of Pow
  Func func = Func::Exp;
  std::shared_ptr<const ExprNode> lhs;
  std::shared_ptr<const ExprNode> rhs;
};

/// Immutable parsed expression. Copies share the tree; evaluation is
/// thread-safe.
class Expr {
 public:
  static Expr parse(std::string_view text);

  double eval(double x, double y) const;

  /// Fully parenthesised form; parse(to_string()) is structurally equal.
  std::string to_string() const;

  const ExprNode& root() const { return *root_; }

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const ExprNode> root) : root_(std::move(root)) {}
  std::shared_ptr<const ExprNode> root_;
};

bool structurally_equal(const ExprNode& a, const ExprNode& b);

}  // namespace igp
