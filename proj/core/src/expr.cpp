#include "igp/expr.hpp"

#include <fmt/format.h>

#include <cctype>
#include <charconv>
#include <cmath>

namespace igp {

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_leaf(NodeKind kind, double value = 0.0) {
  auto n = std::make_shared<ExprNode>();
  n->kind = kind;
  n->value = value;
  return n;
}

NodePtr make_binary(NodeKind kind, NodePtr lhs, NodePtr rhs) {
  auto n = std::make_shared<ExprNode>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

NodePtr make_unary(NodeKind kind, NodePtr arg, double value = 0.0, Func f = Func::Exp) {
  auto n = std::make_shared<ExprNode>();
  n->kind = kind;
  n->lhs = std::move(arg);
  n->value = value;
  n->func = f;
  return n;
}

const char* func_name(Func f) {
  switch (f) {
    case Func::Exp: return "exp";
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Sqrt: return "sqrt";
  }
  return "?";
}

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  NodePtr parse_all() {
    if (s_.empty()) throw ParseError("empty expression", 0);
    for (std::size_t i = 0; i < s_.size(); ++i) {
      if (static_cast<unsigned char>(s_[i]) > 0x7f) throw ParseError("non-ASCII character", i);
    }
    skip_ws();
    if (pos_ == s_.size()) throw ParseError("empty expression", pos_);
    NodePtr e = expr();
    skip_ws();
    if (pos_ != s_.size()) {
      throw ParseError(fmt::format("unexpected '{}'", s_[pos_]), pos_);
    }
    return e;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= s_.size()) throw ParseError(fmt::format("expected '{}' before end of input", c), pos_);
      throw ParseError(fmt::format("expected '{}' but found '{}'", c, s_[pos_]), pos_);
    }
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make_binary(NodeKind::Add, lhs, term());
      } else if (accept('-')) {
        lhs = make_binary(NodeKind::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_binary(NodeKind::Mul, lhs, unary());
      } else if (accept('/')) {
        lhs = make_binary(NodeKind::Div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make_unary(NodeKind::Neg, unary());
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    while (accept('^')) {
      skip_ws();
      const bool negative = accept('-');
      skip_ws();
      if (pos_ >= s_.size() || !(std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) {
        throw ParseError("exponent must be a numeric literal", pos_);
      }
      const double e = number();
      base = make_unary(NodeKind::Pow, base, negative ? -e : e);
    }
    return base;
  }

  double number() {
    const std::size_t start = pos_;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), value);
    if (ec != std::errc{}) throw ParseError("malformed number", start);
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    return value;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return make_leaf(NodeKind::Number, number());
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
        ++pos_;
      }
      const std::string_view name = s_.substr(start, pos_ - start);
      if (name == "x") return make_leaf(NodeKind::VarX);
      if (name == "y") return make_leaf(NodeKind::VarY);
      Func f{};
      if (name == "exp") {
        f = Func::Exp;
      } else if (name == "sin") {
        f = Func::Sin;
      } else if (name == "cos") {
        f = Func::Cos;
      } else if (name == "sqrt") {
        f = Func::Sqrt;
      } else {
        throw ParseError(fmt::format("unknown identifier '{}'", name), start);
      }
      skip_ws();
      if (pos_ >= s_.size() || s_[pos_] != '(') {
        throw ParseError(fmt::format("function '{}' requires an argument list", name), pos_);
      }
      ++pos_;
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == ')') {
        throw ParseError(fmt::format("arity mismatch: '{}' takes 1 argument, got 0", name), pos_);
      }
      NodePtr arg = expr();
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == ',') {
        throw ParseError(fmt::format("arity mismatch: '{}' takes 1 argument", name), pos_);
      }
      expect(')');
      return make_unary(NodeKind::Call, arg, 0.0, f);
    }
    throw ParseError(fmt::format("unexpected '{}'", c), pos_);
  }
};

void print(const ExprNode& n, std::string& out) {
  auto bin = [&](const char* op) {
    out += '(';
    print(*n.lhs, out);
    out += op;
    print(*n.rhs, out);
    out += ')';
  };
  switch (n.kind) {
    case NodeKind::Number: out += fmt::format("{}", n.value); break;
    case NodeKind::VarX: out += 'x'; break;
    case NodeKind::VarY: out += 'y'; break;
    case NodeKind::Add: bin(" + "); break;
    case NodeKind::Sub: bin(" - "); break;
    case NodeKind::Mul: bin("*"); break;
    case NodeKind::Div: bin("/"); break;
    case NodeKind::Neg:
      out += "(-";
      print(*n.lhs, out);
      out += ')';
      break;
    case NodeKind::Pow:
      out += '(';
      print(*n.lhs, out);
      out += fmt::format("^{})", n.value);
      break;
    case NodeKind::Call:
      out += func_name(n.func);
      out += '(';
      print(*n.lhs, out);
      out += ')';
      break;
  }
}

std::string print(const ExprNode& n) {
  std::string s;
  print(n, s);
  return s;
}

double eval_node(const ExprNode& n, double x, double y) {
  switch (n.kind) {
    case NodeKind::Number: return n.value;
    case NodeKind::VarX: return x;
    case NodeKind::VarY: return y;
    case NodeKind::Add: return eval_node(*n.lhs, x, y) + eval_node(*n.rhs, x, y);
    case NodeKind::Sub: return eval_node(*n.lhs, x, y) - eval_node(*n.rhs, x, y);
    case NodeKind::Mul: return eval_node(*n.lhs, x, y) * eval_node(*n.rhs, x, y);
    case NodeKind::Div: {
      const double num = eval_node(*n.lhs, x, y);
      const double den = eval_node(*n.rhs, x, y);
      if (den == 0.0) throw DomainError("division by zero", print(n));
      return num / den;
    }
    case NodeKind::Neg: return -eval_node(*n.lhs, x, y);
    case NodeKind::Pow: {
      const double base = eval_node(*n.lhs, x, y);
      if (base == 0.0 && n.value < 0.0) throw DomainError("division by zero", print(n));
      const double r = std::pow(base, n.value);
      if (std::isnan(r) && !std::isnan(base)) throw DomainError("non-real power", print(n));
      return r;
    }
    case NodeKind::Call: {
      const double a = eval_node(*n.lhs, x, y);
      switch (n.func) {
        case Func::Exp: return std::exp(a);
        case Func::Sin: return std::sin(a);
        case Func::Cos: return std::cos(a);
        case Func::Sqrt:
          if (a < 0.0) throw DomainError("sqrt of negative", print(n));
          return std::sqrt(a);
      }
    }
  }
  return 0.0;
}

}  // namespace

Expr Expr::parse(std::string_view text) { return Expr(Parser(text).parse_all()); }

double Expr::eval(double x, double y) const { return eval_node(*root_, x, y); }

std::string Expr::to_string() const { return print(*root_); }

bool structurally_equal(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::Number: return a.value == b.value;
    case NodeKind::VarX:
    case NodeKind::VarY: return true;
    case NodeKind::Neg: return structurally_equal(*a.lhs, *b.lhs);
    case NodeKind::Pow: return a.value == b.value && structurally_equal(*a.lhs, *b.lhs);
    case NodeKind::Call: return a.func == b.func && structurally_equal(*a.lhs, *b.lhs);
    default: return structurally_equal(*a.lhs, *b.lhs) && structurally_equal(*a.rhs, *b.rhs);
  }
}

bool operator==(const Expr& a, const Expr& b) { return structurally_equal(*a.root_, *b.root_); }

}  // namespace igp
