#include "igp/expr.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>
#include <string>

namespace igp {
namespace {

double ev(const std::string& s, double x = 0.0, double y = 0.0) { return Expr::parse(s).eval(x, y); }

TEST(Expr, Precedence) {
  EXPECT_DOUBLE_EQ(ev("1-x^2", 2.0), -3.0);
  EXPECT_DOUBLE_EQ(ev("-x^2", 2.0), -4.0);
  EXPECT_DOUBLE_EQ(ev("2+3*4"), 14.0);
  EXPECT_DOUBLE_EQ(ev("(2+3)*4"), 20.0);
  EXPECT_DOUBLE_EQ(ev("8/4/2"), 1.0);
  EXPECT_DOUBLE_EQ(ev("2-3-4"), -5.0);
  EXPECT_DOUBLE_EQ(ev("2^3^2"), 64.0);  // chained exponents apply left to right
  EXPECT_DOUBLE_EQ(ev("x^-2", 2.0), 0.25);
  EXPECT_DOUBLE_EQ(ev("--x", 3.0), 3.0);
  EXPECT_DOUBLE_EQ(ev("2*-x", 3.0), -6.0);
}

TEST(Expr, VariablesFunctionsAndLiterals) {
  EXPECT_DOUBLE_EQ(ev("x*y", 3.0, -2.0), -6.0);
  EXPECT_DOUBLE_EQ(ev("exp(0)"), 1.0);
  EXPECT_DOUBLE_EQ(ev("sqrt(16)"), 4.0);
  EXPECT_DOUBLE_EQ(ev("cos(0) + sin(0)"), 1.0);
  EXPECT_DOUBLE_EQ(ev(".75"), 0.75);
  EXPECT_DOUBLE_EQ(ev("1.5e2"), 150.0);
  EXPECT_DOUBLE_EQ(ev("  x  +  1 ", 1.0), 2.0);
}

TEST(Expr, HabitatFieldMatchesDirectFormula) {
  const std::string k =
      "2*exp(-5*((x+0.75)^2+(y-0.75)^2)) + 2*exp(-5*((x-0.75)^2+(y+0.75)^2))"
      " + 2*exp(-5*((x+0.75)^2+(y+0.75)^2)) + 2*exp(-5*((x-0.75)^2+(y-0.75)^2))";
  auto direct = [](double x, double y) {
    auto bump = [&](double cx, double cy) { return 2.0 * std::exp(-5.0 * ((x - cx) * (x - cx) + (y - cy) * (y - cy))); };
    return bump(-0.75, 0.75) + bump(0.75, -0.75) + bump(-0.75, -0.75) + bump(0.75, 0.75);
  };
  const Expr e = Expr::parse(k);
  for (double x : {-1.0, -0.3, 0.0, 0.75, 1.0}) {
    for (double y : {-1.0, 0.2, 0.75}) EXPECT_NEAR(e.eval(x, y), direct(x, y), 1e-14);
  }
  EXPECT_NEAR(e.eval(0.75, 0.75), 2.0 + 4.0 * std::exp(-11.25) + 2.0 * std::exp(-22.5), 1e-15);
}

TEST(Expr, InitialResourceAtPeakCentre) {
  // 2 exp(0) (1-0)^2 (1-0.81)^2
  EXPECT_NEAR(ev("2*exp(-10*(x^2+(y-0.9)^2))*(1-x^2)^2*(1-y^2)^2", 0.0, 0.9), 2.0 * 0.19 * 0.19, 1e-15);
}

void expect_parse_error(const std::string& text, std::size_t offset) {
  try {
    (void)Expr::parse(text);
    FAIL() << "no error for '" << text << "'";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), offset) << text << ": " << e.what();
  }
}

TEST(Expr, ParseErrorsReportByteOffset) {
  expect_parse_error("", 0);
  expect_parse_error("   ", 3);
  expect_parse_error("2*", 2);
  expect_parse_error("foo(x)", 0);
  expect_parse_error("1 + bar", 4);
  expect_parse_error("(1+2", 4);
  expect_parse_error("1+2)", 3);
  expect_parse_error("sin()", 4);
  expect_parse_error("sin(x,y)", 5);
  expect_parse_error("exp x", 4);
  expect_parse_error("x^y", 2);
  expect_parse_error("x y", 2);
  expect_parse_error("x\xc2\xb7y", 1);
  expect_parse_error("1e999", 0);
}

TEST(Expr, DomainErrorsNameSubexpression) {
  const Expr e = Expr::parse("1 + 1/x");
  EXPECT_DOUBLE_EQ(e.eval(2.0, 0.0), 1.5);
  try {
    (void)e.eval(0.0, 0.0);
    FAIL();
  } catch (const DomainError& err) {
    EXPECT_EQ(err.subexpression(), "(1/x)");
  }
  EXPECT_THROW((void)ev("sqrt(x)", -1.0), DomainError);
  EXPECT_THROW((void)ev("x^-1", 0.0), DomainError);
  EXPECT_THROW((void)ev("x^0.5", -4.0), DomainError);
  EXPECT_NO_THROW((void)ev("x^2", -4.0));
}

TEST(Expr, PrintedFormIsFullyParenthesised) {
  EXPECT_EQ(Expr::parse("1-x^2").to_string(), "(1 - (x^2))");
  EXPECT_EQ(Expr::parse("-2*exp(y)").to_string(), "((-2)*exp(y))");
}

// Random trees over the full grammar.
std::string random_expr(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 9);
  std::uniform_real_distribution<double> lit(0.0, 4.0);
  auto sub = [&] { return random_expr(rng, depth - 1); };
  switch (pick(rng)) {
    case 0: return std::to_string(lit(rng));
    case 1: return "x";
    case 2: return "y";
    case 3: return "(" + sub() + " + " + sub() + ")";
    case 4: return "(" + sub() + " - " + sub() + ")";
    case 5: return sub() + "*" + sub();
    case 6: return "-" + sub();
    case 7: return "(" + sub() + ")^" + std::to_string(std::uniform_int_distribution<int>(0, 3)(rng));
    case 8: return "cos(" + sub() + ")";
    default: return "exp(" + sub() + "/4)";
  }
}

TEST(Expr, PropertyPrintParseRoundTrip) {
  std::mt19937 rng(7);
  for (int i = 0; i < 300; ++i) {
    const std::string text = random_expr(rng, 4);
    const Expr a = Expr::parse(text);
    const Expr b = Expr::parse(a.to_string());
    ASSERT_TRUE(a == b) << text << " -> " << a.to_string();
    EXPECT_EQ(b.to_string(), a.to_string());
    for (double x : {-0.7, 0.3}) {
      const double va = a.eval(x, 0.4);
      const double vb = b.eval(x, 0.4);
      if (std::isfinite(va)) {
        EXPECT_EQ(va, vb) << text;
      }
    }
  }
}

TEST(Expr, StructuralEqualityDistinguishesTrees) {
  EXPECT_TRUE(Expr::parse("x+1") == Expr::parse("(x) + 1"));
  EXPECT_FALSE(Expr::parse("x+1") == Expr::parse("1+x"));
  EXPECT_FALSE(Expr::parse("sin(x)") == Expr::parse("cos(x)"));
  EXPECT_FALSE(Expr::parse("x^2") == Expr::parse("x^3"));
}

}  // namespace
}  // namespace igp
