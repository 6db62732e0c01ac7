#include "lagconn/chart.hpp"
#include "lagconn/error.hpp"
#include "lagconn/expr.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace lagconn;

namespace {
const std::vector<std::string> names{"x", "y", "z"};
Expr P(const char* s) { return parse_expr(s, names); }
std::string S(const Expr& e) { return e.to_string(names); }
}  // namespace

TEST_CASE("canonical form cancels common factors") {
  CHECK(P("(x^2-1)/(x-1)") == P("x+1"));
  CHECK(P("x/x") == P("1"));
  CHECK(P("(x*y+y)/(2*y)") == P("x/2+1/2"));
  CHECK(P("1/(x-y) + 1/(y-x)").is_zero());
  CHECK(P("(x+y)^3") == P("x^3+3*x^2*y+3*x*y^2+y^3"));
}

TEST_CASE("unary minus binds tighter than power") {
  CHECK(P("-x^2") == P("x^2"));
  CHECK(P("-(x^2)") == -P("x^2"));
  CHECK(P("0-x^2") == -P("x^2"));
}

TEST_CASE("printing round-trips through the parser") {
  for (const char* s : {"x^2*y - 3/4*z", "1/(1+x^2)", "(x-y)/(x+y)^2", "-x^2", "-7/3", "x*y*z - 1"}) {
    const Expr e = P(s);
    CAPTURE(s);
    CHECK(P(S(e).c_str()) == e);
  }
}

TEST_CASE("partial derivatives") {
  CHECK(P("x^3*y").partial(0) == P("3*x^2*y"));
  CHECK(P("1/(1+x^2)").partial(0) == P("-2*x/(1+x^2)^2"));
  CHECK(P("x/y").partial(1) == P("-x/y^2"));
  CHECK(P("z").partial(0).is_zero());
}

TEST_CASE("exact and float evaluation agree") {
  const Expr e = P("(x^2+y)/(1+z^2)");
  const std::vector<Rational> q{Rational(1, 2), Rational(-3), Rational(2)};
  CHECK(e.eval(q) == Rational(-11, 20));
  const std::vector<double> d{0.5, -3.0, 2.0};
  CHECK(e.eval_float(d) == doctest::Approx(-0.55));
  CompiledExpr c(e);
  double out = 0.0;
  REQUIRE(c.eval(d.data(), out));
  CHECK(out == doctest::Approx(-0.55));
}

TEST_CASE("compiled evaluator reports poles") {
  CompiledExpr c(P("1/(x-1)"));
  const std::vector<double> at{1.0, 0.0, 0.0};
  double out = 0.0;
  CHECK_FALSE(c.eval(at.data(), out));
}

TEST_CASE("substitution composes") {
  const Expr e = P("x*y + z");
  const std::vector<Expr> vals{P("y"), P("y"), P("x^2")};
  CHECK(e.substitute(vals) == P("y^2 + x^2"));
}

TEST_CASE("parser errors carry codes") {
  auto code_of = [](const char* s) {
    try {
      P(s);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::NotApplicable;
  };
  CHECK(code_of("x+") == ErrorCode::SyntaxError);
  CHECK(code_of("(x") == ErrorCode::SyntaxError);
  CHECK(code_of("w*2") == ErrorCode::UnknownIdentifier);
  CHECK(code_of("x/0") == ErrorCode::SyntaxError);
}

TEST_CASE("sample points are deterministic and inside the domain") {
  std::vector<Interval> dom(2);
  dom[0].hi = Rational(1);
  dom[1].lo = Rational(-2);
  dom[1].hi = Rational(3);
  ChartSpec c({"a", "b"}, {0}, {}, {1}, dom);
  const auto s1 = c.sample_points(10, 7), s2 = c.sample_points(10, 7);
  REQUIRE(s1.size() == 10);
  CHECK(s1 == s2);
  for (const auto& p : s1) CHECK(c.in_domain(p));
  CHECK(c.sample_points(10, 8) != s1);
}
