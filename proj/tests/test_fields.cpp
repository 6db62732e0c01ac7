#include "lagconn/error.hpp"
#include "lagconn/fields.hpp"
#include "lagconn/random.hpp"

#include <doctest.h>

using namespace lagconn;

namespace {
const ChartSpec C({"q1", "q2", "p1", "p2"}, {0, 1}, {}, {2, 3});
const IndexList ALL{0, 1, 2, 3};
DifferentialForm term(const IndexTuple& idx, const char* c) { return DifferentialForm::term(4, idx, C.parse(c)); }
VectorField field(std::vector<const char*> cs) {
  VectorField x(4);
  for (std::size_t i = 0; i < cs.size(); ++i) x[i] = C.parse(cs[i]);
  return x;
}
}  // namespace

TEST_CASE("exterior derivative of a function and of a one-form") {
  const auto f = DifferentialForm::function(C.parse("q1^2*p2"));
  const auto df = exterior_derivative(f);
  CHECK(df.component({0}) == C.parse("2*q1*p2"));
  CHECK(df.component({3}) == C.parse("q1^2"));
  const auto a = term({0}, "p1");  // p1 dq1
  CHECK(exterior_derivative(a) == term({2, 0}, "1"));
}

TEST_CASE("wedge is graded commutative") {
  const auto a = term({0}, "q2") + term({2}, "1");
  const auto b = term({1}, "p1");
  CHECK(wedge(a, b) == -wedge(b, a));
  const auto two = term({0, 2}, "q1");
  CHECK(wedge(two, b) == wedge(b, two));
  CHECK(wedge(a, a).is_zero());
}

TEST_CASE("component sign follows index order") {
  const auto w = term({2, 0}, "3");
  CHECK(w.component({0, 2}) == C.parse("-3"));
  CHECK(w.component({2, 0}) == C.parse("3"));
  CHECK(w.component({0, 0}).is_zero());
}

TEST_CASE("interior product and evaluation") {
  const auto w = term({0, 2}, "1") + term({1, 3}, "1");
  const auto x = VectorField::coordinate(4, 0);
  CHECK(interior_product(x, w) == term({2}, "1"));
  CHECK(evaluate(w, {VectorField::coordinate(4, 1), VectorField::coordinate(4, 3)}) == C.parse("1"));
  CHECK_THROWS_AS(interior_product(x, DifferentialForm::function(C.parse("1"))), Error);
}

TEST_CASE("randomized d o d = 0 and Cartan formula") {
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    const std::size_t deg = 1 + t % 3;
    const auto a = random_form(4, deg, ALL, 2, rng);
    CHECK(exterior_derivative(exterior_derivative(a)).is_zero());
    VectorField x(4);
    for (std::size_t i = 0; i < 4; ++i) x[i] = random_polynomial(4, ALL, 2, rng);
    CHECK(lie_derivative(x, a) == cartan_lie_derivative(x, a, ALL));
  }
}

TEST_CASE("lie bracket") {
  const auto x = field({"0", "0", "q1", "0"});
  const auto y = field({"1", "0", "0", "0"});
  CHECK(lie_bracket(x, y) == field({"0", "0", "-1", "0"}));
  CHECK(lie_bracket(x, x).is_zero());
  Rng rng(3);
  VectorField a(4), b(4), c(4);
  for (std::size_t i = 0; i < 4; ++i) {
    a[i] = random_polynomial(4, ALL, 2, rng);
    b[i] = random_polynomial(4, ALL, 2, rng);
    c[i] = random_polynomial(4, ALL, 2, rng);
  }
  const auto jac = lie_bracket(a, lie_bracket(b, c)) + lie_bracket(b, lie_bracket(c, a)) + lie_bracket(c, lie_bracket(a, b));
  CHECK(jac.is_zero());
}

TEST_CASE("vertical exterior derivative only differentiates fiber directions") {
  const ChartSpec P({"x", "y", "p"}, {0}, {1}, {2});
  const auto a = DifferentialForm::term(3, {1}, P.parse("x*p^2"));
  const auto dv = vertical_exterior_derivative(P, a);
  CHECK(dv.component({1, 2}) == P.parse("-2*x*p"));
  CHECK(dv.component({0, 1}).is_zero());
  CHECK(vertical_exterior_derivative(P, dv).is_zero());
}

TEST_CASE("vertical lie derivative requires a vertical field") {
  const ChartSpec P({"x", "y", "p"}, {0}, {1}, {2});
  const auto a = DifferentialForm::term(3, {1}, P.parse("p"));
  VectorField v(3);
  v[2] = P.parse("1");
  CHECK(vertical_lie_derivative(P, v, a) == DifferentialForm::term(3, {1}, P.parse("1")));
  VectorField h(3);
  h[0] = P.parse("1");
  try {
    vertical_lie_derivative(P, h, a);
    FAIL("expected NotVertical");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotVertical);
  }
}

TEST_CASE("verticality and projectability") {
  CHECK(is_vertical(C, field({"0", "0", "1", "0"})));
  CHECK(is_projectable(C, field({"0", "0", "1", "0"})));
  CHECK_FALSE(is_vertical(C, field({"q1", "0", "0", "0"})));
  CHECK(is_projectable(C, field({"q1", "0", "0", "0"})));
  CHECK_FALSE(is_projectable(C, field({"p1", "0", "0", "0"})));
}

TEST_CASE("bracket of vertical and projectable is vertical") {
  const auto x = field({"0", "0", "q1*p2", "p1^2"});
  const auto y = field({"q2", "q1^2", "p1", "3"});
  REQUIRE(is_vertical(C, x));
  REQUIRE(is_projectable(C, y));
  CHECK(is_vertical(C, lie_bracket(x, y)));
}
