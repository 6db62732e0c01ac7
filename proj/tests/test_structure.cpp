#include "fixtures.hpp"

#include "lagconn/error.hpp"

#include <doctest.h>

using namespace lagconn;

TEST_CASE("canonical structure validates exactly") {
  const auto s = fx::canonical();
  const auto rep = validate(s, s.chart.sample_points(5, 1));
  CHECK(rep.passed());
  for (const auto& r : rep.checks) CHECK(r.status == Status::ExactPass);
}

TEST_CASE("non-closed twisted structure fails closedness with a witness") {
  const auto s = fx::twisted();
  const auto rep = validate(s, s.chart.sample_points(5, 1));
  const auto* closed = rep.find("closed");
  REQUIRE(closed);
  CHECK(closed->status == Status::Fail);
  CHECK_FALSE(closed->witness.empty());
  CHECK(rep.find("L-isotropic")->passed());
  CHECK(rep.find("nondegenerate")->passed());
}

TEST_CASE("non-isotropic L is rejected") {
  auto s = fx::canonical();
  s.form.add({2, 3}, s.chart.parse("1"));
  const auto rep = validate(s, s.chart.sample_points(3, 1));
  CHECK_FALSE(rep.find("L-isotropic")->passed());
}

TEST_CASE("degenerate form is rejected") {
  auto s = fx::canonical();
  s.form = DifferentialForm(4, 2);
  s.form.add({0, 2}, s.chart.parse("1"));
  s.form.add({1, 3}, s.chart.parse("q1"));
  const auto rep = validate(s, {Point{Rational(0), Rational(0), Rational(0), Rational(0)}});
  CHECK_FALSE(rep.find("nondegenerate")->passed());
}

TEST_CASE("pairing determinant and musical maps") {
  const auto s = fx::twisted();
  const Expr det = pairing_determinant(s);
  CHECK_FALSE(det.is_zero());
  CHECK(det.eval(Point{Rational(0), Rational(0), Rational(1), Rational(0)}) == Rational(0));
  const Point at{Rational(0), Rational(0), Rational(1, 2), Rational(0)};
  DifferentialForm a(4, 1);
  a.add({1}, s.chart.parse("1"));
  const auto u = musical_sharp_on_L(s, a, at);
  REQUIRE(u.size() == 4);
  CHECK(u[0] == 0);
  CHECK(u[1] == 0);
  VectorField x(4);
  for (std::size_t i = 0; i < 4; ++i) x[i] = Expr(4, u[i]);
  const auto flat = musical_flat(s, x);
  CHECK(flat.component({1}).eval(at) == Rational(1));
  CHECK(flat.component({0}).eval(at) == Rational(0));
}

TEST_CASE("canonical poly model is vertically closed and valid") {
  const auto P = canonical_poly_model(1, 2, 1, 2);
  CHECK(P.chart.dim() == 7);
  CHECK(P.kind == Kind::Poly);
  CHECK(validate(P, P.chart.sample_points(3, 2)).passed());
  CHECK(vertical_exterior_derivative(P.chart, canonical_poly_theta(P)) == -P.form);
}

TEST_CASE("canonical multi model is closed, horizontal and valid") {
  const auto M = canonical_multi_model(2, 1, 2, 2);
  CHECK(M.chart.dim() == 6);
  const auto rep = validate(M, M.chart.sample_points(3, 2));
  CHECK(rep.passed());
  CHECK(rep.find("horizontality") != nullptr);
  CHECK(exterior_derivative(canonical_multi_theta(M)) == -M.form);
}

TEST_CASE("structure invariants") {
  auto s = fx::canonical();
  s.L = {2, 9};
  CHECK_THROWS_AS(s.check_invariants(), Error);
  s.L = {2};
  CHECK_THROWS_AS(s.check_invariants(), Error);
  auto t = fx::canonical();
  t.form = DifferentialForm(4, 3);
  CHECK_THROWS_AS(t.check_invariants(), Error);
}
