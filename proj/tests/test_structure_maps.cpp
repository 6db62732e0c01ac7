#include "fixtures.hpp"

#include "lagconn/error.hpp"
#include "lagconn/geodesic.hpp"
#include "lagconn/structure_maps.hpp"

#include <doctest.h>

using namespace lagconn;

namespace {
DifferentialForm two(const ChartSpec& c, const IndexTuple& idx, const char* e) {
  return DifferentialForm::term(c.dim(), idx, c.parse(e));
}
ErrorCode descend_code(const DifferentialForm& a, const GeometricStructure& s, std::string* msg = nullptr) {
  try {
    descend_form(a, s.chart, s.distribution());
  } catch (const Error& e) {
    if (msg) *msg = e.what();
    return e.code();
  }
  return ErrorCode::NotApplicable;
}
}  // namespace

TEST_CASE("descend_form accepts basic forms and rejects the rest with witnesses") {
  const auto s = fx::canonical();
  const auto& c = s.chart;
  const auto good = two(c, {0, 1}, "q1^2*q2");
  const auto d = descend_form(good, c, s.distribution());
  CHECK(d.quotient.dim() == 2);
  CHECK(d.form.component({0, 1}) == d.quotient.parse("q1^2*q2"));
  CHECK(lift_form(d, d.form) == good);

  std::string msg;
  CHECK(descend_code(two(c, {0, 1}, "p1"), s, &msg) == ErrorCode::NotLeafConstant);
  CHECK(msg.find("(q1,q2)") != std::string::npos);
  CHECK(descend_code(two(c, {0, 2}, "1"), s, &msg) == ErrorCode::NotHorizontal);
  CHECK_FALSE(msg.empty());

  const auto b = check_basic(two(c, {0, 1}, "p2"), c, s.distribution());
  CHECK(b.horizontal);
  CHECK_FALSE(b.leaf_constant);
  CHECK_FALSE(b.witness.empty());
}

TEST_CASE("Weinstein pipeline on the flat twisted structure") {
  const auto s = fx::flat_twisted("3");
  const auto& c = s.chart;
  const auto expected = two(c, {0, 1}, "3");
  const Embedding graph{"graph", {{2, c.parse("2*q1*q2")}, {3, c.parse("q1^2")}}};
  StructureMapOptions o;
  o.expected_base_form = &expected;
  o.second_embedding = &graph;
  o.samples = c.sample_points(4, 1);
  const auto r = weinstein_verify(s, zero_section(), o);
  CHECK(r.passed());
  CHECK(r.exact);
  REQUIRE(r.theta);
  CHECK(r.theta->component({0}) == c.parse("p1"));
  CHECK(r.theta->component({1}) == c.parse("p2"));
  REQUIRE(r.theta_difference);
  const auto& q = r.theta_difference->quotient;
  // descended theta difference is dF for F = q1^2 q2, up to orientation
  const auto& td = r.theta_difference->form;
  const bool plus = td.component({0}) == q.parse("2*q1*q2") && td.component({1}) == q.parse("q1^2");
  const bool minus = td.component({0}) == q.parse("-2*q1*q2") && td.component({1}) == q.parse("-q1^2");
  CHECK((plus || minus));
}

TEST_CASE("Lagrangian zero section gives a vanishing base form") {
  const auto s = fx::flat_twisted("0");
  const DifferentialForm zero(4, 2);
  StructureMapOptions o;
  o.expected_base_form = &zero;
  o.samples = s.chart.sample_points(3, 1);
  const auto r = weinstein_verify(s, zero_section(), o);
  CHECK(r.passed());
  REQUIRE(r.base_form);
  CHECK(r.base_form->form.is_zero());
}

TEST_CASE("a wrong expected base form fails with a witness") {
  const auto s = fx::flat_twisted("3");
  const auto wrong = two(s.chart, {0, 1}, "2");
  StructureMapOptions o;
  o.expected_base_form = &wrong;
  o.samples = s.chart.sample_points(3, 1);
  const auto r = weinstein_verify(s, zero_section(), o);
  const auto* rec = r.find("expected-base-form");
  REQUIRE(rec);
  CHECK(rec->status == Status::Fail);
  CHECK_FALSE(rec->witness.empty());
}

TEST_CASE("polysymplectic model recovers its twist") {
  auto P = canonical_poly_model(1, 2, 1, 2);
  DifferentialForm tw(P.dim(), 2, 2);
  tw.add({1, 2}, P.chart.constant(5), 0);
  tw.add({1, 2}, P.chart.constant(-1), 1);
  P.form = P.form + tw;
  const Embedding E2{"shifted", {{3, P.chart.constant(1)}}};
  StructureMapOptions o;
  o.expected_base_form = &tw;
  o.second_embedding = &E2;
  o.samples = P.chart.sample_points(3, 1);
  const auto r = poly_structure_verify(P, zero_section(), o);
  CHECK(r.passed());
  CHECK(r.find("base-form-closed")->passed());
  CHECK(r.find("canonical-theta")->passed());
}

TEST_CASE("multisymplectic model recovers its twist") {
  auto M = canonical_multi_model(2, 1, 2, 2);
  DifferentialForm tw(M.dim(), 3);
  tw.add({0, 1, 2}, M.chart.constant(2));
  M.form = M.form + tw;
  StructureMapOptions o;
  o.expected_base_form = &tw;
  o.samples = M.chart.sample_points(3, 1);
  const auto r = multi_structure_verify(M, zero_section(), o);
  CHECK(r.passed());
  CHECK(r.find("base-form-horizontality")->passed());
  CHECK(r.find("base-form-closed")->passed());
}

TEST_CASE("non-closed structures fail the pipeline") {
  const auto s = fx::twisted();
  StructureMapOptions o;
  o.samples = s.chart.sample_points(3, 1);
  const auto r = weinstein_verify(s, zero_section(), o);
  CHECK_FALSE(r.passed());
  for (const auto& rec : r.checks)
    if (!rec.passed()) CHECK_FALSE(rec.witness.empty());
}
