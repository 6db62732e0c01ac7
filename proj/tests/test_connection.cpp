#include "fixtures.hpp"

#include "lagconn/connection.hpp"
#include "lagconn/error.hpp"
#include "lagconn/random.hpp"

#include <doctest.h>

using namespace lagconn;

namespace {
CovariantTensor as_tensor(const Connection& a) {
  const std::size_t n = a.dim();
  CovariantTensor t(n, 2, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) t.set({j, k}, i, a.gamma(i, j, k));
  return t;
}
}  // namespace

TEST_CASE("Bott connection of the canonical structure vanishes") {
  const auto s = fx::canonical();
  const auto b = bott_connection(s);
  CHECK(b.is_zero());
  CHECK(torsion(b).is_zero());
  CHECK(curvature(b).is_zero());
}

TEST_CASE("twisted Bott connection and its torsion") {
  const auto s = fx::twisted();
  const auto& c = s.chart;
  const auto b = bott_connection(s);
  CHECK(b.gamma(3, 2, 3) == c.parse("1/(p1-1)"));
  CHECK(b.gamma(3, 3, 2).is_zero());
  const auto t = torsion(b);
  CHECK(t.at({2, 3}, 3) == c.parse("1/(p1-1)"));
  CHECK(torsion_musical_defect(s, b).is_zero());
  CHECK(bott_identity_residual(s, b).is_zero());
  CHECK(curvature(b).is_zero());
}

TEST_CASE("closed twisted Bott connection is torsion-free") {
  const auto s = fx::twisted_closed();
  const auto b = bott_connection(s);
  CHECK(b.gamma(3, 2, 2) == s.chart.parse("-1"));
  CHECK(torsion(b).is_zero());
  CHECK(curvature(b).is_zero());
}

TEST_CASE("symplectization on random closed forms") {
  Rng rng(5);
  const auto c = fx::r4();
  for (int t = 0; t < 5; ++t) {
    const auto w = random_closed_symplectic(c, 2, rng);
    const auto n0 = random_connection(4, 2, rng);
    const auto g = symplectize(n0, w);
    CHECK(torsion(g).is_zero());
    CHECK(nabla_form(g, w).is_zero());
    CHECK(symplectize(n0, w, SymplectizeFormula::Expanded) == g);
    CHECK(symplectize(g, w) == g);
    CHECK(symplectize(g, w, SymplectizeFormula::TorsionFree) == g);
  }
}

TEST_CASE("symplectization needs a nondegenerate form") {
  const auto c = fx::r4();
  DifferentialForm w(4, 2);
  w.add({0, 1}, c.parse("1"));
  CHECK_THROWS_AS(symplectize(Connection(4), w), Error);
}

TEST_CASE("Darboux connection restricts to Bott") {
  const auto s = fx::twisted_closed();
  const auto& c = s.chart;
  const auto d = darboux_connection(c, {c.var(0), c.var(1), c.var(2), c.parse("p2-p1^2/2")}, {0, 1, 2, 3});
  CHECK(torsion(d).is_zero());
  CHECK(nabla_form(d, s.form).is_zero());
  CHECK(preserves_distribution(d, s.L).preserves);
  CHECK(restricts_to_bott(d, s));
  CHECK(curvature(d).is_zero());
}

TEST_CASE("blend requires a partition of unity") {
  const auto s = fx::canonical();
  const auto& c = s.chart;
  Connection a(4), b(4);
  b.set_gamma(2, 0, 0, c.parse("6"));
  const auto m = blend({a, b}, {c.parse("1/(1+q1^2)"), c.parse("q1^2/(1+q1^2)")});
  CHECK(m.gamma(2, 0, 0) == c.parse("6*q1^2/(1+q1^2)"));
  CHECK(torsion(m).is_zero());
  CHECK(nabla_form(m, s.form).is_zero());
  try {
    blend({a, b}, {c.parse("1/2"), c.parse("1/3")});
    FAIL("expected WeightsNotPartition");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WeightsNotPartition);
  }
}

TEST_CASE("difference of two valid connections is classified") {
  const auto s = fx::twisted_closed();
  const auto& c = s.chart;
  const IndexList all{0, 1, 2, 3};
  const auto d1 = darboux_connection(c, {c.var(0), c.var(1), c.var(2), c.parse("p2-p1^2/2")}, all);
  const auto d2 = darboux_connection(c, {c.var(0), c.var(1), c.parse("p1+3*q1^2"), c.parse("p2-p1^2/2")}, all);
  const auto diff = difference_tensor(d2, d1, s);
  const auto rep = classify_difference(diff.lowered, s);
  CHECK(rep.passed());
  CHECK(add_difference(d1, diff.S) == d2);
}

TEST_CASE("classification reports a witness for a non-symmetric tensor") {
  const auto s = fx::canonical();
  CovariantTensor S(4, 2, 4);
  S.set({0, 1}, 2, s.chart.parse("1"));
  const auto rep = classify_difference(lower_with_form(S, s), s);
  CHECK_FALSE(rep.passed());
  const auto* sym = rep.find("totally-symmetric");
  REQUIRE(sym);
  CHECK_FALSE(sym->passed);
  CHECK(sym->witness.has_value());
}

TEST_CASE("admissible difference basis on canonical R4") {
  const auto s = fx::canonical();
  const auto basis = admissible_difference_basis(s);
  CHECK(basis.size() == 10);
  for (const auto& S : basis) {
    CHECK(classify_difference(lower_with_form(S, s), s).passed());
    const auto n = add_difference(Connection(4), S);
    CHECK(torsion(n).is_zero());
    CHECK(nabla_form(n, s.form).is_zero());
    CHECK(restricts_to_bott(n, s));
  }
}

TEST_CASE("torsion / exterior-derivative defect vanishes on random inputs") {
  Rng rng(21);
  for (std::size_t dim : {4u, 6u})
    for (unsigned deg = 1; deg <= 3; ++deg) {
      IndexList all;
      for (std::size_t i = 0; i < dim; ++i) all.push_back(i);
      const auto n = random_connection(dim, deg, rng);
      const auto a = random_form(dim, 2, all, deg, rng);
      CHECK(torsion_dform_defect(n, a).is_zero());
    }
}

TEST_CASE("symplectize of an L-preserving input restricts to Bott") {
  const auto s = fx::twisted_closed();
  const auto& c = s.chart;
  Rng rng(9);
  const auto d = darboux_connection(c, {c.var(0), c.var(1), c.var(2), c.parse("p2-p1^2/2")}, {0, 1, 2, 3});
  const auto a = random_L_preserving_perturbation(s, 1, rng);
  const auto g = symplectize(add_difference(d, as_tensor(a)), s.form);
  CHECK(torsion(g).is_zero());
  CHECK(nabla_form(g, s.form).is_zero());
  CHECK(preserves_distribution(g, s.L).preserves);
  CHECK(restricts_to_bott(g, s));
}

TEST_CASE("parallel and serial kernels agree") {
  Rng rng(4);
  const auto n = random_connection(4, 2, rng);
  CHECK(curvature(n, ExecPolicy::Serial) == curvature(n, ExecPolicy::Parallel));
  CHECK(torsion(n, ExecPolicy::Serial) == torsion(n, ExecPolicy::Parallel));
  const auto w = random_closed_symplectic(fx::r4(), 1, rng);
  CHECK(symplectize(n, w, SymplectizeFormula::General, ExecPolicy::Serial) ==
        symplectize(n, w, SymplectizeFormula::General, ExecPolicy::Parallel));
}

TEST_CASE("partial connections reject out-of-scope entries") {
  Connection p(4, {2, 3}, {2, 3});
  CHECK_THROWS_AS(p.set_gamma(0, 2, 2, fx::r4().parse("1")), Error);
}
