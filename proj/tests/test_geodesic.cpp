#include "fixtures.hpp"

#include "lagconn/connection.hpp"
#include "lagconn/error.hpp"
#include "lagconn/geodesic.hpp"

#include <doctest.h>

#include <cmath>

using namespace lagconn;

TEST_CASE("flat Bott geodesics are straight lines") {
  const auto s = fx::canonical();
  const GeodesicSystem sys(s.chart, bott_connection(s), s.L);
  CHECK(sys.flat_coordinates());
  const std::vector<double> q{0.3, -0.2, 0.1, 0.4}, u{0.5, -1.0};
  const auto e = exp_point(sys, q, u);
  CHECK(e.steps == 0);
  CHECK(e.point[2] == doctest::Approx(0.6));
  CHECK(e.point[3] == doctest::Approx(-0.6));
  const auto g = sys.integrate(q, u, 1.0, 16);
  for (std::size_t t = 0; t < g.times.size(); ++t)
    CHECK(std::abs(g.positions[t][2] - (0.1 + 0.5 * g.times[t])) <= 1e-12);
}

TEST_CASE("twisted geodesic converges at fourth order to the exact solution") {
  const auto s = fx::twisted();
  const GeodesicSystem sys(s.chart, bott_connection(s), s.L);
  const std::vector<double> q{0, 0, 0, 0}, u{0.5, 1.0};
  // p1 = t/2, p2' = 1 / (1 - p1) -> p2(1) = 2 ln 2
  const double exact = 2.0 * std::log(2.0);
  double prev = 0.0;
  for (std::size_t n : {8u, 16u, 32u, 64u}) {
    const double err = std::abs(sys.integrate(q, u, 1.0, n).end()[3] - exact);
    if (prev > 0.0) CHECK(std::log2(prev / err) == doctest::Approx(4.0).epsilon(0.05));
    prev = err;
  }
  const auto e = exp_point(sys, q, u);
  CHECK(e.halving_change < 1e-10);
  CHECK(e.point[3] == doctest::Approx(exact).epsilon(1e-10));
}

TEST_CASE("leaving the domain is reported") {
  const auto s = fx::twisted();
  const GeodesicSystem sys(s.chart, bott_connection(s), s.L);
  try {
    sys.integrate({0, 0, 0, 0}, {2.0, 0.0}, 1.0, 32);
    FAIL("expected LeftDomain");
  } catch (const Error& e) {
    CHECK((e.code() == ErrorCode::LeftDomain || e.code() == ErrorCode::PoleOnPath));
  }
  CHECK_THROWS_AS(sys.integrate({0, 0, 2, 0}, {0.1, 0.0}, 1.0, 8), Error);
}

TEST_CASE("Jacobi fields are affine and exp is affine in autoparallel coordinates") {
  const auto s = fx::twisted_closed();
  const auto& c = s.chart;
  const GeodesicSystem sys(c, bott_connection(s), s.L);
  const auto path = sys.integrate({0.1, 0.2, 0.3, 0.4}, {0.5, -0.25}, 1.0, 64);
  const auto j = jacobi_transport(sys, path, {0.3, -0.2}, {1.0, 0.5});
  CHECK(j.affine_residual < 1e-8);
  CHECK(j.at_most_one_zero);
  const std::vector<Expr> F{c.var(0), c.var(1), c.var(2), c.parse("p2-p1^2/2")};
  CHECK(exp_affinity_residual(sys, {0.1, 0.2, 0.3, 0.4}, {{1, 0.5}, {-0.5, 0.25}, {0.2, -0.7}}, F) < 1e-8);
}

TEST_CASE("Jacobi transport refuses torsionful connections") {
  const auto s = fx::twisted();
  const GeodesicSystem sys(s.chart, bott_connection(s), s.L);
  const auto path = sys.integrate({0, 0, 0, 0}, {0.1, 0.1}, 1.0, 8);
  CHECK_THROWS_AS(jacobi_transport(sys, path, {1, 0}, {0, 1}), Error);
}

TEST_CASE("exact Euler field for a graph embedding") {
  const auto s = fx::twisted_closed();
  const auto& c = s.chart;
  const GeodesicSystem sys(c, bott_connection(s), s.L);
  const Embedding Q{"graph", {{2, c.parse("q1")}, {3, c.parse("q2^2")}}};
  const auto e = solve_euler_field(sys, Q);
  CHECK(e.exact);
  CHECK(e.field[2] == c.parse("p1-q1"));
  CHECK(e.field[3] == c.parse("q1^2/2 - q1*p1 - q2^2 + p1^2/2 + p2"));
  CHECK(fx::all_zero(euler_defect(bott_connection(s), s.L, e.field)));
  const std::vector<double> x{0.3, 0.2, 0.7, -0.4};
  const auto num = euler_field_at(sys, Q, x);
  CHECK(num[2] == doctest::Approx(e.field[2].eval_float(x)).epsilon(1e-6));
  CHECK(num[3] == doctest::Approx(e.field[3].eval_float(x)).epsilon(1e-6));
  const auto z = solve_euler_field(sys, zero_section());
  CHECK(is_covariantly_constant(bott_connection(s), s.L, e.field - z.field));
}

TEST_CASE("batch integration matches single paths") {
  const auto s = fx::twisted();
  const GeodesicSystem sys(s.chart, bott_connection(s), s.L);
  const std::vector<std::vector<double>> qs{{0, 0, 0, 0}, {0.1, 0.2, 0.3, 0.4}};
  const std::vector<std::vector<double>> us{{0.2, 0.1}, {-0.1, 0.3}};
  const auto serial = integrate_batch(sys, qs, us, 1.0, 32, ExecPolicy::Serial);
  const auto par = integrate_batch(sys, qs, us, 1.0, 32, ExecPolicy::Parallel);
  REQUIRE(serial.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) CHECK(serial[i].end() == par[i].end());
}

TEST_CASE("CSV export header") {
  const auto s = fx::canonical();
  const GeodesicSystem sys(s.chart, bott_connection(s), s.L);
  const auto csv = path_csv(sys, sys.integrate({0, 0, 0, 0}, {1, 0}, 1.0, 2));
  CHECK(csv.rfind("t,q1,q2,p1,p2,v_p1,v_p2\n", 0) == 0);
}
