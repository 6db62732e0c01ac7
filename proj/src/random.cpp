#include "lagconn/random.hpp"

#include "lagconn/error.hpp"
#include "lagconn/linalg.hpp"

namespace lagconn {

long Rng::integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(gen_); }

Rational Rng::coefficient() {
  long p = 0;
  while (p == 0) p = integer(-5, 5);
  Rational c(p, integer(1, 3));
  c.canonicalize();
  return c;
}

Expr random_polynomial(std::size_t nvars, const IndexList& vars, unsigned max_degree, Rng& rng, unsigned terms) {
  Polynomial out(nvars);
  const long count = rng.integer(1, terms);
  for (long t = 0; t < count; ++t) {
    Exponents e(nvars, 0);
    const long deg = rng.integer(0, max_degree);
    for (long d = 0; d < deg && !vars.empty(); ++d) ++e[vars[rng.integer(0, vars.size() - 1)]];
    out += Polynomial::monomial(e, rng.coefficient());
  }
  return Expr(out);
}

DifferentialForm random_form(std::size_t dim, std::size_t degree, const IndexList& dirs, unsigned max_degree,
                             Rng& rng, double density) {
  DifferentialForm out(dim, degree);
  std::bernoulli_distribution keep(density);
  for (const auto& key : tuples(dirs, degree, true))
    if (keep(rng.engine())) out.add(key, random_polynomial(dim, dirs, max_degree, rng));
  if (out.is_zero() && degree <= dirs.size()) {
    IndexTuple key(dirs.begin(), dirs.begin() + degree);
    out.add(key, random_polynomial(dim, dirs, max_degree, rng));
  }
  return out;
}

Connection random_connection(std::size_t dim, unsigned max_degree, Rng& rng, double density) {
  Connection out(dim);
  std::bernoulli_distribution keep(density);
  IndexList all(dim);
  for (std::size_t i = 0; i < dim; ++i) all[i] = i;
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j)
      for (std::size_t k = 0; k < dim; ++k)
        if (keep(rng.engine())) out.set_gamma(i, j, k, random_polynomial(dim, all, max_degree, rng));
  return out;
}

DifferentialForm random_closed_symplectic(const ChartSpec& chart, unsigned max_degree, Rng& rng) {
  const std::size_t dim = chart.dim();
  const std::size_t n = dim / 2;
  IndexList all = chart.all();
  for (int attempt = 0; attempt < 64; ++attempt) {
    DifferentialForm w(dim, 2);
    for (std::size_t i = 0; i < n; ++i) w.add({i, i + n}, chart.constant(1));
    w = w + exterior_derivative(random_form(dim, 1, all, max_degree + 1, rng, 0.5));
    Matrix<Expr> m(dim, std::vector<Expr>(dim, chart.zero()));
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) m[i][j] = w.component({i, j});
    if (!determinant(m, chart.zero()).is_zero()) return w;
  }
  throw Error(ErrorCode::Degenerate, "could not draw a nondegenerate closed 2-form");
}

Connection random_L_preserving_perturbation(const GeometricStructure& s, unsigned max_degree, Rng& rng) {
  const std::size_t dim = s.dim();
  Connection out(dim);
  std::bernoulli_distribution keep(0.5);
  const IndexList all = s.chart.all();
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j)
      for (std::size_t k = 0; k < dim; ++k) {
        const bool jl = s.in_L(j), kl = s.in_L(k);
        if (jl && kl) continue;
        if (!s.in_L(i) && (jl || kl)) continue;
        if (keep(rng.engine())) out.set_gamma(i, j, k, random_polynomial(dim, all, max_degree, rng));
      }
  return out;
}

}  // namespace lagconn
