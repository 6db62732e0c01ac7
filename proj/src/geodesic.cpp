#include "lagconn/geodesic.hpp"

#include "lagconn/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace lagconn {

namespace {

using Vec = std::vector<double>;

double norm_inf(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double norm2(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

template <class F>
void rk4_step(Vec& y, double h, F&& f) {
  const std::size_t n = y.size();
  Vec k1(n), k2(n), k3(n), k4(n), tmp(n);
  f(y, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
  f(tmp, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
  f(tmp, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
  f(tmp, k4);
  for (std::size_t i = 0; i < n; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

// Small dense solve with partial pivoting; returns false when singular.
bool dense_solve(std::vector<Vec> a, Vec b, Vec& x) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    if (a[p][c] == 0.0) return false;
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  x.assign(n, 0.0);
  for (std::size_t c = n; c-- > 0;) {
    double s = b[c];
    for (std::size_t k = c + 1; k < n; ++k) s -= a[c][k] * x[k];
    x[c] = s / a[c][c];
  }
  return true;
}

bool contains(const IndexList& l, std::size_t i) { return std::find(l.begin(), l.end(), i) != l.end(); }

}  // namespace

// ---------------------------------------------------------------------------
// Embedding

void Embedding::check(const ChartSpec& chart, const IndexList& L) const {
  for (const auto& [i, e] : section) {
    if (!contains(L, i))
      throw Error(ErrorCode::InvalidStructure, "embedding '" + name + "' sets non-L coordinate " + chart.name(i));
    for (auto j : L)
      if (e.depends_on(j))
        throw Error(ErrorCode::InvalidStructure,
                    "embedding '" + name + "' component " + chart.name(i) + " depends on " + chart.name(j));
  }
}

Expr Embedding::value(const ChartSpec& chart, std::size_t i) const {
  auto it = section.find(i);
  return it == section.end() ? chart.zero() : it->second;
}

std::vector<double> Embedding::foot(const ChartSpec& chart, const IndexList& L, const std::vector<double>& x) const {
  Vec out = x;
  for (auto i : L) {
    double v = 0.0;
    auto it = section.find(i);
    if (it != section.end() && !CompiledExpr(it->second).eval(x.data(), v))
      throw Error(ErrorCode::PoleAtPoint, "embedding '" + name + "' is singular at the base point");
    out[i] = v;
  }
  (void)chart;
  return out;
}

Point Embedding::foot(const ChartSpec& chart, const IndexList& L, const Point& x) const {
  Point out = x;
  for (auto i : L) out[i] = value(chart, i).eval(x);
  return out;
}

Embedding zero_section(const std::string& name) { return Embedding{name, {}}; }

// ---------------------------------------------------------------------------
// GeodesicSystem

GeodesicSystem::GeodesicSystem(ChartSpec chart, Connection nabla, IndexList L)
    : chart_(std::move(chart)), nabla_(std::move(nabla)), L_(std::move(L)) {
  for (auto i : L_)
    if (!nabla_.in_directions(i) || !nabla_.in_values(i))
      throw Error(ErrorCode::OutOfScope, "connection scope does not cover " + chart_.name(i));
  const std::size_t m = L_.size();
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      for (std::size_t c = 0; c < m; ++c) {
        const Expr& g = nabla_.gamma(L_[a], L_[b], L_[c]);
        if (!g.is_zero()) entries_.push_back({a, b, c, CompiledExpr(g)});
      }
  flat_ = entries_.empty();
}

void GeodesicSystem::contract(const double* x, const double* v, const double* w, double* out) const {
  std::fill(out, out + L_.size(), 0.0);
  for (const auto& e : entries_) {
    double g = 0.0;
    if (!e.gamma.eval(x, g) || !std::isfinite(g))
      throw Error(ErrorCode::PoleOnPath, "Christoffel symbol is singular on the path");
    out[e.i] += g * v[e.j] * w[e.k];
  }
}

void GeodesicSystem::acceleration(const double* x, const double* v, double* a) const {
  contract(x, v, v, a);
  for (std::size_t i = 0; i < L_.size(); ++i) a[i] = -a[i];
}

GeodesicPath GeodesicSystem::integrate(const std::vector<double>& q, const std::vector<double>& u, double t_end,
                                       std::size_t steps) const {
  const std::size_t m = L_.size();
  if (q.size() != chart_.dim() || u.size() != m)
    throw Error(ErrorCode::DegreeMismatch, "geodesic start has the wrong dimension");
  if (steps == 0) throw Error(ErrorCode::PreconditionViolated, "geodesic needs at least one step");
  if (!chart_.in_domain(std::span<const double>(q)))
    throw Error(ErrorCode::OutOfDomain, "geodesic start lies outside the chart domain");
  GeodesicPath path;
  path.step = t_end / static_cast<double>(steps);
  const double h = path.step;
  Vec x = q;
  Vec y(2 * m);
  for (std::size_t a = 0; a < m; ++a) {
    y[a] = q[L_[a]];
    y[m + a] = u[a];
  }
  auto rhs = [&](const Vec& s, Vec& d) {
    for (std::size_t a = 0; a < m; ++a) x[L_[a]] = s[a];
    for (std::size_t a = 0; a < m; ++a) d[a] = s[m + a];
    acceleration(x.data(), s.data() + m, d.data() + m);
  };
  auto record = [&](double t) {
    Vec pos = q;
    for (std::size_t a = 0; a < m; ++a) pos[L_[a]] = y[a];
    path.times.push_back(t);
    path.positions.push_back(std::move(pos));
    path.velocities.emplace_back(y.begin() + m, y.end());
  };
  record(0.0);
  Vec mid(2 * m), acc(m);
  for (std::size_t s = 0; s < steps; ++s) {
    const Vec prev = y;
    rk4_step(y, h, rhs);
    const double t = h * static_cast<double>(s + 1);
    for (double v : y)
      if (!std::isfinite(v)) throw Error(ErrorCode::PoleOnPath, "path diverged at t = " + std::to_string(t));
    Vec pos = q;
    for (std::size_t a = 0; a < m; ++a) pos[L_[a]] = y[a];
    if (!chart_.in_domain(std::span<const double>(pos)))
      throw Error(ErrorCode::LeftDomain, "geodesic leaves the chart domain at t = " + std::to_string(t));
    // cubic Hermite midpoint: x'' = (v1 − v0)/h must match −Γ(x', x')
    Vec xm = q;
    for (std::size_t a = 0; a < m; ++a) {
      xm[L_[a]] = 0.5 * (prev[a] + y[a]) + h * (prev[m + a] - y[m + a]) / 8.0;
      mid[a] = 1.5 * (y[a] - prev[a]) / h - 0.25 * (prev[m + a] + y[m + a]);
    }
    acceleration(xm.data(), mid.data(), acc.data());
    for (std::size_t a = 0; a < m; ++a)
      path.max_midpoint_defect =
          std::max(path.max_midpoint_defect, std::abs((y[m + a] - prev[m + a]) / h - acc[a]));
    record(t);
  }
  return path;
}

GeodesicPath integrate_geodesic(const GeodesicSystem& sys, const std::vector<double>& q,
                                const std::vector<double>& u, double t_end, std::size_t steps) {
  return sys.integrate(q, u, t_end, steps);
}

std::vector<GeodesicPath> integrate_batch(const GeodesicSystem& sys, const std::vector<std::vector<double>>& qs,
                                          const std::vector<std::vector<double>>& us, double t_end,
                                          std::size_t steps, ExecPolicy policy) {
  if (qs.size() != us.size()) throw Error(ErrorCode::DegreeMismatch, "batch needs one velocity per start");
  std::vector<GeodesicPath> out(qs.size());
  for_each_index(qs.size(), [&](std::size_t i) { out[i] = sys.integrate(qs[i], us[i], t_end, steps); }, policy);
  return out;
}

// ---------------------------------------------------------------------------
// exponential map

ExpResult exp_point(const GeodesicSystem& sys, const std::vector<double>& q, const std::vector<double>& u) {
  ExpResult r;
  if (sys.flat_coordinates()) {
    r.point = q;
    for (std::size_t a = 0; a < sys.L().size(); ++a) r.point[sys.L()[a]] += u[a];
    if (!sys.chart().in_domain(std::span<const double>(r.point)))
      throw Error(ErrorCode::LeftDomain, "geodesic leaves the chart domain");
    return r;
  }
  std::size_t n = 16;
  Vec prev = sys.integrate(q, u, 1.0, n).end();
  while (true) {
    Vec next = sys.integrate(q, u, 1.0, 2 * n).end();
    Vec diff(next.size());
    for (std::size_t i = 0; i < next.size(); ++i) diff[i] = next[i] - prev[i];
    r.halving_change = norm2(diff) / std::max(1.0, norm2(next));
    n *= 2;
    if (r.halving_change < 1e-10 || n >= (1u << 16)) {
      r.point = std::move(next);
      r.steps = n;
      return r;
    }
    prev = std::move(next);
  }
}

ExpResult exp_Q(const GeodesicSystem& sys, const Embedding& Q, const std::vector<double>& base,
                const std::vector<double>& u) {
  return exp_point(sys, Q.foot(sys.chart(), sys.L(), base), u);
}

// ---------------------------------------------------------------------------
// Jacobi fields

JacobiField jacobi_transport(const GeodesicSystem& sys, const GeodesicPath& path, const std::vector<double>& v0,
                             const std::vector<double>& vdot0) {
  if (!curvature(sys.connection()).is_zero())
    throw Error(ErrorCode::NotFlatOrTorsionful, "connection has nonzero curvature");
  if (!torsion(sys.connection()).is_zero())
    throw Error(ErrorCode::NotFlatOrTorsionful, "connection has nonzero torsion");
  const IndexList& L = sys.L();
  const std::size_t m = L.size();
  if (v0.size() != m || vdot0.size() != m)
    throw Error(ErrorCode::DegreeMismatch, "Jacobi data must be L-vectors");
  const Vec& q = path.positions.front();
  // state: x, v, J, W, E_0..E_{m-1}
  Vec y((4 + m) * m, 0.0);
  for (std::size_t a = 0; a < m; ++a) {
    y[a] = q[L[a]];
    y[m + a] = path.velocities.front()[a];
    y[2 * m + a] = v0[a];
    y[3 * m + a] = vdot0[a];
    y[(4 + a) * m + a] = 1.0;
  }
  Vec x = q;
  auto rhs = [&](const Vec& s, Vec& d) {
    for (std::size_t a = 0; a < m; ++a) x[L[a]] = s[a];
    const double* v = s.data() + m;
    std::copy(v, v + m, d.begin());
    sys.acceleration(x.data(), v, d.data() + m);
    Vec g(m);
    sys.contract(x.data(), v, s.data() + 2 * m, g.data());
    for (std::size_t a = 0; a < m; ++a) d[2 * m + a] = s[3 * m + a] - g[a];
    sys.contract(x.data(), v, s.data() + 3 * m, g.data());
    for (std::size_t a = 0; a < m; ++a) d[3 * m + a] = -g[a];
    for (std::size_t e = 0; e < m; ++e) {
      sys.contract(x.data(), v, s.data() + (4 + e) * m, g.data());
      for (std::size_t a = 0; a < m; ++a) d[(4 + e) * m + a] = -g[a];
    }
  };
  JacobiField out;
  auto record = [&](double t) {
    std::vector<Vec> frame(m, Vec(m));
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t e = 0; e < m; ++e) frame[a][e] = y[(4 + e) * m + a];
    Vec j(y.begin() + 2 * m, y.begin() + 3 * m), c;
    if (!dense_solve(frame, j, c)) throw Error(ErrorCode::Degenerate, "parallel frame became singular");
    out.times.push_back(t);
    out.field.push_back(std::move(j));
    out.components.push_back(std::move(c));
  };
  record(0.0);
  const std::size_t steps = path.times.size() - 1;
  for (std::size_t s = 0; s < steps; ++s) {
    rk4_step(y, path.step, rhs);
    record(path.step * static_cast<double>(s + 1));
  }

  const std::size_t n = out.times.size();
  const double tm = std::accumulate(out.times.begin(), out.times.end(), 0.0) / static_cast<double>(n);
  double stt = 0.0;
  for (double t : out.times) stt += (t - tm) * (t - tm);
  for (std::size_t a = 0; a < m; ++a) {
    double cm = 0.0;
    for (const auto& c : out.components) cm += c[a];
    cm /= static_cast<double>(n);
    double stc = 0.0;
    for (std::size_t s = 0; s < n; ++s) stc += (out.times[s] - tm) * (out.components[s][a] - cm);
    const double slope = stt > 0.0 ? stc / stt : 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      const double fit = cm + slope * (out.times[s] - tm);
      out.affine_residual = std::max(out.affine_residual, std::abs(out.components[s][a] - fit));
      const double expected = v0[a] + out.times[s] * vdot0[a];
      out.initial_data_residual = std::max(out.initial_data_residual, std::abs(out.components[s][a] - expected));
    }
  }
  const double scale = std::max(norm_inf(v0), norm_inf(vdot0) * std::abs(out.times.back()));
  out.identically_zero = scale == 0.0;
  if (!out.identically_zero) {
    for (std::size_t s = 0; s < n; ++s)
      if (norm_inf(out.components[s]) <= 1e-12 * scale) out.zeros.push_back(out.times[s]);
  }
  out.at_most_one_zero = !out.identically_zero && out.zeros.size() <= 1;
  return out;
}

double exp_affinity_residual(const GeodesicSystem& sys, const std::vector<double>& q,
                             const std::vector<std::vector<double>>& us, const std::vector<Expr>& autoparallel) {
  std::vector<CompiledExpr> f;
  for (const auto& e : autoparallel) f.emplace_back(e);
  auto F = [&](const Vec& x) {
    if (f.empty()) return x;
    Vec out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
      if (!f[i].eval(x.data(), out[i])) throw Error(ErrorCode::PoleAtPoint, "autoparallel chart is singular");
    return out;
  };
  const Vec fq = F(q);
  const std::pair<double, double> weights[] = {{0.5, 0.5}, {2.0, -1.0}, {1.0 / 3.0, 0.25}};
  double worst = 0.0;
  for (std::size_t p = 0; p + 1 < us.size(); ++p) {
    const Vec& u = us[p];
    const Vec& v = us[p + 1];
    const Vec fu = F(exp_point(sys, q, u).point);
    const Vec fv = F(exp_point(sys, q, v).point);
    for (auto [a, b] : weights) {
      Vec w(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) w[i] = a * u[i] + b * v[i];
      const Vec fw = F(exp_point(sys, q, w).point);
      for (std::size_t i = 0; i < fw.size(); ++i)
        worst = std::max(worst, std::abs(fw[i] - a * fu[i] - b * fv[i] - (1.0 - a - b) * fq[i]));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Euler and covariantly constant fields

std::vector<Expr> euler_defect(const Connection& nabla, const IndexList& L, const VectorField& x) {
  const std::size_t n = nabla.dim();
  std::vector<Expr> out;
  for (auto j : L) {
    VectorField d = covariant_derivative(nabla, VectorField::coordinate(n, j), x);
    for (std::size_t i = 0; i < n; ++i) out.push_back(i == j ? d[i] - Expr(n, Rational(1)) : d[i]);
  }
  return out;
}

bool is_covariantly_constant(const Connection& nabla, const IndexList& L, const VectorField& x) {
  const std::size_t n = nabla.dim();
  for (std::size_t i = 0; i < n; ++i)
    if (!contains(L, i) && !x[i].is_zero()) return false;
  for (auto j : L)
    if (!covariant_derivative(nabla, VectorField::coordinate(n, j), x).is_zero()) return false;
  return true;
}

namespace {

// Splits a polynomial by its exponents in `vars`: {exponents on vars -> coefficient polynomial}.
std::map<Exponents, Polynomial> split_by(const Polynomial& p, const IndexList& vars) {
  std::map<Exponents, Polynomial> out;
  for (const auto& t : p.terms()) {
    Exponents key(p.nvars(), 0), rest = t.exps;
    for (auto v : vars) {
      key[v] = t.exps[v];
      rest[v] = 0;
    }
    auto it = out.try_emplace(key, Polynomial(p.nvars())).first;
    it->second += Polynomial::monomial(rest, t.coef);
  }
  return out;
}

Polynomial lcm(const Polynomial& a, const Polynomial& b) {
  return *(a * b).divide_exact(gcd(a, b));
}

std::vector<Exponents> monomials_up_to(std::size_t nvars, const IndexList& vars, unsigned degree) {
  std::vector<Exponents> out{Exponents(nvars, 0)};
  std::size_t begin = 0;
  for (unsigned d = 1; d <= degree; ++d) {
    const std::size_t end = out.size();
    for (std::size_t m = begin; m < end; ++m) {
      for (std::size_t a = 0; a < vars.size(); ++a) {
        // extend only with variables at or after the last one used, to avoid duplicates
        bool ok = true;
        for (std::size_t b = a + 1; b < vars.size(); ++b)
          if (out[m][vars[b]] > 0) ok = false;
        if (!ok) continue;
        Exponents e = out[m];
        ++e[vars[a]];
        out.push_back(std::move(e));
      }
    }
    begin = end;
  }
  return out;
}

}  // namespace

EulerField solve_euler_field(const GeodesicSystem& sys, const Embedding& Q, unsigned max_degree) {
  const ChartSpec& chart = sys.chart();
  const IndexList& L = sys.L();
  const Connection& nabla = sys.connection();
  const std::size_t n = chart.dim();
  const std::size_t m = L.size();
  Q.check(chart, L);

  if (sys.flat_coordinates()) {
    EulerField out{VectorField(n), true, 1};
    for (auto i : L) out.field[i] = chart.var(i) - Q.value(chart, i);
    return out;
  }

  const Expr zero(n);
  for (unsigned deg = 1; deg <= max_degree; ++deg) {
    const auto monos = monomials_up_to(n, L, deg);
    const std::size_t nunk = m * monos.size();
    auto mono_expr = [&](const Exponents& e) { return Expr(Polynomial::monomial(e, Rational(1))); };
    Matrix<Expr> a, b;
    // ∂_j Σ^i + Γ^i_{jk} Σ^k = δ^i_j, cleared of denominators and split by L-monomials
    for (std::size_t ii = 0; ii < m; ++ii) {
      for (std::size_t jj = 0; jj < m; ++jj) {
        std::vector<Expr> coef(nunk, zero);
        for (std::size_t kk = 0; kk < m; ++kk) {
          const Expr& g = nabla.gamma(L[ii], L[jj], L[kk]);
          for (std::size_t u = 0; u < monos.size(); ++u) {
            Expr c = g.is_zero() ? zero : g * mono_expr(monos[u]);
            if (kk == ii) c += mono_expr(monos[u]).partial(L[jj]);
            coef[kk * monos.size() + u] = c;
          }
        }
        Polynomial den(n, Rational(1));
        for (const auto& c : coef) den = lcm(den, c.den());
        std::vector<std::map<Exponents, Polynomial>> parts(nunk);
        std::map<Exponents, bool> keys;
        for (std::size_t u = 0; u < nunk; ++u) {
          parts[u] = split_by((coef[u] * Expr(den)).num(), L);
          for (const auto& [k, _] : parts[u]) keys[k] = true;
        }
        auto rhs_parts = split_by(ii == jj ? den : Polynomial(n), L);
        for (const auto& [k, _] : rhs_parts) keys[k] = true;
        for (const auto& [k, _] : keys) {
          std::vector<Expr> row(nunk, zero);
          for (std::size_t u = 0; u < nunk; ++u) {
            auto it = parts[u].find(k);
            if (it != parts[u].end()) row[u] = Expr(it->second);
          }
          auto it = rhs_parts.find(k);
          a.push_back(std::move(row));
          b.push_back({it == rhs_parts.end() ? zero : Expr(it->second)});
        }
      }
    }
    // Σ vanishes on Q
    std::vector<Expr> subst(n);
    for (std::size_t i = 0; i < n; ++i) subst[i] = contains(L, i) ? Q.value(chart, i) : chart.var(i);
    for (std::size_t ii = 0; ii < m; ++ii) {
      std::vector<Expr> row(nunk, zero);
      for (std::size_t u = 0; u < monos.size(); ++u) row[ii * monos.size() + u] = mono_expr(monos[u]).substitute(subst);
      a.push_back(std::move(row));
      b.push_back({zero});
    }
    auto res = solve(a, b, zero);
    if (!res.consistent) continue;
    EulerField out{VectorField(n), true, deg};
    for (std::size_t ii = 0; ii < m; ++ii) {
      Expr s = zero;
      for (std::size_t u = 0; u < monos.size(); ++u) {
        const Expr& c = res.x[ii * monos.size() + u][0];
        if (!c.is_zero()) s += c * mono_expr(monos[u]);
      }
      out.field[L[ii]] = s;
    }
    const auto defect = euler_defect(nabla, L, out.field);
    if (std::all_of(defect.begin(), defect.end(), [](const Expr& e) { return e.is_zero(); })) return out;
  }
  throw Error(ErrorCode::NotSolvableInClosedForm,
              "no polynomial Euler field of degree <= " + std::to_string(max_degree) + " along L");
}

std::vector<double> euler_field_at(const GeodesicSystem& sys, const Embedding& Q, const std::vector<double>& x) {
  const IndexList& L = sys.L();
  const std::size_t m = L.size();
  const Vec q = Q.foot(sys.chart(), L, x);
  Vec u(m);
  for (std::size_t a = 0; a < m; ++a) u[a] = x[L[a]] - q[L[a]];
  auto residual = [&](const Vec& w) {
    Vec e = exp_point(sys, q, w).point, r(m);
    for (std::size_t a = 0; a < m; ++a) r[a] = e[L[a]] - x[L[a]];
    return r;
  };
  for (int it = 0; it < 30; ++it) {
    Vec r = residual(u);
    if (norm_inf(r) < 1e-13) break;
    std::vector<Vec> jac(m, Vec(m));
    const double h = 1e-6;
    for (std::size_t b = 0; b < m; ++b) {
      Vec up = u, um = u;
      up[b] += h;
      um[b] -= h;
      Vec rp = residual(up), rm = residual(um);
      for (std::size_t a = 0; a < m; ++a) jac[a][b] = (rp[a] - rm[a]) / (2 * h);
    }
    Vec du;
    if (!dense_solve(jac, r, du)) throw Error(ErrorCode::NotSolvableInClosedForm, "exponential map is singular");
    for (std::size_t a = 0; a < m; ++a) u[a] -= du[a];
  }
  const ExpResult e = exp_point(sys, q, u);
  Vec out(x.size(), 0.0);
  if (e.steps == 0) {
    for (std::size_t a = 0; a < m; ++a) out[L[a]] = u[a];
  } else {
    const GeodesicPath g = sys.integrate(q, u, 1.0, e.steps);
    for (std::size_t a = 0; a < m; ++a) out[L[a]] = g.velocities.back()[a];
  }
  return out;
}

// ---------------------------------------------------------------------------
// affine maps

std::vector<double> AffineMap::apply(const std::vector<double>& x) const {
  Vec out = apply_linear(x);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

std::vector<double> AffineMap::apply_linear(const std::vector<double>& v) const {
  Vec out(A.size(), 0.0);
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += A[i][j] * v[j];
  return out;
}

double affine_exp_commutation(const AffineMap& f, const GeodesicSystem& source, const GeodesicSystem& target,
                              const std::vector<std::vector<double>>& xs, const std::vector<std::vector<double>>& us) {
  double worst = 0.0;
  const std::size_t n = source.chart().dim();
  for (std::size_t s = 0; s < xs.size(); ++s) {
    const Vec lhs = f.apply(exp_point(source, xs[s], us[s]).point);
    Vec full(n, 0.0);
    for (std::size_t a = 0; a < source.L().size(); ++a) full[source.L()[a]] = us[s][a];
    const Vec pushed = f.apply_linear(full);
    Vec tu(target.L().size());
    for (std::size_t a = 0; a < tu.size(); ++a) tu[a] = pushed[target.L()[a]];
    const Vec rhs = exp_point(target, f.apply(xs[s]), tu).point;
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(lhs[i] - rhs[i]));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// CSV

std::string path_csv(const GeodesicSystem& sys, const GeodesicPath& g) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "t";
  for (const auto& name : sys.chart().names()) os << ',' << name;
  for (auto i : sys.L()) os << ",v_" << sys.chart().name(i);
  os << '\n';
  for (std::size_t s = 0; s < g.times.size(); ++s) {
    os << g.times[s];
    for (double x : g.positions[s]) os << ',' << x;
    for (double v : g.velocities[s]) os << ',' << v;
    os << '\n';
  }
  return os.str();
}

void write_path_csv(const std::string& path, const GeodesicSystem& sys, const GeodesicPath& g) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::SchemaError, "cannot write " + path);
  f << path_csv(sys, g);
}

}  // namespace lagconn
