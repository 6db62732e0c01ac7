#include "lagconn/structure_maps.hpp"

#include "lagconn/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace lagconn {

namespace {

bool contains(const IndexList& l, std::size_t i) { return std::find(l.begin(), l.end(), i) != l.end(); }

std::string point_string(const Point& p, const ChartSpec& chart) {
  std::string out = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += ", ";
    out += chart.name(i) + "=" + p[i].get_str();
  }
  return out + ")";
}

std::string field_name(const VectorField& x, const ChartSpec& chart) {
  std::optional<std::size_t> only;
  for (std::size_t i = 0; i < x.dim(); ++i) {
    if (x[i].is_zero()) continue;
    if (only || !(x[i] == chart.constant(1))) return "frame field";
    only = i;
  }
  return only ? "d/d" + chart.name(*only) : "zero field";
}

// First nonzero component of a form together with a sample point where it does not vanish.
std::string nonzero_witness(const DifferentialForm& f, const ChartSpec& chart) {
  auto nz = f.first_nonzero();
  if (!nz) return {};
  const auto& [key, a] = *nz;
  const Expr c = f.component(key, a);
  std::string w = "component " + format_tuple(key, chart.names());
  if (f.value_rank() > 1) w += "[" + std::to_string(a) + "]";
  w += " = " + chart.print(c);
  for (const auto& p : chart.sample_points(16, 1)) {
    try {
      if (c.eval(p) != 0) return w + " at " + point_string(p, chart);
    } catch (const Error&) {
    }
  }
  return w;
}

DifferentialForm apply_d(const ChartSpec& chart, const DifferentialForm& a, FormMode mode) {
  return mode == FormMode::Full ? exterior_derivative(a) : vertical_exterior_derivative(chart, a);
}

DifferentialForm reindex(const DifferentialForm& f, const std::vector<Expr>& subst,
                         const std::vector<std::optional<std::size_t>>& index_map, std::size_t new_dim) {
  DifferentialForm out(new_dim, f.degree(), f.value_rank());
  for (const auto& [key, vals] : f.coeffs()) {
    IndexTuple k;
    for (auto i : key) {
      if (!index_map[i]) throw Error(ErrorCode::NotHorizontal, "form has a component along an eliminated coordinate");
      k.push_back(*index_map[i]);
    }
    for (std::size_t a = 0; a < vals.size(); ++a)
      if (!vals[a].is_zero()) out.add(k, vals[a].substitute(subst), a);
  }
  return out;
}

}  // namespace

BasicnessCheck check_basic(const DifferentialForm& alpha, const ChartSpec& chart, const Distribution& L,
                           FormMode mode) {
  BasicnessCheck out;
  for (const auto& x : L.frame) {
    if (alpha.degree() > 0) {
      const DifferentialForm ix = interior_product(x, alpha);
      if (!ix.is_zero()) {
        out.horizontal = false;
        out.witness = "contraction with " + field_name(x, chart) + ": " + nonzero_witness(ix, chart);
        return out;
      }
    }
    const DifferentialForm lx =
        mode == FormMode::Full ? lie_derivative(x, alpha) : vertical_lie_derivative(chart, x, alpha);
    if (!lx.is_zero()) {
      out.leaf_constant = false;
      out.witness = "Lie derivative along " + field_name(x, chart) + ": " + nonzero_witness(lx, chart);
      return out;
    }
  }
  return out;
}

DescendedForm descend_form(const DifferentialForm& alpha, const ChartSpec& chart, const Distribution& L,
                           FormMode mode) {
  const BasicnessCheck b = check_basic(alpha, chart, L, mode);
  if (!b.horizontal) throw Error(ErrorCode::NotHorizontal, b.witness);
  if (!b.leaf_constant) throw Error(ErrorCode::NotLeafConstant, b.witness);
  const auto block = L.coordinate_indices();
  if (!block) throw Error(ErrorCode::NotApplicable, "descent needs L spanned by coordinate fields");

  const std::size_t n = chart.dim();
  for (const auto& [key, vals] : alpha.coeffs())
    for (const auto& v : vals)
      for (auto j : *block)
        if (v.depends_on(j))
          throw Error(ErrorCode::NotLeafConstant,
                      "coefficient of " + format_tuple(key, chart.names()) + " depends on " + chart.name(j));

  DescendedForm out;
  std::vector<std::optional<std::size_t>> index_map(n);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) {
    if (contains(*block, i)) continue;
    index_map[i] = out.kept.size();
    out.kept.push_back(i);
    names.push_back(chart.name(i));
  }
  const std::size_t m = out.kept.size();
  IndexList base, efiber, lfiber;
  std::vector<Interval> domain;
  for (std::size_t q = 0; q < m; ++q) {
    const std::size_t i = out.kept[q];
    if (chart.in_base(i)) base.push_back(q);
    else if (chart.in_lfiber(i)) lfiber.push_back(q);
    else efiber.push_back(q);
    domain.push_back(chart.domain().empty() ? Interval{} : chart.domain()[i]);
  }
  out.quotient = ChartSpec(names, base, efiber, lfiber, domain);
  std::vector<Expr> subst(n, Expr(m));
  for (std::size_t i = 0; i < n; ++i)
    if (index_map[i]) subst[i] = Expr::variable(m, *index_map[i]);
  out.original_dim = n;
  out.form = reindex(alpha, subst, index_map, m);
  out.pullback = lift_form(out, out.form);
  return out;
}

DifferentialForm lift_form(const DescendedForm& d, const DifferentialForm& base_form) {
  const std::size_t full = d.original_dim;
  std::vector<Expr> subst(d.kept.size());
  std::vector<std::optional<std::size_t>> index_map(d.kept.size());
  for (std::size_t q = 0; q < d.kept.size(); ++q) {
    subst[q] = Expr::variable(full, d.kept[q]);
    index_map[q] = d.kept[q];
  }
  return reindex(base_form, subst, index_map, full);
}

bool StructureMapReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.passed(); });
}

const CheckRecord* StructureMapReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

struct Pipeline {
  const GeometricStructure& s;
  FormMode mode;
  const StructureMapOptions& opts;

  const ChartSpec& chart() const { return s.chart; }

  struct Stage {
    VectorField euler;
    DifferentialForm theta;
    DifferentialForm alpha;
    BasicnessCheck basic;
    std::optional<DescendedForm> base;
  };

  // Euler field, θ = −i_Σ ω and descent of ω + Dθ for one embedding.
  Stage run(const GeodesicSystem& sys, const Embedding& Q, StructureMapReport* rep) const {
    Stage st;
    EulerField e = solve_euler_field(sys, Q);
    st.euler = e.field;
    if (rep) {
      const auto defect = euler_defect(sys.connection(), s.L, st.euler);
      auto bad = std::find_if(defect.begin(), defect.end(), [](const Expr& x) { return !x.is_zero(); });
      std::string w;
      if (bad != defect.end()) {
        const std::size_t pos = static_cast<std::size_t>(bad - defect.begin());
        w = "component " + chart().name(pos % s.dim()) + " of the derivative along " +
            chart().name(s.L[pos / s.dim()]) + " is " + chart().print(*bad);
      }
      rep->checks.push_back(exact_check("euler-field", "euler-vector-field", w.empty(), w));
      std::vector<Expr> subst(s.dim());
      for (std::size_t i = 0; i < s.dim(); ++i) subst[i] = s.in_L(i) ? Q.value(chart(), i) : chart().var(i);
      std::string wq;
      for (auto i : s.L) {
        Expr v = st.euler[i].substitute(subst);
        if (!v.is_zero()) {
          wq = "component " + chart().name(i) + " restricts to " + chart().print(v);
          break;
        }
      }
      rep->checks.push_back(exact_check("euler-vanishes-on-embedding", "euler-vector-field", wq.empty(), wq));
    }
    st.theta = -interior_product(st.euler, s.form);
    st.alpha = s.form + apply_d(chart(), st.theta, mode);
    st.basic = check_basic(st.alpha, chart(), s.distribution(), mode);
    if (st.basic.passed()) st.base = descend_form(st.alpha, chart(), s.distribution(), mode);
    return st;
  }

  DifferentialForm quotient_d(const DescendedForm& d, const DifferentialForm& f) const {
    return apply_d(d.quotient, f, mode);
  }

  void numeric_fallback(const GeodesicSystem& sys, const Embedding& Q, StructureMapReport& rep) const {
    rep.exact = false;
    if (s.kind != Kind::Sym) {
      rep.checks.push_back(exact_check("numeric-fallback", "plumbing", false,
                                       "numeric Euler fallback is implemented for symplectic scenarios only"));
      return;
    }
    const std::size_t n = s.dim();
    std::vector<CompiledExpr> w;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) w.emplace_back(s.form.component({i, j}));
    auto omega = [&](const std::vector<double>& x, std::size_t i, std::size_t j) {
      double v = 0.0;
      if (!w[i * n + j].eval(x.data(), v)) throw Error(ErrorCode::PoleAtPoint, "form is singular at sample");
      return v;
    };
    auto sigma = [&](const std::vector<double>& x) { return euler_field_at(sys, Q, x); };
    auto theta = [&](const std::vector<double>& x, std::size_t k) {
      const auto sg = sigma(x);
      double t = 0.0;
      for (std::size_t i = 0; i < n; ++i) t -= sg[i] * omega(x, i, k);
      return t;
    };
    auto deriv = [&](const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
                     std::size_t j) {
      auto central = [&](double h) {
        std::vector<double> xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        return (f(xp) - f(xm)) / (2 * h);
      };
      const double h = 1e-3;
      return (4 * central(h / 2) - central(h)) / 3;
    };
    double euler_res = 0.0, horiz_res = 0.0;
    std::string where;
    for (const auto& p : opts.samples) {
      const std::vector<double> x = to_double(p);
      if (!chart().in_domain(std::span<const double>(x))) continue;
      const auto sg = sigma(x);
      for (auto j : s.L) {
        for (auto i : s.L) {
          double d = deriv([&](const std::vector<double>& y) { return sigma(y)[i]; }, x, j);
          std::vector<double> g(s.L.size());
          std::vector<double> e(s.L.size(), 0.0), v(s.L.size(), 0.0);
          for (std::size_t a = 0; a < s.L.size(); ++a) {
            e[a] = s.L[a] == j ? 1.0 : 0.0;
            v[a] = sg[s.L[a]];
          }
          sys.contract(x.data(), e.data(), v.data(), g.data());
          const std::size_t li = static_cast<std::size_t>(std::find(s.L.begin(), s.L.end(), i) - s.L.begin());
          euler_res = std::max(euler_res, std::abs(d + g[li] - (i == j ? 1.0 : 0.0)));
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double dtk = deriv([&](const std::vector<double>& y) { return theta(y, k); }, x, j);
          const double dtj = deriv([&](const std::vector<double>& y) { return theta(y, j); }, x, k);
          const double r = std::abs(omega(x, j, k) + dtk - dtj);
          if (r > horiz_res) {
            horiz_res = r;
            where = "at " + point_string(p, chart());
          }
        }
      }
    }
    rep.checks.push_back(numeric_check("euler-field", "euler-vector-field", euler_res, opts.tol));
    rep.checks.push_back(numeric_check("basic-horizontal", "basic-form-descent", horiz_res, opts.tol, where));
  }

  void domain_probe(const GeodesicSystem& sys, const Embedding& Q, StructureMapReport& rep) const {
    std::size_t exits = 0, total = 0;
    for (const auto& p : opts.samples) {
      const std::vector<double> x = to_double(p);
      if (!chart().in_domain(std::span<const double>(x))) continue;
      ++total;
      try {
        const std::vector<double> q = Q.foot(chart(), s.L, x);
        std::vector<double> u(s.L.size());
        for (std::size_t a = 0; a < s.L.size(); ++a) u[a] = x[s.L[a]] - q[s.L[a]];
        exp_point(sys, q, u);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::LeftDomain && e.code() != ErrorCode::OutOfDomain &&
            e.code() != ErrorCode::PoleOnPath)
          throw;
        ++exits;
      }
    }
    CheckRecord rec = exact_check("tubular-regime", "tubular-neighborhood", true);
    rec.detail = exits == 0 ? "radial geodesics from the embedding stay in the domain at " +
                                  std::to_string(total) + " samples"
                            : std::to_string(exits) + " of " + std::to_string(total) +
                                  " radial geodesics leave the domain";
    rep.checks.push_back(rec);
  }

  StructureMapReport verify(const Embedding& Q) const {
    StructureMapReport rep;
    rep.embedding = Q.name;
    try {
      Q.check(chart(), s.L);
      rep.checks.push_back(exact_check("embedding", "plumbing", true));
    } catch (const Error& e) {
      rep.checks.push_back(exact_check("embedding", "plumbing", false, e.what()));
      return rep;
    }
    const Connection bott = bott_connection(s);
    if (const auto t = torsion(bott); !t.is_zero()) {
      const auto nz = *t.first_nonzero();
      rep.checks.push_back(exact_check("euler-field", "euler-vector-field", false,
                                       "Bott connection has torsion: T" + format_tuple(nz.first, chart().names()) +
                                           "^" + chart().name(nz.second) + " = " +
                                           chart().print(t.at(nz.first, nz.second))));
      return rep;
    }
    const GeodesicSystem sys(chart(), bott, s.L);

    Stage st;
    try {
      st = run(sys, Q, &rep);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotSolvableInClosedForm) throw;
      numeric_fallback(sys, Q, rep);
      domain_probe(sys, Q, rep);
      return rep;
    }
    rep.euler = st.euler;
    rep.theta = st.theta;

    {
      std::string w;
      for (auto j : s.L) {
        if (st.theta.degree() == 0) break;
        const DifferentialForm ix = interior_product(VectorField::coordinate(s.dim(), j), st.theta);
        if (!ix.is_zero()) {
          w = "contraction with d/d" + chart().name(j) + ": " + nonzero_witness(ix, chart());
          break;
        }
      }
      rep.checks.push_back(exact_check("theta-vanishes-on-L", "tautological-one-form", w.empty(), w));
    }
    rep.checks.push_back(exact_check("basic-horizontal", "basic-form-descent", st.basic.horizontal,
                                     st.basic.horizontal ? std::string() : st.basic.witness));
    rep.checks.push_back(exact_check("basic-leaf-constant", "basic-form-descent", st.basic.leaf_constant,
                                     st.basic.leaf_constant ? std::string() : st.basic.witness));
    if (!st.base) return rep;
    rep.base_form = st.base;
    const DescendedForm& base = *st.base;

    {
      const DifferentialForm d = quotient_d(base, base.form);
      rep.checks.push_back(exact_check("base-form-closed", "closed-base-form", d.is_zero(),
                                       nonzero_witness(d, base.quotient)));
    }
    if (s.kind == Kind::Multi) {
      std::string w;
      for (const auto& [key, vals] : base.form.coeffs()) {
        std::size_t vertical = 0;
        for (auto i : key)
          if (!base.quotient.in_base(i)) ++vertical;
        if (vertical > s.r) {
          w = "component " + format_tuple(key, base.quotient.names()) + " has " + std::to_string(vertical) +
              " vertical indices";
          break;
        }
      }
      rep.checks.push_back(exact_check("base-form-horizontality", "horizontality-degree", w.empty(), w));
    }
    if (opts.expected_base_form) {
      const DifferentialForm diff = base.pullback - *opts.expected_base_form;
      rep.checks.push_back(
          exact_check("expected-base-form", "base-form-extraction", diff.is_zero(), nonzero_witness(diff, chart())));
    }
    if (opts.second_embedding) {
      const Embedding& Q2 = *opts.second_embedding;
      CheckRecord rec = exact_check("embedding-invariance", "embedding-invariance", true);
      try {
        Q2.check(chart(), s.L);
        const Stage st2 = run(sys, Q2, nullptr);
        if (!st2.base) {
          rec = exact_check("embedding-invariance", "embedding-invariance", false,
                            "second embedding: " + st2.basic.witness);
        } else {
          const DifferentialForm diff = st.theta - st2.theta;
          const DescendedForm tq = descend_form(diff, chart(), s.distribution(), mode);
          const DifferentialForm lhs = base.form - st2.base->form;
          const DifferentialForm mismatch = lhs - quotient_d(base, tq.form);
          rec = exact_check("embedding-invariance", "embedding-invariance", mismatch.is_zero(),
                            nonzero_witness(mismatch, base.quotient));
          rec.detail = "descended theta difference: " + tq.form.to_string(base.quotient.names());
          rep.theta_difference = tq;
        }
      } catch (const Error& e) {
        rec = exact_check("embedding-invariance", "embedding-invariance", false, e.what());
      }
      rep.checks.push_back(rec);
    }
    domain_probe(sys, Q, rep);
    return rep;
  }
};

void add_canonical_theta_check(StructureMapReport& rep, const DifferentialForm& canonical, const Embedding& E,
                               const ChartSpec& chart) {
  if (!E.section.empty() || !rep.theta) return;
  const DifferentialForm diff = *rep.theta - canonical;
  rep.checks.push_back(
      exact_check("canonical-theta", "tautological-one-form", diff.is_zero(), nonzero_witness(diff, chart)));
}

}  // namespace

StructureMapReport weinstein_verify(const GeometricStructure& s, const Embedding& Q, const StructureMapOptions& opts) {
  if (s.kind != Kind::Sym) throw Error(ErrorCode::NotApplicable, "weinstein_verify needs a symplectic structure");
  return Pipeline{s, FormMode::Full, opts}.verify(Q);
}

StructureMapReport poly_structure_verify(const GeometricStructure& s, const Embedding& E,
                                         const StructureMapOptions& opts) {
  if (s.kind != Kind::Poly) throw Error(ErrorCode::NotApplicable, "poly_structure_verify needs a POLY structure");
  StructureMapReport rep = Pipeline{s, FormMode::Vertical, opts}.verify(E);
  try {
    add_canonical_theta_check(rep, canonical_poly_theta(s), E, s.chart);
  } catch (const Error&) {
  }
  return rep;
}

StructureMapReport multi_structure_verify(const GeometricStructure& s, const Embedding& E,
                                          const StructureMapOptions& opts) {
  if (s.kind != Kind::Multi) throw Error(ErrorCode::NotApplicable, "multi_structure_verify needs a MULTI structure");
  StructureMapReport rep = Pipeline{s, FormMode::Full, opts}.verify(E);
  try {
    add_canonical_theta_check(rep, canonical_multi_theta(s), E, s.chart);
  } catch (const Error&) {
  }
  return rep;
}

StructureMapReport structure_map_verify(const GeometricStructure& s, const Embedding& E,
                                        const StructureMapOptions& opts) {
  switch (s.kind) {
    case Kind::Sym: return weinstein_verify(s, E, opts);
    case Kind::Poly: return poly_structure_verify(s, E, opts);
    case Kind::Multi: return multi_structure_verify(s, E, opts);
  }
  throw Error(ErrorCode::NotApplicable, "unknown structure kind");
}

}  // namespace lagconn
