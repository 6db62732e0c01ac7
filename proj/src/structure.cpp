#include "lagconn/structure.hpp"

#include "lagconn/error.hpp"
#include "lagconn/tensor.hpp"

#include <algorithm>
#include <sstream>

namespace lagconn {

std::string to_string(Kind k) {
  switch (k) {
    case Kind::Sym: return "SYM";
    case Kind::Poly: return "POLY";
    case Kind::Multi: return "MULTI";
  }
  return "?";
}

namespace {

std::string point_string(const Point& p, const ChartSpec& chart) {
  std::ostringstream out;
  out << "{";
  for (std::size_t i = 0; i < p.size(); ++i) out << (i ? ", " : "") << chart.name(i) << "=" << p[i].get_str();
  out << "}";
  return out.str();
}

}  // namespace

bool GeometricStructure::in_L(std::size_t i) const {
  return std::find(L.begin(), L.end(), i) != L.end();
}

void GeometricStructure::check_invariants() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::InvalidStructure, m); };
  if (form.dim() != dim()) fail("form dimension differs from chart dimension");
  if (L.empty()) fail("L block is empty");
  for (auto i : L)
    if (i >= dim()) fail("L index out of range");
  IndexList sorted = L;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) fail("repeated L index");
  switch (kind) {
    case Kind::Sym:
      if (form.degree() != 2 || form.value_rank() != 1) fail("symplectic form must be a scalar 2-form");
      if (2 * L.size() != dim()) fail("symplectic L must have half dimension");
      break;
    case Kind::Poly: {
      if (form.degree() != k + 1) fail("polysymplectic form must have degree k+1");
      if (form.value_rank() != nhat || nhat < 1) fail("polysymplectic value rank must equal nhat");
      const IndexList fib = chart.fiber();
      for (auto i : L)
        if (!std::binary_search(fib.begin(), fib.end(), i)) fail("polysymplectic L must be vertical");
      if (!form.keys_within(fib)) fail("polysymplectic form must be vertical");
      break;
    }
    case Kind::Multi:
      if (form.degree() != k + 1 || form.value_rank() != 1) fail("multisymplectic form must have degree k+1");
      if (r < 1 || r > k + 1) fail("horizontality parameter r must satisfy 1 <= r <= k+1");
      if (k + 1 - r > chart.base().size()) fail("k+1-r must not exceed the base dimension");
      for (auto i : L)
        if (chart.in_base(i)) fail("multisymplectic L must be vertical");
      break;
  }
}

std::size_t GeometricStructure::N() const { return chart.fiber().size() - L.size(); }

IndexList GeometricStructure::arg_indices() const {
  return kind == Kind::Poly ? chart.fiber() : chart.all();
}

std::size_t GeometricStructure::vertical_count(const IndexTuple& idx) const {
  return static_cast<std::size_t>(
      std::count_if(idx.begin(), idx.end(), [&](std::size_t i) { return !chart.in_base(i); }));
}

std::vector<IndexTuple> GeometricStructure::target_tuples() const {
  IndexList pool;
  for (auto i : arg_indices())
    if (!in_L(i)) pool.push_back(i);
  auto all = tuples(pool, k, true);
  if (kind != Kind::Multi) return all;
  std::vector<IndexTuple> out;
  for (auto& z : all)
    if (vertical_count(z) + 1 <= r) out.push_back(z);
  return out;
}

DifferentialForm GeometricStructure::differential(const DifferentialForm& alpha) const {
  if (kind == Kind::Poly) return vertical_exterior_derivative(chart, alpha);
  return exterior_derivative(alpha);
}

Matrix<Expr> GeometricStructure::pairing_matrix() const {
  Matrix<Expr> m;
  for (std::size_t a = 0; a < form.value_rank(); ++a) {
    for (const auto& z : target_tuples()) {
      std::vector<Expr> row;
      for (auto i : L) {
        IndexTuple idx{i};
        idx.insert(idx.end(), z.begin(), z.end());
        row.push_back(form.component(idx, a));
      }
      m.push_back(std::move(row));
    }
  }
  return m;
}

Expr pairing_determinant(const GeometricStructure& s) {
  auto m = s.pairing_matrix();
  if (m.size() != s.L.size())
    throw Error(ErrorCode::DegeneratePairing, "pairing matrix is " + std::to_string(m.size()) + "x" +
                                                  std::to_string(s.L.size()) + ", not square");
  return determinant(m, Expr(s.dim()));
}

// ---------------------------------------------------------------------------

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.passed(); });
}

const CheckRecord* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

ValidationReport validate(const GeometricStructure& s, const std::vector<Point>& samples) {
  ValidationReport rep;
  rep.samples = samples;
  const auto& names = s.chart.names();
  try {
    s.check_invariants();
    rep.checks.push_back(exact_check("structure-invariants", "plumbing", true));
  } catch (const Error& e) {
    rep.checks.push_back(exact_check("structure-invariants", "plumbing", false, e.what()));
    return rep;
  }

  {
    DifferentialForm d = s.differential(s.form);
    std::string w;
    if (auto nz = d.first_nonzero()) w = "component " + format_tuple(nz->first, names) + " slot " + std::to_string(nz->second);
    rep.checks.push_back(exact_check(s.kind == Kind::Poly ? "vertically-closed" : "closed",
                                     s.kind == Kind::Poly ? "vertical-closedness" : "closedness",
                                     d.is_zero(), w));
  }

  {
    std::string w;
    for (const auto& [key, v] : s.form.coeffs()) {
      const auto nl = std::count_if(key.begin(), key.end(), [&](std::size_t i) { return s.in_L(i); });
      if (nl >= 2) {
        w = "component " + format_tuple(key, names);
        break;
      }
    }
    rep.checks.push_back(exact_check("L-isotropic", "isotropy", w.empty(), w));
  }

  {
    auto inv = check_involutive(s.distribution());
    std::string w;
    if (inv.witness) w = "frame pair (" + std::to_string(inv.witness->first) + "," + std::to_string(inv.witness->second) + ")";
    rep.checks.push_back(exact_check("L-involutive", "involutivity", inv.involutive, w));
  }

  {
    CheckRecord rec = exact_check("nondegenerate", "musical-isomorphism", true);
    try {
      Expr det = pairing_determinant(s);
      if (det.is_zero()) {
        rec = exact_check("nondegenerate", "musical-isomorphism", false, "pairing determinant is identically zero");
      } else {
        for (const auto& p : samples) {
          bool bad = false;
          try {
            bad = det.eval(p) == 0;
          } catch (const Error&) {
            bad = true;
          }
          if (bad) {
            rec = exact_check("nondegenerate", "musical-isomorphism", false,
                              "pairing determinant " + s.chart.print(det) + " vanishes at " + point_string(p, s.chart));
            break;
          }
        }
        if (rec.passed()) rec.detail = "det = " + s.chart.print(det);
      }
    } catch (const Error& e) {
      rec = exact_check("nondegenerate", "musical-isomorphism", false, e.what());
    }
    rep.checks.push_back(rec);
  }

  if (s.kind == Kind::Multi) {
    std::string w;
    for (const auto& [key, v] : s.form.coeffs()) {
      if (s.vertical_count(key) > s.r) {
        w = "component " + format_tuple(key, names) + " has " + std::to_string(s.vertical_count(key)) + " vertical slots";
        break;
      }
    }
    rep.checks.push_back(exact_check("horizontality", "horizontality-degree", w.empty(), w));
  }
  return rep;
}

DifferentialForm musical_flat(const GeometricStructure& s, const VectorField& x) {
  return interior_product(x, s.form);
}

std::vector<Rational> musical_sharp_on_L(const GeometricStructure& s, const DifferentialForm& alpha,
                                         const Point& at) {
  if (alpha.degree() != s.k || alpha.value_rank() != s.form.value_rank())
    throw Error(ErrorCode::DegreeMismatch, "form has the wrong degree or value rank for the musical map");
  const auto tests = tuples(s.arg_indices(), s.k, true);
  Matrix<Rational> m, rhs;
  for (std::size_t a = 0; a < s.form.value_rank(); ++a) {
    for (const auto& z : tests) {
      std::vector<Rational> row;
      for (auto i : s.L) {
        IndexTuple idx{i};
        idx.insert(idx.end(), z.begin(), z.end());
        row.push_back(s.form.component(idx, a).eval(at));
      }
      m.push_back(std::move(row));
      rhs.push_back({alpha.component(z, a).eval(at)});
    }
  }
  // alpha must not have components outside the structure's argument directions
  for (const auto& [key, v] : alpha.coeffs()) {
    for (auto i : key) {
      const auto args = s.arg_indices();
      if (std::find(args.begin(), args.end(), i) == args.end())
        for (std::size_t a = 0; a < v.size(); ++a)
          if (v[a].eval(at) != 0) throw Error(ErrorCode::NotInRange, "form has a non-vertical component");
    }
  }
  auto res = solve(m, rhs, Rational(0));
  if (res.rank < s.L.size()) throw Error(ErrorCode::DegenerateAtPoint, "pairing is singular at the point");
  if (!res.consistent) {
    // residual witness: first row that the least-constrained solution cannot satisfy
    std::string w;
    for (std::size_t r = 0; r < m.size(); ++r) {
      Rational acc = 0;
      for (std::size_t c = 0; c < s.L.size(); ++c) acc += m[r][c] * res.x[c][0];
      if (acc != rhs[r][0]) {
        const auto& z = tests[r % tests.size()];
        w = "residual " + Rational(rhs[r][0] - acc).get_str() + " at component " + format_tuple(z, s.chart.names());
        break;
      }
    }
    throw Error(ErrorCode::NotInRange, "form is outside the image of the musical map: " + w);
  }
  std::vector<Rational> u(s.dim(), Rational(0));
  for (std::size_t c = 0; c < s.L.size(); ++c) u[s.L[c]] = res.x[c][0];
  return u;
}

// ---------------------------------------------------------------------------
// canonical models

namespace {

std::string digits(const IndexTuple& t, std::size_t base) {
  std::string s;
  for (auto i : t) s += std::to_string(i - base + 1);
  return s;
}

struct PolyLabel {
  std::size_t a;
  IndexTuple J;  // efiber indices
};

std::vector<PolyLabel> poly_labels(std::size_t n, std::size_t m, std::size_t k, std::size_t nhat) {
  IndexList ef;
  for (std::size_t j = 0; j < m; ++j) ef.push_back(n + j);
  std::vector<PolyLabel> out;
  for (std::size_t a = 0; a < nhat; ++a)
    for (auto& J : tuples(ef, k, true)) out.push_back({a, J});
  return out;
}

struct MultiLabel {
  IndexTuple I;  // efiber indices
  IndexTuple J;  // base indices
};

std::vector<MultiLabel> multi_labels(std::size_t n, std::size_t m, std::size_t k, std::size_t r) {
  IndexList base, ef;
  for (std::size_t j = 0; j < n; ++j) base.push_back(j);
  for (std::size_t j = 0; j < m; ++j) ef.push_back(n + j);
  std::vector<MultiLabel> out;
  for (std::size_t i = 0; i <= std::min(k, r - 1); ++i) {
    if (i > m || k - i > n) continue;
    for (auto& I : tuples(ef, i, true))
      for (auto& J : tuples(base, k - i, true)) out.push_back({I, J});
  }
  return out;
}

std::size_t binom(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

GeometricStructure canonical_poly_model(std::size_t n, std::size_t m, std::size_t k, std::size_t nhat) {
  if (k < 1 || m < k || nhat < 1) throw Error(ErrorCode::InvalidStructure, "need 1 <= k <= m and nhat >= 1");
  const std::size_t nl = nhat * binom(m, k);
  if (n + m + nl > kMaxDim)
    throw Error(ErrorCode::DimensionTooLarge, "canonical model would have dimension " + std::to_string(n + m + nl));
  const bool cotangent = n == 0 && k == 1 && nhat == 1;
  std::vector<std::string> names;
  IndexList base, ef, lf;
  for (std::size_t j = 0; j < n; ++j) {
    names.push_back("x" + std::to_string(j + 1));
    base.push_back(j);
  }
  for (std::size_t j = 0; j < m; ++j) {
    names.push_back((cotangent ? "q" : "y") + std::to_string(j + 1));
    ef.push_back(n + j);
  }
  const auto labels = poly_labels(n, m, k, nhat);
  for (std::size_t l = 0; l < labels.size(); ++l) {
    std::string nm = "p";
    if (cotangent) {
      nm += digits(labels[l].J, n);
    } else {
      if (nhat > 1) nm += std::to_string(labels[l].a + 1);
      if (binom(m, k) > 1) nm += (nhat > 1 ? "_" : "") + digits(labels[l].J, n);
    }
    names.push_back(nm);
    lf.push_back(n + m + l);
  }
  GeometricStructure s;
  s.chart = ChartSpec(names, base, ef, lf);
  s.kind = cotangent ? Kind::Sym : Kind::Poly;
  s.k = k;
  s.nhat = nhat;
  s.L = lf;
  DifferentialForm theta = canonical_poly_theta(s);
  s.form = cotangent ? -exterior_derivative(theta) : -vertical_exterior_derivative(s.chart, theta);
  s.check_invariants();
  return s;
}

DifferentialForm canonical_poly_theta(const GeometricStructure& s) {
  const std::size_t n = s.chart.base().size();
  const std::size_t m = s.chart.efiber().size();
  const auto labels = poly_labels(n, m, s.k, s.nhat);
  const std::size_t dim = s.dim();
  const std::size_t vr = s.kind == Kind::Sym ? 1 : s.nhat;
  DifferentialForm theta(dim, s.k, vr);
  for (std::size_t l = 0; l < labels.size(); ++l)
    theta.add(labels[l].J, Expr::variable(dim, s.chart.lfiber()[l]), labels[l].a);
  return theta;
}

GeometricStructure canonical_multi_model(std::size_t n, std::size_t m, std::size_t k, std::size_t r) {
  if (k < 1 || r < 1 || r > k + 1 || k + 1 - r > n)
    throw Error(ErrorCode::InvalidStructure, "need 1 <= r <= k+1 and k+1-r <= n");
  const auto labels = multi_labels(n, m, k, r);
  if (n + m + labels.size() > kMaxDim)
    throw Error(ErrorCode::DimensionTooLarge,
                "canonical model would have dimension " + std::to_string(n + m + labels.size()));
  std::vector<std::string> names;
  IndexList base, ef, lf;
  for (std::size_t j = 0; j < n; ++j) {
    names.push_back("x" + std::to_string(j + 1));
    base.push_back(j);
  }
  for (std::size_t j = 0; j < m; ++j) {
    names.push_back(m == 1 ? "y" : "y" + std::to_string(j + 1));
    ef.push_back(n + j);
  }
  for (std::size_t l = 0; l < labels.size(); ++l) {
    std::string nm = "p";
    if (!labels[l].I.empty()) nm += "y" + digits(labels[l].I, n);
    if (!labels[l].J.empty()) nm += "x" + digits(labels[l].J, 0);
    names.push_back(nm);
    lf.push_back(n + m + l);
  }
  GeometricStructure s;
  s.chart = ChartSpec(names, base, ef, lf);
  s.kind = Kind::Multi;
  s.k = k;
  s.r = r;
  s.L = lf;
  s.form = -exterior_derivative(canonical_multi_theta(s));
  s.check_invariants();
  return s;
}

DifferentialForm canonical_multi_theta(const GeometricStructure& s) {
  const std::size_t n = s.chart.base().size();
  const std::size_t m = s.chart.efiber().size();
  const auto labels = multi_labels(n, m, s.k, s.r);
  DifferentialForm theta(s.dim(), s.k);
  for (std::size_t l = 0; l < labels.size(); ++l) {
    IndexTuple idx = labels[l].I;
    idx.insert(idx.end(), labels[l].J.begin(), labels[l].J.end());
    theta.add(idx, Expr::variable(s.dim(), s.chart.lfiber()[l]));
  }
  return theta;
}

}  // namespace lagconn
