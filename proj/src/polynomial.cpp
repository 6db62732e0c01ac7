#include "lagconn/polynomial.hpp"

#include "lagconn/error.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <sstream>

namespace lagconn {

namespace {

std::atomic<std::size_t> g_ceiling{20000};

int degree_of(const Exponents& e) {
  int d = 0;
  for (auto x : e) d += x;
  return d;
}

bool divides(const Exponents& a, const Exponents& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

}  // namespace

void set_monomial_ceiling(std::size_t ceiling) { g_ceiling.store(ceiling); }
std::size_t monomial_ceiling() { return g_ceiling.load(); }

bool grlex_greater(const Exponents& a, const Exponents& b) {
  const int da = degree_of(a);
  const int db = degree_of(b);
  if (da != db) return da > db;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return a[i] > b[i];
  return false;
}

Polynomial::Polynomial(std::size_t nvars, const Rational& c) : nvars_(nvars) {
  if (c != 0) terms_.push_back(Term{Exponents(nvars, 0), c});
}

Polynomial Polynomial::variable(std::size_t nvars, std::size_t index) {
  Exponents e(nvars, 0);
  e.at(index) = 1;
  return monomial(std::move(e), Rational(1));
}

Polynomial Polynomial::monomial(Exponents exps, const Rational& c) {
  Polynomial p(exps.size());
  if (c != 0) p.terms_.push_back(Term{std::move(exps), c});
  return p;
}

Polynomial Polynomial::from_terms(std::size_t nvars, std::vector<Term> terms) {
  Polynomial p(nvars);
  p.terms_ = std::move(terms);
  p.normalize();
  return p;
}

void Polynomial::normalize() {
  std::sort(terms_.begin(), terms_.end(),
            [](const Term& a, const Term& b) { return grlex_greater(a.exps, b.exps); });
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (auto& t : terms_) {
    if (!out.empty() && out.back().exps == t.exps) {
      out.back().coef += t.coef;
    } else {
      if (!out.empty() && out.back().coef == 0) out.pop_back();
      out.push_back(std::move(t));
    }
  }
  if (!out.empty() && out.back().coef == 0) out.pop_back();
  terms_ = std::move(out);
  check_ceiling();
}

void Polynomial::check_ceiling() const {
  if (terms_.size() > g_ceiling.load())
    throw Error(ErrorCode::MonomialCeiling,
                "polynomial with " + std::to_string(terms_.size()) + " terms exceeds ceiling " +
                    std::to_string(g_ceiling.load()));
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && degree_of(terms_[0].exps) == 0);
}

bool Polynomial::is_one() const {
  return terms_.size() == 1 && degree_of(terms_[0].exps) == 0 && terms_[0].coef == 1;
}

Rational Polynomial::constant_value() const {
  if (terms_.empty()) return Rational(0);
  return terms_.front().coef;
}

int Polynomial::total_degree() const {
  return terms_.empty() ? -1 : degree_of(terms_.front().exps);
}

int Polynomial::degree_in(std::size_t var) const {
  int d = terms_.empty() ? -1 : 0;
  for (const auto& t : terms_) d = std::max<int>(d, t.exps[var]);
  return d;
}

Polynomial Polynomial::operator-() const {
  Polynomial r = *this;
  for (auto& t : r.terms_) t.coef = -t.coef;
  return r;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  assert(o.nvars_ == nvars_ || o.is_zero() || is_zero());
  if (o.terms_.empty()) return *this;
  if (terms_.empty()) {
    nvars_ = o.nvars_;
    terms_ = o.terms_;
    return *this;
  }
  // merge of two sorted sequences
  std::vector<Term> out;
  out.reserve(terms_.size() + o.terms_.size());
  std::size_t i = 0, j = 0;
  while (i < terms_.size() && j < o.terms_.size()) {
    if (terms_[i].exps == o.terms_[j].exps) {
      Rational c = terms_[i].coef + o.terms_[j].coef;
      if (c != 0) out.push_back(Term{terms_[i].exps, c});
      ++i;
      ++j;
    } else if (grlex_greater(terms_[i].exps, o.terms_[j].exps)) {
      out.push_back(std::move(terms_[i++]));
    } else {
      out.push_back(o.terms_[j++]);
    }
  }
  for (; i < terms_.size(); ++i) out.push_back(std::move(terms_[i]));
  for (; j < o.terms_.size(); ++j) out.push_back(o.terms_[j]);
  terms_ = std::move(out);
  check_ceiling();
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) { return *this += -o; }

Polynomial& Polynomial::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& t : terms_) t.coef *= c;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return Polynomial(std::max(a.nvars_, b.nvars_));
  assert(a.nvars_ == b.nvars_);
  if (a.terms_.size() == 1 && a.terms_[0].exps == Exponents(a.nvars_, 0)) return b * a.terms_[0].coef;
  if (b.terms_.size() == 1 && b.terms_[0].exps == Exponents(b.nvars_, 0)) return a * b.terms_[0].coef;
  std::vector<Term> terms;
  terms.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& ta : a.terms_) {
    for (const auto& tb : b.terms_) {
      Exponents e(a.nvars_);
      for (std::size_t k = 0; k < e.size(); ++k) e[k] = ta.exps[k] + tb.exps[k];
      terms.push_back(Term{std::move(e), ta.coef * tb.coef});
    }
  }
  return Polynomial::from_terms(a.nvars_, std::move(terms));
}

bool operator==(const Polynomial& a, const Polynomial& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i) {
    if (a.terms_[i].exps != b.terms_[i].exps || a.terms_[i].coef != b.terms_[i].coef) return false;
  }
  return true;
}

Polynomial Polynomial::pow(unsigned n) const {
  Polynomial result(nvars_, Rational(1));
  Polynomial base = *this;
  while (n > 0) {
    if (n & 1u) result = result * base;
    n >>= 1u;
    if (n > 0) base = base * base;
  }
  return result;
}

Polynomial Polynomial::partial(std::size_t var) const {
  std::vector<Term> terms;
  for (const auto& t : terms_) {
    if (t.exps[var] == 0) continue;
    Term d{t.exps, t.coef * t.exps[var]};
    d.exps[var] -= 1;
    terms.push_back(std::move(d));
  }
  // differentiation preserves relative grlex order only within degree, so renormalize
  return from_terms(nvars_, std::move(terms));
}

Polynomial Polynomial::coeff_in(std::size_t var, int d) const {
  std::vector<Term> terms;
  for (const auto& t : terms_) {
    if (t.exps[var] != d) continue;
    Term c = t;
    c.exps[var] = 0;
    terms.push_back(std::move(c));
  }
  return from_terms(nvars_, std::move(terms));
}

Polynomial Polynomial::times_var_pow(std::size_t var, int d) const {
  Polynomial r = *this;
  for (auto& t : r.terms_) t.exps[var] += d;
  return r;  // uniform shift keeps grlex order
}

Polynomial Polynomial::monic() const {
  if (terms_.empty()) return *this;
  Polynomial r = *this;
  r *= Rational(1) / leading_coef();
  return r;
}

std::optional<Polynomial> Polynomial::divide_exact(const Polynomial& d) const {
  if (d.is_zero()) return std::nullopt;
  if (is_zero()) return Polynomial(nvars_);
  if (d.is_constant()) return *this * (Rational(1) / d.constant_value());
  const Term& lt = d.leading();
  Polynomial rem = *this;
  std::vector<Term> quotient;
  while (!rem.is_zero()) {
    const Term& lr = rem.leading();
    if (!divides(lt.exps, lr.exps)) return std::nullopt;
    Exponents e(nvars_);
    for (std::size_t k = 0; k < nvars_; ++k) e[k] = lr.exps[k] - lt.exps[k];
    Rational c = lr.coef / lt.coef;
    Polynomial step = monomial(e, c) * d;
    quotient.push_back(Term{std::move(e), c});
    rem -= step;
  }
  return from_terms(nvars_, std::move(quotient));
}

Rational Polynomial::eval(std::span<const Rational> point) const {
  Rational sum = 0;
  for (const auto& t : terms_) {
    Rational v = t.coef;
    for (std::size_t k = 0; k < nvars_; ++k) {
      for (int p = 0; p < t.exps[k]; ++p) v *= point[k];
    }
    sum += v;
  }
  return sum;
}

double Polynomial::eval_float(std::span<const double> point) const {
  double sum = 0.0;
  for (const auto& t : terms_) {
    double v = t.coef.get_d();
    for (std::size_t k = 0; k < nvars_; ++k) {
      if (t.exps[k] != 0) v *= std::pow(point[k], static_cast<int>(t.exps[k]));
    }
    sum += v;
  }
  return sum;
}

Polynomial Polynomial::substitute(std::span<const Polynomial> values) const {
  assert(values.size() == nvars_);
  const std::size_t target = values.empty() ? 0 : values[0].nvars();
  Polynomial result(target);
  // cache powers per variable
  std::vector<std::vector<Polynomial>> powers(nvars_);
  for (const auto& t : terms_) {
    Polynomial v(target, t.coef);
    for (std::size_t k = 0; k < nvars_; ++k) {
      const int e = t.exps[k];
      if (e == 0) continue;
      auto& cache = powers[k];
      if (cache.empty()) cache.push_back(Polynomial(target, Rational(1)));
      while (static_cast<int>(cache.size()) <= e) cache.push_back(cache.back() * values[k]);
      v = v * cache[e];
    }
    result += v;
  }
  return result;
}

Polynomial Polynomial::extend(std::size_t new_nvars) const {
  assert(new_nvars >= nvars_);
  Polynomial r(new_nvars);
  for (const auto& t : terms_) {
    Term n{t.exps, t.coef};
    n.exps.resize(new_nvars, 0);
    r.terms_.push_back(std::move(n));
  }
  return r;  // appended zero exponents keep the order
}

std::string Polynomial::to_string(std::span<const std::string> names) const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& t : terms_) {
    Rational c = t.coef;
    const bool neg = c < 0;
    if (neg) c = -c;
    if (first) {
      if (neg) out << "-";
    } else {
      out << (neg ? " - " : " + ");
    }
    first = false;
    bool wrote = false;
    const bool is_const = degree_of(t.exps) == 0;
    // "-x^2" would read back as (-x)^2
    bool leading_power = false;
    if (neg && out.tellp() == 1) {
      for (auto e : t.exps) {
        if (e != 0) {
          leading_power = e > 1;
          break;
        }
      }
    }
    if (c != 1 || is_const || leading_power) {
      out << c.get_str();
      wrote = true;
    }
    for (std::size_t k = 0; k < nvars_; ++k) {
      if (t.exps[k] == 0) continue;
      if (wrote) out << "*";
      out << (k < names.size() ? names[k] : "x" + std::to_string(k));
      if (t.exps[k] > 1) out << "^" << t.exps[k];
      wrote = true;
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// gcd over Q by recursive primitive pseudo-remainder sequences

namespace {

Polynomial one_like(const Polynomial& p) { return Polynomial(p.nvars(), Rational(1)); }

Polynomial monomial_gcd(const Polynomial& mono, const Polynomial& p) {
  Exponents e = mono.leading().exps;
  for (const auto& t : p.terms())
    for (std::size_t k = 0; k < e.size(); ++k) e[k] = std::min(e[k], t.exps[k]);
  return Polynomial::monomial(std::move(e), Rational(1));
}

Polynomial gcd_impl(const Polynomial& a, const Polynomial& b);

Polynomial content_in(const Polynomial& p, std::size_t var) {
  const int deg = p.degree_in(var);
  Polynomial g(p.nvars());
  for (int d = deg; d >= 0; --d) {
    Polynomial c = p.coeff_in(var, d);
    if (c.is_zero()) continue;
    g = g.is_zero() ? c.monic() : gcd_impl(g, c);
    if (g.is_constant()) return one_like(p);
  }
  return g;
}

Polynomial primitive_in(const Polynomial& p, std::size_t var) {
  Polynomial c = content_in(p, var);
  if (c.is_constant()) return p.monic();
  return p.divide_exact(c).value().monic();
}

Polynomial pseudo_remainder(Polynomial a, const Polynomial& b, std::size_t var) {
  const int db = b.degree_in(var);
  const Polynomial lb = b.leading_coeff_in(var);
  while (!a.is_zero() && a.degree_in(var) >= db) {
    const int da = a.degree_in(var);
    Polynomial la = a.leading_coeff_in(var);
    a = lb * a - (la * b).times_var_pow(var, da - db);
    a = a.monic();
  }
  return a;
}

Polynomial gcd_impl(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero()) return b.monic();
  if (b.is_zero()) return a.monic();
  if (a.is_constant() || b.is_constant()) return one_like(a);
  if (a.size() == 1) return monomial_gcd(a, b);
  if (b.size() == 1) return monomial_gcd(b, a);
  if (a.monic() == b.monic()) return a.monic();

  const std::size_t n = a.nvars();
  // main variable: shared variable of least maximal degree
  int best = -1;
  int best_deg = 0;
  for (std::size_t v = 0; v < n; ++v) {
    const int da = a.degree_in(v), db = b.degree_in(v);
    if (da > 0 && db > 0) {
      const int d = std::max(da, db);
      if (best < 0 || d < best_deg) {
        best = static_cast<int>(v);
        best_deg = d;
      }
    }
  }
  if (best < 0) {
    // no shared variable: the gcd cannot involve any variable present in only one
    for (std::size_t v = 0; v < n; ++v) {
      if (a.degree_in(v) > 0) return gcd_impl(content_in(a, v), b);
      if (b.degree_in(v) > 0) return gcd_impl(a, content_in(b, v));
    }
    return one_like(a);
  }
  const auto var = static_cast<std::size_t>(best);
  // variables present in only one argument are removed through contents first
  for (std::size_t v = 0; v < n; ++v) {
    const bool in_a = a.degree_in(v) > 0, in_b = b.degree_in(v) > 0;
    if (in_a && !in_b) return gcd_impl(content_in(a, v), b);
    if (in_b && !in_a) return gcd_impl(a, content_in(b, v));
  }

  if (auto q = a.divide_exact(b)) return b.monic();
  if (auto q = b.divide_exact(a)) return a.monic();

  const Polynomial ca = content_in(a, var);
  const Polynomial cb = content_in(b, var);
  Polynomial pa = ca.is_constant() ? a.monic() : a.divide_exact(ca).value();
  Polynomial pb = cb.is_constant() ? b.monic() : b.divide_exact(cb).value();
  const Polynomial c = gcd_impl(ca, cb);

  if (pa.degree_in(var) < pb.degree_in(var)) std::swap(pa, pb);
  while (true) {
    Polynomial r = pseudo_remainder(pa, pb, var);
    if (r.is_zero()) break;
    if (r.degree_in(var) == 0) {
      pb = one_like(a);
      break;
    }
    pa = std::move(pb);
    pb = primitive_in(r, var);
  }
  Polynomial g = pb.is_constant() ? pb : primitive_in(pb, var);
  return (c * g).monic();
}

}  // namespace

Polynomial gcd(const Polynomial& a, const Polynomial& b) { return gcd_impl(a, b); }

}  // namespace lagconn
