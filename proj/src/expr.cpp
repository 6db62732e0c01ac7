#include "lagconn/expr.hpp"

#include "lagconn/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace lagconn {

namespace {

void harmonize(Polynomial& a, Polynomial& b) {
  if (a.nvars() < b.nvars()) a = a.extend(b.nvars());
  if (b.nvars() < a.nvars()) b = b.extend(a.nvars());
}

std::pair<Expr, Expr> lifted(const Expr& a, const Expr& b) {
  if (a.nvars() == b.nvars()) return {a, b};
  const std::size_t n = std::max(a.nvars(), b.nvars());
  return {a.extend(n), b.extend(n)};
}

Polynomial exact(const Polynomial& p, const Polynomial& d) {
  if (d.is_one()) return p;
  return p.divide_exact(d).value();
}

}  // namespace

Expr::Expr(Polynomial num) : num_(std::move(num)), den_(num_.nvars(), Rational(1)) {}

Expr Expr::variable(std::size_t nvars, std::size_t index) {
  return Expr(Polynomial::variable(nvars, index));
}

Expr Expr::fraction(Polynomial num, Polynomial den) {
  harmonize(num, den);
  if (den.is_zero()) throw Error(ErrorCode::ExprError, "division by the zero polynomial");
  const std::size_t n = num.nvars();
  if (num.is_zero()) return Expr(n);
  if (den.is_constant()) {
    num *= Rational(1) / den.constant_value();
    return Expr(std::move(num), Polynomial(n, Rational(1)), true);
  }
  Polynomial g = gcd(num, den);
  if (!g.is_constant()) {
    num = exact(num, g);
    den = exact(den, g);
  }
  const Rational lc = den.leading_coef();
  if (lc != 1) {
    num *= Rational(1) / lc;
    den *= Rational(1) / lc;
  }
  return Expr(std::move(num), std::move(den), true);
}

Expr Expr::operator-() const { return Expr(-num_, den_, true); }

Expr operator+(const Expr& a0, const Expr& b0) {
  if (a0.is_zero()) return b0;
  if (b0.is_zero()) return a0;
  auto [a, b] = lifted(a0, b0);
  if (a.den_.is_one() && b.den_.is_one()) return Expr(a.num_ + b.num_);
  if (a.den_ == b.den_) return Expr::fraction(a.num_ + b.num_, a.den_);
  Polynomial g = gcd(a.den_, b.den_);
  if (g.is_constant()) return Expr::fraction(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  Polynomial ad = exact(a.den_, g);
  Polynomial bd = exact(b.den_, g);
  return Expr::fraction(a.num_ * bd + b.num_ * ad, a.den_ * bd);
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a0, const Expr& b0) {
  if (a0.is_zero() || b0.is_zero()) return Expr(std::max(a0.nvars(), b0.nvars()));
  auto [a, b] = lifted(a0, b0);
  if (a.den_.is_one() && b.den_.is_one()) return Expr(a.num_ * b.num_);
  // cross-cancel so the product stays reduced
  Polynomial g1 = gcd(a.num_, b.den_);
  Polynomial g2 = gcd(b.num_, a.den_);
  Polynomial n = exact(a.num_, g1) * exact(b.num_, g2);
  Polynomial d = exact(a.den_, g2) * exact(b.den_, g1);
  const Rational lc = d.leading_coef();
  if (lc != 1) {
    n *= Rational(1) / lc;
    d *= Rational(1) / lc;
  }
  return Expr(std::move(n), std::move(d), true);
}

Expr operator/(const Expr& a0, const Expr& b0) {
  if (b0.is_zero()) throw Error(ErrorCode::ExprError, "division by zero");
  auto [a, b] = lifted(a0, b0);
  Expr inv(b.den_, b.num_, true);
  const Rational lc = inv.den_.leading_coef();
  if (lc != 1) {
    inv.num_ *= Rational(1) / lc;
    inv.den_ *= Rational(1) / lc;
  }
  return a * inv;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
  if (a.nvars() != b.nvars()) {
    auto [x, y] = lifted(a, b);
    return x.num_ == y.num_ && x.den_ == y.den_;
  }
  return a.num_ == b.num_ && a.den_ == b.den_;
}

Expr Expr::scaled(const Rational& c) const {
  if (c == 0) return Expr(nvars());
  return Expr(num_ * c, den_, true);
}

Expr Expr::pow(int n) const {
  if (n == 0) return Expr(nvars(), Rational(1));
  if (n < 0) {
    if (is_zero()) throw Error(ErrorCode::ExprError, "negative power of zero");
    return (Expr(nvars(), Rational(1)) / *this).pow(-n);
  }
  const auto u = static_cast<unsigned>(n);
  return Expr(num_.pow(u), den_.pow(u), true);
}

Expr Expr::partial(std::size_t var) const {
  if (den_.is_constant()) return Expr(num_.partial(var));
  // (n/d)' = (n' d - n d') / d^2
  Polynomial dn = num_.partial(var);
  Polynomial dd = den_.partial(var);
  if (dd.is_zero()) return Expr::fraction(std::move(dn), den_);
  return Expr::fraction(dn * den_ - num_ * dd, den_ * den_);
}

Rational Expr::eval(std::span<const Rational> point) const {
  const Rational d = den_.eval(point);
  if (d == 0) throw Error(ErrorCode::PoleAtPoint, "denominator vanishes at evaluation point");
  return num_.eval(point) / d;
}

double Expr::eval_float(std::span<const double> point) const {
  const double d = den_.eval_float(point);
  if (d == 0.0) throw Error(ErrorCode::PoleAtPoint, "denominator vanishes at evaluation point");
  return num_.eval_float(point) / d;
}

Expr Expr::substitute(std::span<const Expr> values) const {
  const std::size_t target = values.empty() ? 0 : values[0].nvars();
  auto sub_poly = [&](const Polynomial& p) {
    Expr acc(target);
    std::vector<std::vector<Expr>> powers(p.nvars());
    for (const auto& t : p.terms()) {
      Expr v(target, t.coef);
      for (std::size_t k = 0; k < p.nvars(); ++k) {
        const int e = t.exps[k];
        if (e == 0) continue;
        auto& cache = powers[k];
        if (cache.empty()) cache.push_back(Expr(target, Rational(1)));
        while (static_cast<int>(cache.size()) <= e) cache.push_back(cache.back() * values[k]);
        v = v * cache[e];
      }
      acc += v;
    }
    return acc;
  };
  bool all_poly = true;
  for (const auto& v : values) all_poly = all_poly && v.is_polynomial();
  if (all_poly) {
    std::vector<Polynomial> polys;
    polys.reserve(values.size());
    for (const auto& v : values) polys.push_back(v.num_ * (Rational(1) / v.den_.constant_value()));
    return Expr::fraction(num_.substitute(polys), den_.substitute(polys));
  }
  if (den_.is_one()) return sub_poly(num_);
  return sub_poly(num_) / sub_poly(den_);
}

Expr Expr::extend(std::size_t new_nvars) const {
  return Expr(num_.extend(new_nvars), den_.extend(new_nvars), true);
}

std::string Expr::to_string(std::span<const std::string> names) const {
  if (den_.is_one()) return num_.to_string(names);
  std::string n = num_.to_string(names);
  if (num_.size() > 1 || n.front() == '-') n = "(" + n + ")";
  return n + "/(" + den_.to_string(names) + ")";
}

// ---------------------------------------------------------------------------

Jet jet(const Expr& e, std::span<const Rational> point, bool with_hessian) {
  Jet j;
  j.value = e.eval(point);
  const std::size_t n = e.nvars();
  std::vector<Expr> first;
  first.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    first.push_back(e.partial(i));
    j.gradient.push_back(first.back().eval(point));
  }
  if (with_hessian) {
    std::vector<std::vector<Rational>> h(n, std::vector<Rational>(n));
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a; b < n; ++b) {
        h[a][b] = first[a].partial(b).eval(point);
        h[b][a] = h[a][b];
      }
    }
    j.hessian = std::move(h);
  }
  return j;
}

CompiledExpr::CompiledExpr(const Expr& e) {
  auto flatten = [](const Polynomial& p) {
    std::vector<Mono> out;
    for (const auto& t : p.terms()) {
      Mono m{t.coef.get_d(), {}};
      for (std::size_t k = 0; k < t.exps.size(); ++k)
        if (t.exps[k] != 0) m.powers.emplace_back(static_cast<std::uint16_t>(k), t.exps[k]);
      out.push_back(std::move(m));
    }
    return out;
  };
  num_ = flatten(e.num());
  den_ = flatten(e.den());
  den_is_one_ = e.den().is_one();
}

double CompiledExpr::eval_poly(const std::vector<Mono>& p, const double* x) {
  double s = 0.0;
  for (const auto& m : p) {
    double v = m.coef;
    for (const auto& [var, pw] : m.powers) {
      const double b = x[var];
      double r = b;
      for (int i = 1; i < pw; ++i) r *= b;
      v *= r;
    }
    s += v;
  }
  return s;
}

bool CompiledExpr::eval(const double* x, double& out) const {
  const double n = eval_poly(num_, x);
  if (den_is_one_) {
    out = n;
    return true;
  }
  const double d = eval_poly(den_, x);
  if (d == 0.0 || !std::isfinite(d)) return false;
  out = n / d;
  return true;
}

// ---------------------------------------------------------------------------
// parser

namespace {

class Parser {
 public:
  Parser(std::string_view src, std::span<const std::string> names) : src_(src), names_(names) {}

  Expr run() {
    Expr e = expr();
    skip();
    if (pos_ != src_.size()) fail("end of input");
    return e;
  }

 private:
  std::size_t nvars() const { return names_.size(); }

  [[noreturn]] void fail(const std::string& expected) const {
    std::string got = pos_ < src_.size() ? std::string("'") + src_[pos_] + "'" : "end of input";
    throw Error(ErrorCode::SyntaxError, "at position " + std::to_string(pos_) + ": expected " +
                                            expected + ", found " + got);
  }

  void skip() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip();
    return pos_ < src_.size() && src_[pos_] == c;
  }

  bool peek_digit() {
    skip();
    return pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]));
  }

  std::string digits() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (start == pos_) fail("integer");
    return std::string(src_.substr(start, pos_ - start));
  }

  Expr expr() {
    Expr acc = term();
    while (true) {
      if (peek('+')) {
        ++pos_;
        acc = acc + term();
      } else if (peek('-')) {
        ++pos_;
        acc = acc - term();
      } else {
        return acc;
      }
    }
  }

  Expr term() {
    Expr acc = factor();
    while (true) {
      if (peek('*')) {
        ++pos_;
        acc = acc * factor();
      } else if (peek('/')) {
        ++pos_;
        const std::size_t at = pos_;
        Expr d = factor();
        if (d.is_zero()) {
          pos_ = at;
          throw Error(ErrorCode::SyntaxError,
                      "at position " + std::to_string(at) + ": division by zero");
        }
        acc = acc / d;
      } else {
        return acc;
      }
    }
  }

  Expr factor() {
    Expr b = base();
    if (peek('^')) {
      ++pos_;
      bool neg = false;
      if (peek('-')) {
        ++pos_;
        neg = true;
      } else if (peek('+')) {
        ++pos_;
      }
      const std::string d = digits();
      if (d.size() > 4) fail("exponent below 10000");
      const int n = std::stoi(d);
      if (neg && b.is_zero()) throw Error(ErrorCode::SyntaxError, "negative power of zero");
      return b.pow(neg ? -n : n);
    }
    return b;
  }

  Expr base() {
    skip();
    if (pos_ >= src_.size()) fail("number, identifier, '(' or '-'");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      if (!peek(')')) fail("')'");
      ++pos_;
      return e;
    }
    if (c == '-') {
      ++pos_;
      return -base();
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      Rational value{mpz_class(digits())};
      // rational := integer ('/' positive-integer)?
      const std::size_t save = pos_;
      if (peek('/')) {
        ++pos_;
        if (peek_digit()) {
          mpz_class den(digits());
          if (den == 0) fail("positive integer");
          value /= Rational(den);
          value.canonicalize();
        } else {
          pos_ = save;
        }
      }
      return Expr(nvars(), value);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      const std::string id(src_.substr(start, pos_ - start));
      for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == id) return Expr::variable(nvars(), i);
      throw Error(ErrorCode::UnknownIdentifier,
                  "'" + id + "' at position " + std::to_string(start));
    }
    fail("number, identifier, '(' or '-'");
  }

  std::string_view src_;
  std::span<const std::string> names_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view source, std::span<const std::string> names) {
  return Parser(source, names).run();
}

}  // namespace lagconn
