#pragma once

#include "lagconn/polynomial.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lagconn {

/// Rational function num/den in chart coordinates. The pair is kept
/// gcd-reduced with a monic denominator, so two Exprs are equal exactly
/// when their canonical pairs coincide.
class Expr {
 public:
  Expr() : num_(0), den_(0, Rational(1)) {}
  explicit Expr(std::size_t nvars) : num_(nvars), den_(nvars, Rational(1)) {}
  Expr(std::size_t nvars, const Rational& c) : num_(nvars, c), den_(nvars, Rational(1)) {}
  explicit Expr(Polynomial num);

  static Expr variable(std::size_t nvars, std::size_t index);
  static Expr fraction(Polynomial num, Polynomial den);

  std::size_t nvars() const { return num_.nvars(); }
  const Polynomial& num() const { return num_; }
  const Polynomial& den() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  bool is_polynomial() const { return den_.is_constant(); }
  Rational constant_value() const { return num_.constant_value(); }
  bool depends_on(std::size_t var) const { return num_.depends_on(var) || den_.depends_on(var); }

  Expr operator-() const;
  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  Expr& operator+=(const Expr& o) { return *this = *this + o; }
  Expr& operator-=(const Expr& o) { return *this = *this - o; }
  Expr& operator*=(const Expr& o) { return *this = *this * o; }
  Expr& operator/=(const Expr& o) { return *this = *this / o; }
  friend bool operator==(const Expr& a, const Expr& b);

  Expr scaled(const Rational& c) const;
  Expr pow(int n) const;
  Expr partial(std::size_t var) const;

  /// Throws PoleAtPoint when the denominator vanishes.
  Rational eval(std::span<const Rational> point) const;
  double eval_float(std::span<const double> point) const;

  /// Replaces variable i by values[i]; the result lives in the ring of the values.
  Expr substitute(std::span<const Expr> values) const;
  Expr extend(std::size_t new_nvars) const;

  std::string to_string(std::span<const std::string> names) const;

 private:
  Expr(Polynomial num, Polynomial den, bool) : num_(std::move(num)), den_(std::move(den)) {}

  Polynomial num_;
  Polynomial den_;
};

struct Jet {
  Rational value;
  std::vector<Rational> gradient;
  std::optional<std::vector<std::vector<Rational>>> hessian;
};

Jet jet(const Expr& e, std::span<const Rational> point, bool with_hessian = false);

/// Flattened double-precision evaluator for hot loops (geodesic right-hand sides).
class CompiledExpr {
 public:
  CompiledExpr() = default;
  explicit CompiledExpr(const Expr& e);

  bool is_zero() const { return num_.empty(); }
  /// Returns false when the denominator is numerically zero.
  bool eval(const double* x, double& out) const;

 private:
  struct Mono {
    double coef;
    std::vector<std::pair<std::uint16_t, std::uint16_t>> powers;
  };
  static double eval_poly(const std::vector<Mono>& p, const double* x);

  std::vector<Mono> num_;
  std::vector<Mono> den_;
  bool den_is_one_ = true;
};

/// Recursive-descent parser for the expression grammar; identifiers are
/// resolved against `names` (index = coordinate index).
Expr parse_expr(std::string_view source, std::span<const std::string> names);

}  // namespace lagconn
