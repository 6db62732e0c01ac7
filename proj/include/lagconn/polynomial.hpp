#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lagconn {

using Rational = mpq_class;
using Exponents = std::vector<std::uint16_t>;

/// Graded-lexicographic comparison: returns true when `a` sorts before `b`
/// in the descending term order (higher total degree first, then lex with
/// variable 0 the most significant).
bool grlex_greater(const Exponents& a, const Exponents& b);

struct Term {
  Exponents exps;
  Rational coef;
};

/// Sparse multivariate polynomial over the rationals in a fixed number of
/// variables. Terms are kept sorted in descending grlex order with no zero
/// coefficients, so structural equality is polynomial equality.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::size_t nvars) : nvars_(nvars) {}
  Polynomial(std::size_t nvars, const Rational& c);

  static Polynomial variable(std::size_t nvars, std::size_t index);
  static Polynomial monomial(Exponents exps, const Rational& c);
  static Polynomial from_terms(std::size_t nvars, std::vector<Term> terms);

  std::size_t nvars() const { return nvars_; }
  std::size_t size() const { return terms_.size(); }
  const std::vector<Term>& terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  bool is_one() const;
  Rational constant_value() const;  // valid when is_constant()
  const Term& leading() const { return terms_.front(); }
  const Rational& leading_coef() const { return terms_.front().coef; }
  int total_degree() const;
  int degree_in(std::size_t var) const;
  bool depends_on(std::size_t var) const { return degree_in(var) > 0; }

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const Rational& c);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Polynomial a, const Rational& c) { return a *= c; }
  friend bool operator==(const Polynomial& a, const Polynomial& b);

  Polynomial pow(unsigned n) const;
  Polynomial partial(std::size_t var) const;

  /// Coefficient of var^d, as a polynomial in the same ring with var removed.
  Polynomial coeff_in(std::size_t var, int d) const;
  Polynomial leading_coeff_in(std::size_t var) const { return coeff_in(var, degree_in(var)); }
  Polynomial times_var_pow(std::size_t var, int d) const;

  /// Divides by the leading coefficient.
  Polynomial monic() const;
  /// Exact division; nullopt when `d` does not divide this polynomial.
  std::optional<Polynomial> divide_exact(const Polynomial& d) const;

  Rational eval(std::span<const Rational> point) const;
  double eval_float(std::span<const double> point) const;

  /// Composition: each variable i is replaced by `values[i]` (all in the
  /// ring of `values`).
  Polynomial substitute(std::span<const Polynomial> values) const;

  /// Embeds into a ring with more variables (new variables appended).
  Polynomial extend(std::size_t new_nvars) const;

  std::string to_string(std::span<const std::string> names) const;

 private:
  void normalize();  // sort + combine + drop zeros
  void check_ceiling() const;

  std::size_t nvars_ = 0;
  std::vector<Term> terms_;
};

/// Greatest common divisor over Q, normalized monic (zero only when both are zero).
Polynomial gcd(const Polynomial& a, const Polynomial& b);

/// Hard ceiling on the number of terms any intermediate polynomial may carry.
void set_monomial_ceiling(std::size_t ceiling);
std::size_t monomial_ceiling();

}  // namespace lagconn
