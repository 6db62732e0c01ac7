#pragma once

#include "lagconn/structure.hpp"
#include "lagconn/tensor.hpp"

#include <cstdint>
#include <random>

namespace lagconn {

/// Seeded source of random exact test data.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  /// Uniform integer in [lo, hi].
  long integer(long lo, long hi);
  /// Nonzero rational p/q with |p| <= 5, 1 <= q <= 3.
  Rational coefficient();
  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

/// Polynomial in the variables `vars` of total degree <= max_degree (at most `terms` terms).
Expr random_polynomial(std::size_t nvars, const IndexList& vars, unsigned max_degree, Rng& rng,
                       unsigned terms = 3);
/// Scalar form of the given degree with polynomial coefficients on the keys drawn from `dirs`.
DifferentialForm random_form(std::size_t dim, std::size_t degree, const IndexList& dirs, unsigned max_degree,
                             Rng& rng, double density = 0.6);
/// Full connection with polynomial Christoffels.
Connection random_connection(std::size_t dim, unsigned max_degree, Rng& rng, double density = 0.5);
/// ω_can + dβ on R^{2n} with β a random polynomial 1-form; nondegenerate as a rational function.
DifferentialForm random_closed_symplectic(const ChartSpec& chart, unsigned max_degree, Rng& rng);
/// Full connection that maps L-sections to L-sections in both slots and has no L×L block.
Connection random_L_preserving_perturbation(const GeometricStructure& s, unsigned max_degree, Rng& rng);

}  // namespace lagconn
