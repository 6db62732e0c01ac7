#pragma once

#include "lagconn/fields.hpp"
#include "lagconn/linalg.hpp"
#include "lagconn/report.hpp"

#include <optional>
#include <vector>

namespace lagconn {

enum class Kind { Sym, Poly, Multi };

std::string to_string(Kind k);

/// Symplectic (degree 2), polysymplectic (vertical degree k+1, valued in a
/// rank-n̂ trivial bundle) or multisymplectic (degree k+1, horizontality r)
/// structure with a coordinate-block distinguished distribution L.
struct GeometricStructure {
  Kind kind = Kind::Sym;
  ChartSpec chart;
  DifferentialForm form;
  IndexList L;
  std::size_t k = 1;
  std::size_t r = 2;
  std::size_t nhat = 1;

  /// Throws InvalidStructure when degrees, ranks or L do not fit the kind.
  void check_invariants() const;

  std::size_t dim() const { return chart.dim(); }
  /// Codimension of L inside the vertical block.
  std::size_t N() const;
  /// Directions in which the structure lives: fiber indices for POLY, all otherwise.
  IndexList arg_indices() const;
  /// Non-L indices eligible for the target of the musical map.
  std::vector<IndexTuple> target_tuples() const;
  /// Number of vertical (non-base) entries in a tuple.
  std::size_t vertical_count(const IndexTuple& idx) const;
  bool in_L(std::size_t i) const;
  Distribution distribution() const { return Distribution::coordinate_block(dim(), L); }
  /// d for SYM/MULTI, d_V for POLY.
  DifferentialForm differential(const DifferentialForm& alpha) const;
  /// Pairing matrix rows (a, Z) over target tuples, columns over L: ω^a(∂_i, ∂_Z).
  Matrix<Expr> pairing_matrix() const;
};

struct ValidationReport {
  std::vector<CheckRecord> checks;
  std::vector<Point> samples;

  bool passed() const;
  const CheckRecord* find(const std::string& name) const;
};

/// Runs closedness, isotropy, involutivity, nondegeneracy and (MULTI)
/// horizontality checks. Never throws on check failure.
ValidationReport validate(const GeometricStructure& s, const std::vector<Point>& samples);

/// ♭(X) = i_X ω (contraction in the first argument).
DifferentialForm musical_flat(const GeometricStructure& s, const VectorField& x);

/// The unique u ∈ L at `at` with ♭(u) = α there. DegenerateAtPoint / NotInRange.
std::vector<Rational> musical_sharp_on_L(const GeometricStructure& s, const DifferentialForm& alpha,
                                         const Point& at);

/// Determinant of the pairing matrix (identically nonzero for valid structures).
Expr pairing_determinant(const GeometricStructure& s);

/// Canonical models: ω̂ = −d_V θ̂ and ω = −dθ with tautological θ.
GeometricStructure canonical_poly_model(std::size_t n, std::size_t m, std::size_t k, std::size_t nhat);
GeometricStructure canonical_multi_model(std::size_t n, std::size_t m, std::size_t k, std::size_t r);
/// θ̂ (resp. θ) of the canonical model on the same chart.
DifferentialForm canonical_poly_theta(const GeometricStructure& s);
DifferentialForm canonical_multi_theta(const GeometricStructure& s);

constexpr std::size_t kMaxDim = 8;

}  // namespace lagconn
