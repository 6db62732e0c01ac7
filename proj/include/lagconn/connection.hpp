#pragma once

#include "lagconn/kernels.hpp"
#include "lagconn/structure.hpp"
#include "lagconn/tensor.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lagconn {

/// (∇_X Y)^i = X^j ∂_j Y^i + Γ^i_{jk} X^j Y^k. OutOfScope when X or Y leave the scope.
VectorField covariant_derivative(const Connection& nabla, const VectorField& x, const VectorField& y);

/// T^i_{jk} = Γ^i_{jk} − Γ^i_{kj}, stored as rank 2 with value index i. ScopeMismatch unless D = V.
CovariantTensor torsion(const Connection& nabla, ExecPolicy policy = default_policy());
/// R^i_{jkl} stored as rank 3 (j,k,l) with value index i. ScopeMismatch unless D = V.
CovariantTensor curvature(const Connection& nabla, ExecPolicy policy = default_policy());
/// (∇ω)(∂_j; ∂_{i1},..,∂_{ik}) for j ∈ D and i ∈ V; rank k+1, value rank of ω.
CovariantTensor nabla_form(const Connection& nabla, const DifferentialForm& omega,
                           ExecPolicy policy = default_policy());

/// Γ^i_{jk} = 0 for k ∈ L, i ∉ L (and for j ∈ L when `strict`).
struct PreservationResult {
  bool preserves = true;
  std::optional<IndexTuple> witness;  // (i, j, k)
};
PreservationResult preserves_distribution(const Connection& nabla, const IndexList& L, bool strict = true);

/// Bott connection along L, solved exactly from the musical pairing.
/// DegeneratePairing / NotInRange.
Connection bott_connection(const GeometricStructure& s);
/// ω^a(∇_{∂j}∂_k, ∂_Z) − ∂_j ω^a_{kZ} for j,k ∈ L and all argument tuples Z.
CovariantTensor bott_identity_residual(const GeometricStructure& s, const Connection& nabla);
/// T^B solved from ω^a(T(X,Y), Z) = dω^a(X,Y,Z) for X,Y ∈ L (rank 2, value index i).
CovariantTensor bott_torsion_musical(const GeometricStructure& s);
/// ω^a(T(X,Y),Z..) − dω^a(X,Y,Z..) for X,Y ∈ L, where T is the torsion of `nabla`.
CovariantTensor torsion_musical_defect(const GeometricStructure& s, const Connection& nabla);

enum class SymplectizeFormula {
  General,      // general formula in terms of ∇⁰, ∇⁰ω and T⁰
  Expanded,     // equivalent expansion in terms of ∇⁰ and brackets
  TorsionFree,  // simplification valid for torsion-free ∇⁰
};

/// Torsion-free symplectic connection built from an arbitrary full ∇⁰.
/// Degenerate when the ω-matrix is singular.
Connection symplectize(const Connection& nabla0, const DifferentialForm& omega,
                       SymplectizeFormula formula = SymplectizeFormula::General,
                       ExecPolicy policy = default_policy());

/// Σ χ_α Γ_α; WeightsNotPartition unless Σ χ_α ≡ 1; ScopeMismatch on mixed scopes.
Connection blend(const std::vector<Connection>& connections, const std::vector<Expr>& weights);

struct DifferenceTensor {
  CovariantTensor S;        // rank 2, value index i
  CovariantTensor lowered;  // ω^a(S(X,Y), Z1..Zk): rank k+2, value rank of ω
};
DifferenceTensor difference_tensor(const Connection& nabla_prime, const Connection& nabla,
                                   const GeometricStructure& s);
/// Lowers a vector-valued rank-2 tensor with the structure form.
CovariantTensor lower_with_form(const CovariantTensor& S, const GeometricStructure& s);
/// Adds S^i_{jk} to the Christoffels of nabla.
Connection add_difference(const Connection& nabla, const CovariantTensor& S);

struct ClassCheck {
  std::string name;
  bool passed = true;
  std::optional<std::pair<IndexTuple, std::size_t>> witness;
};

struct ClassReport {
  std::vector<ClassCheck> checks;
  bool passed() const;
  const ClassCheck* find(const std::string& name) const;
};

/// Symmetry / degeneracy conditions characterizing admissible differences.
/// SYM: totally-symmetric, L-degenerate. POLY/MULTI: symmetric-first-two,
/// antisymmetric-last-k, cyclic-identity, L-degenerate, (MULTI) vertical-degenerate.
ClassReport classify_difference(const CovariantTensor& omega_s, const GeometricStructure& s);

/// Σ(−1)^i (∇_{X_i}α)(..) − dα − Σ_{i<j}(−1)^{i+j} α(T(X_i,X_j),..) on increasing
/// coordinate tuples in the connection scope; d is restricted to the scope directions.
CovariantTensor torsion_dform_defect(const Connection& nabla, const DifferentialForm& alpha,
                                     ExecPolicy policy = default_policy());

/// Γ^·_{jk} for j,k ∈ L agrees with the Bott connection. PreconditionViolated
/// when the torsion of `nabla` on L×L leaves L.
bool restricts_to_bott(const Connection& nabla, const GeometricStructure& s);

/// Flat connection whose Christoffels vanish in the coordinates `new_coords`
/// (one Expr per chart coordinate, identity outside `dirs`):
/// Γ^i_{jk} = Σ_a (J⁻¹)^i_a ∂_j ∂_k Y^a with i,j,k,a ∈ dirs.
Connection darboux_connection(const ChartSpec& chart, const std::vector<Expr>& new_coords,
                              const IndexList& dirs);

/// Basis of pointwise-admissible difference tensors S (rank 2, vector-valued)
/// for the structure: torsion-free, form-preserving, L-preserving. Computed
/// as an exact nullspace over rational functions.
std::vector<CovariantTensor> admissible_difference_basis(const GeometricStructure& s);

/// Connection scope used for compatible connections of the structure:
/// fiber directions for POLY, full otherwise.
Connection zero_connection_for(const GeometricStructure& s);

}  // namespace lagconn
