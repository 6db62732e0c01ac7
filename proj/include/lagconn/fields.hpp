#pragma once

#include "lagconn/chart.hpp"

#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace lagconn {

using IndexTuple = std::vector<std::size_t>;

class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(std::size_t dim) : comp_(dim, Expr(dim)) {}
  explicit VectorField(std::vector<Expr> comp) : comp_(std::move(comp)) {}
  static VectorField coordinate(std::size_t dim, std::size_t i);

  std::size_t dim() const { return comp_.size(); }
  const Expr& operator[](std::size_t i) const { return comp_[i]; }
  Expr& operator[](std::size_t i) { return comp_[i]; }
  const std::vector<Expr>& components() const { return comp_; }
  bool is_zero() const;

  friend VectorField operator+(const VectorField& a, const VectorField& b);
  friend VectorField operator-(const VectorField& a, const VectorField& b);
  friend VectorField operator*(const Expr& f, const VectorField& a);
  friend bool operator==(const VectorField& a, const VectorField& b) { return a.comp_ == b.comp_; }

  /// X·f
  Expr apply(const Expr& f) const;

 private:
  std::vector<Expr> comp_;
};

/// Alternating form of degree k, optionally valued in a trivial rank-n̂ bundle
/// (value_rank > 1). Only strictly increasing index tuples are stored and
/// absent keys are zero. Vertical forms use the same representation with
/// keys restricted to fiber indices.
class DifferentialForm {
 public:
  using Coeffs = std::map<IndexTuple, std::vector<Expr>>;

  DifferentialForm() = default;
  DifferentialForm(std::size_t dim, std::size_t degree, std::size_t value_rank = 1)
      : dim_(dim), degree_(degree), value_rank_(value_rank) {}

  /// Single term c·dx^{i1}∧...∧dx^{ik} (indices in any order).
  static DifferentialForm term(std::size_t dim, const IndexTuple& idx, const Expr& c);
  static DifferentialForm function(const Expr& f);

  std::size_t dim() const { return dim_; }
  std::size_t degree() const { return degree_; }
  std::size_t value_rank() const { return value_rank_; }
  const Coeffs& coeffs() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }

  /// Adds c to the coefficient of dx^{idx} in value slot a; idx may be unsorted.
  void add(const IndexTuple& idx, const Expr& c, std::size_t a = 0);
  /// Signed component for an arbitrary index order; zero on repeated indices.
  Expr component(const IndexTuple& idx, std::size_t a = 0) const;
  /// Scalar form made of one value slot.
  DifferentialForm slot(std::size_t a) const;
  /// Embeds scalar forms as the value slots of a vector-valued form.
  static DifferentialForm from_slots(const std::vector<DifferentialForm>& slots);

  DifferentialForm operator-() const;
  friend DifferentialForm operator+(const DifferentialForm& a, const DifferentialForm& b);
  friend DifferentialForm operator-(const DifferentialForm& a, const DifferentialForm& b);
  friend DifferentialForm operator*(const Expr& f, const DifferentialForm& a);
  friend bool operator==(const DifferentialForm& a, const DifferentialForm& b);

  /// Every stored key lies in `allowed`.
  bool keys_within(const IndexList& allowed) const;
  /// Returns a first nonzero (key, slot) for witnesses.
  std::optional<std::pair<IndexTuple, std::size_t>> first_nonzero() const;

  std::string to_string(const std::vector<std::string>& names) const;

 private:
  void check_key(const IndexTuple& sorted) const;

  std::size_t dim_ = 0;
  std::size_t degree_ = 0;
  std::size_t value_rank_ = 1;
  Coeffs coeffs_;
};

using VerticalForm = DifferentialForm;

/// Sorts idx in place and returns the permutation sign (0 if an index repeats).
int sort_with_sign(IndexTuple& idx);

VectorField lie_bracket(const VectorField& x, const VectorField& y);

DifferentialForm exterior_derivative(const DifferentialForm& alpha);
/// Exterior derivative with partials and new slots restricted to `dirs`.
DifferentialForm exterior_derivative(const DifferentialForm& alpha, const IndexList& dirs);
/// d_V on a fibered chart; keys of alpha must be fiber indices.
DifferentialForm vertical_exterior_derivative(const ChartSpec& chart, const DifferentialForm& alpha);

/// Contraction in the first argument; DegreeMismatch on a 0-form.
DifferentialForm interior_product(const VectorField& x, const DifferentialForm& alpha);
/// α∧β; at most one of the two may be vector-valued.
DifferentialForm wedge(const DifferentialForm& alpha, const DifferentialForm& beta);
/// α(X1,...,Xk) as a function (value slot a).
Expr evaluate(const DifferentialForm& alpha, const std::vector<VectorField>& xs, std::size_t a = 0);

/// Coordinate formula for L_X α with partials and slots over `dirs`.
DifferentialForm lie_derivative(const VectorField& x, const DifferentialForm& alpha,
                                const IndexList& dirs);
DifferentialForm lie_derivative(const VectorField& x, const DifferentialForm& alpha);
/// Vertical Lie derivative; X must have zero base components (NotVertical).
DifferentialForm vertical_lie_derivative(const ChartSpec& chart, const VectorField& x,
                                         const DifferentialForm& alpha);
/// d i_X α + i_X d α (restricted to dirs), used to cross-check lie_derivative.
DifferentialForm cartan_lie_derivative(const VectorField& x, const DifferentialForm& alpha,
                                       const IndexList& dirs);

enum class ProjectionCut { Base, EFiber };

bool is_vertical(const ChartSpec& chart, const VectorField& x, ProjectionCut cut = ProjectionCut::Base);
bool is_projectable(const ChartSpec& chart, const VectorField& x,
                    ProjectionCut cut = ProjectionCut::Base);

struct Distribution {
  std::vector<VectorField> frame;
  std::size_t declared_rank = 0;

  static Distribution coordinate_block(std::size_t dim, const IndexList& indices);
  /// Index list when every frame member is a coordinate field.
  std::optional<IndexList> coordinate_indices() const;
};

struct AnnihilatorResult {
  std::vector<DifferentialForm> forms;
  bool coordinate_block = true;  // false when computed by exact nullspace
};

AnnihilatorResult annihilator_frame(const Distribution& l, std::size_t dim);

struct InvolutivityResult {
  bool involutive = true;
  std::optional<std::pair<std::size_t, std::size_t>> witness;  // frame pair
};

InvolutivityResult check_involutive(const Distribution& l);

}  // namespace lagconn
