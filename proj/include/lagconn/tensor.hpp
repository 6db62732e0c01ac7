#pragma once

#include "lagconn/fields.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lagconn {

/// Dense table T_{j1..jr}^a over chart indices, a < value_rank.
class CovariantTensor {
 public:
  CovariantTensor() = default;
  CovariantTensor(std::size_t dim, std::size_t rank, std::size_t value_rank);

  std::size_t dim() const { return dim_; }
  std::size_t rank() const { return rank_; }
  std::size_t value_rank() const { return value_rank_; }
  std::size_t size() const { return data_.size(); }

  std::size_t offset(const IndexTuple& idx, std::size_t a = 0) const;
  std::pair<IndexTuple, std::size_t> unflatten(std::size_t flat) const;

  const Expr& at(const IndexTuple& idx, std::size_t a = 0) const { return data_[offset(idx, a)]; }
  void set(const IndexTuple& idx, std::size_t a, Expr v) { data_[offset(idx, a)] = std::move(v); }
  const Expr& flat(std::size_t i) const { return data_[i]; }
  Expr& flat(std::size_t i) { return data_[i]; }

  bool is_zero() const;
  std::optional<std::pair<IndexTuple, std::size_t>> first_nonzero() const;

  friend CovariantTensor operator-(const CovariantTensor& a, const CovariantTensor& b);
  friend bool operator==(const CovariantTensor& a, const CovariantTensor& b) {
    return a.dim_ == b.dim_ && a.rank_ == b.rank_ && a.value_rank_ == b.value_rank_ && a.data_ == b.data_;
  }

 private:
  std::size_t dim_ = 0, rank_ = 0, value_rank_ = 1;
  std::vector<Expr> data_;
};

/// Linear connection as a Christoffel table Γ^i_{jk}. A partial connection
/// differentiates along span{∂_d : d ∈ D} and acts on sections of span{∂_v : v ∈ V};
/// entries outside j ∈ D, i,k ∈ V are structurally zero.
class Connection {
 public:
  Connection() = default;
  /// Full-scope connection with zero Christoffels.
  explicit Connection(std::size_t dim);
  Connection(std::size_t dim, IndexList directions, IndexList values);

  std::size_t dim() const { return dim_; }
  bool is_full() const { return full_; }
  const IndexList& directions() const { return dirs_; }
  const IndexList& values() const { return vals_; }
  bool in_directions(std::size_t j) const { return in_dirs_[j]; }
  bool in_values(std::size_t i) const { return in_vals_[i]; }
  bool same_scope(const Connection& o) const { return dirs_ == o.dirs_ && vals_ == o.vals_; }

  const Expr& gamma(std::size_t i, std::size_t j, std::size_t k) const {
    return table_[(i * dim_ + j) * dim_ + k];
  }
  /// OutOfScope for entries outside the declared scope (unless v is zero).
  void set_gamma(std::size_t i, std::size_t j, std::size_t k, Expr v);
  void add_gamma(std::size_t i, std::size_t j, std::size_t k, const Expr& v);
  bool is_zero() const;

  friend bool operator==(const Connection& a, const Connection& b) {
    return a.same_scope(b) && a.table_ == b.table_;
  }

 private:
  std::size_t dim_ = 0;
  bool full_ = true;
  IndexList dirs_, vals_;
  std::vector<bool> in_dirs_, in_vals_;
  std::vector<Expr> table_;
};

/// All tuples in `set^len` (lexicographic), or only the strictly increasing ones.
std::vector<IndexTuple> tuples(const IndexList& set, std::size_t len, bool increasing);

std::string format_tuple(const IndexTuple& idx, const std::vector<std::string>& names);

}  // namespace lagconn
