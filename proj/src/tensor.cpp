#include "lagconn/tensor.hpp"

#include "lagconn/error.hpp"

#include <algorithm>

namespace lagconn {

CovariantTensor::CovariantTensor(std::size_t dim, std::size_t rank, std::size_t value_rank)
    : dim_(dim), rank_(rank), value_rank_(value_rank) {
  std::size_t n = value_rank;
  for (std::size_t r = 0; r < rank; ++r) n *= dim;
  data_.assign(n, Expr(dim));
}

std::size_t CovariantTensor::offset(const IndexTuple& idx, std::size_t a) const {
  std::size_t off = 0;
  for (auto i : idx) off = off * dim_ + i;
  return off * value_rank_ + a;
}

std::pair<IndexTuple, std::size_t> CovariantTensor::unflatten(std::size_t flat) const {
  const std::size_t a = flat % value_rank_;
  flat /= value_rank_;
  IndexTuple idx(rank_);
  for (std::size_t r = rank_; r > 0; --r) {
    idx[r - 1] = flat % dim_;
    flat /= dim_;
  }
  return {idx, a};
}

bool CovariantTensor::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const Expr& e) { return e.is_zero(); });
}

std::optional<std::pair<IndexTuple, std::size_t>> CovariantTensor::first_nonzero() const {
  for (std::size_t i = 0; i < data_.size(); ++i)
    if (!data_[i].is_zero()) return unflatten(i);
  return std::nullopt;
}

CovariantTensor operator-(const CovariantTensor& a, const CovariantTensor& b) {
  if (a.dim_ != b.dim_ || a.rank_ != b.rank_ || a.value_rank_ != b.value_rank_)
    throw Error(ErrorCode::RankMismatch, "tensor shapes differ");
  CovariantTensor r = a;
  for (std::size_t i = 0; i < r.data_.size(); ++i) r.data_[i] = a.data_[i] - b.data_[i];
  return r;
}

// ---------------------------------------------------------------------------

Connection::Connection(std::size_t dim) : dim_(dim), full_(true) {
  for (std::size_t i = 0; i < dim; ++i) {
    dirs_.push_back(i);
    vals_.push_back(i);
  }
  in_dirs_.assign(dim, true);
  in_vals_.assign(dim, true);
  table_.assign(dim * dim * dim, Expr(dim));
}

Connection::Connection(std::size_t dim, IndexList directions, IndexList values)
    : dim_(dim), dirs_(std::move(directions)), vals_(std::move(values)) {
  std::sort(dirs_.begin(), dirs_.end());
  std::sort(vals_.begin(), vals_.end());
  in_dirs_.assign(dim, false);
  in_vals_.assign(dim, false);
  for (auto d : dirs_) in_dirs_.at(d) = true;
  for (auto v : vals_) in_vals_.at(v) = true;
  full_ = dirs_.size() == dim && vals_.size() == dim;
  table_.assign(dim * dim * dim, Expr(dim));
}

void Connection::set_gamma(std::size_t i, std::size_t j, std::size_t k, Expr v) {
  if (!v.is_zero() && !(in_vals_.at(i) && in_dirs_.at(j) && in_vals_.at(k)))
    throw Error(ErrorCode::OutOfScope, "Christoffel entry (" + std::to_string(i) + "," +
                                           std::to_string(j) + "," + std::to_string(k) +
                                           ") outside connection scope");
  table_[(i * dim_ + j) * dim_ + k] = std::move(v);
}

void Connection::add_gamma(std::size_t i, std::size_t j, std::size_t k, const Expr& v) {
  set_gamma(i, j, k, gamma(i, j, k) + v);
}

bool Connection::is_zero() const {
  return std::all_of(table_.begin(), table_.end(), [](const Expr& e) { return e.is_zero(); });
}

std::vector<IndexTuple> tuples(const IndexList& set, std::size_t len, bool increasing) {
  std::vector<IndexTuple> out;
  IndexTuple cur;
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (cur.size() == len) {
      out.push_back(cur);
      return;
    }
    for (std::size_t p = increasing ? start : 0; p < set.size(); ++p) {
      cur.push_back(set[p]);
      self(self, p + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

std::string format_tuple(const IndexTuple& idx, const std::vector<std::string>& names) {
  std::string s = "(";
  for (std::size_t p = 0; p < idx.size(); ++p) {
    if (p) s += ",";
    s += idx[p] < names.size() ? names[idx[p]] : std::to_string(idx[p]);
  }
  return s + ")";
}

}  // namespace lagconn
