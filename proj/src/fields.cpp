#include "lagconn/fields.hpp"

#include "lagconn/error.hpp"
#include "lagconn/linalg.hpp"

#include <algorithm>
#include <sstream>

namespace lagconn {

int sort_with_sign(IndexTuple& idx) {
  int sign = 1;
  for (std::size_t i = 1; i < idx.size(); ++i) {
    for (std::size_t j = i; j > 0 && idx[j - 1] > idx[j]; --j) {
      std::swap(idx[j - 1], idx[j]);
      sign = -sign;
    }
  }
  for (std::size_t i = 1; i < idx.size(); ++i)
    if (idx[i] == idx[i - 1]) return 0;
  return sign;
}

// --- VectorField -----------------------------------------------------------

VectorField VectorField::coordinate(std::size_t dim, std::size_t i) {
  VectorField v(dim);
  v.comp_.at(i) = Expr(dim, Rational(1));
  return v;
}

bool VectorField::is_zero() const {
  return std::all_of(comp_.begin(), comp_.end(), [](const Expr& e) { return e.is_zero(); });
}

VectorField operator+(const VectorField& a, const VectorField& b) {
  VectorField r = a;
  for (std::size_t i = 0; i < r.dim(); ++i) r.comp_[i] += b.comp_[i];
  return r;
}

VectorField operator-(const VectorField& a, const VectorField& b) {
  VectorField r = a;
  for (std::size_t i = 0; i < r.dim(); ++i) r.comp_[i] -= b.comp_[i];
  return r;
}

VectorField operator*(const Expr& f, const VectorField& a) {
  VectorField r = a;
  for (auto& c : r.comp_) c = f * c;
  return r;
}

Expr VectorField::apply(const Expr& f) const {
  Expr acc(f.nvars());
  for (std::size_t j = 0; j < comp_.size(); ++j)
    if (!comp_[j].is_zero()) acc += comp_[j] * f.partial(j);
  return acc;
}

VectorField lie_bracket(const VectorField& x, const VectorField& y) {
  VectorField r(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) r[i] = x.apply(y[i]) - y.apply(x[i]);
  return r;
}

// --- DifferentialForm ------------------------------------------------------

DifferentialForm DifferentialForm::term(std::size_t dim, const IndexTuple& idx, const Expr& c) {
  DifferentialForm f(dim, idx.size());
  f.add(idx, c);
  return f;
}

DifferentialForm DifferentialForm::function(const Expr& fn) {
  DifferentialForm f(fn.nvars(), 0);
  f.add({}, fn);
  return f;
}

void DifferentialForm::check_key(const IndexTuple& sorted) const {
  if (sorted.size() != degree_) throw Error(ErrorCode::DegreeMismatch, "index tuple has wrong length");
  for (auto i : sorted)
    if (i >= dim_) throw Error(ErrorCode::DegreeMismatch, "index out of range");
}

void DifferentialForm::add(const IndexTuple& idx, const Expr& c, std::size_t a) {
  if (c.is_zero()) return;
  IndexTuple key = idx;
  const int sign = sort_with_sign(key);
  check_key(key);
  if (sign == 0) return;
  auto it = coeffs_.find(key);
  if (it == coeffs_.end()) {
    std::vector<Expr> v(value_rank_, Expr(dim_));
    v.at(a) = sign > 0 ? c : -c;
    coeffs_.emplace(std::move(key), std::move(v));
    return;
  }
  auto& slot = it->second.at(a);
  slot = sign > 0 ? slot + c : slot - c;
  if (std::all_of(it->second.begin(), it->second.end(), [](const Expr& e) { return e.is_zero(); }))
    coeffs_.erase(it);
}

Expr DifferentialForm::component(const IndexTuple& idx, std::size_t a) const {
  IndexTuple key = idx;
  const int sign = sort_with_sign(key);
  if (sign == 0) return Expr(dim_);
  auto it = coeffs_.find(key);
  if (it == coeffs_.end()) return Expr(dim_);
  return sign > 0 ? it->second[a] : -it->second[a];
}

DifferentialForm DifferentialForm::slot(std::size_t a) const {
  DifferentialForm f(dim_, degree_);
  for (const auto& [k, v] : coeffs_) f.add(k, v.at(a));
  return f;
}

DifferentialForm DifferentialForm::from_slots(const std::vector<DifferentialForm>& slots) {
  if (slots.empty()) throw Error(ErrorCode::DegreeMismatch, "no value slots");
  DifferentialForm f(slots[0].dim(), slots[0].degree(), slots.size());
  for (std::size_t a = 0; a < slots.size(); ++a) {
    if (slots[a].degree() != f.degree_ || slots[a].value_rank() != 1)
      throw Error(ErrorCode::DegreeMismatch, "slot forms must be scalar and of equal degree");
    for (const auto& [k, v] : slots[a].coeffs()) f.add(k, v[0], a);
  }
  return f;
}

DifferentialForm DifferentialForm::operator-() const {
  DifferentialForm r = *this;
  for (auto& [k, v] : r.coeffs_)
    for (auto& e : v) e = -e;
  return r;
}

DifferentialForm operator+(const DifferentialForm& a, const DifferentialForm& b) {
  if (a.degree_ != b.degree_ || a.value_rank_ != b.value_rank_)
    throw Error(ErrorCode::DegreeMismatch, "sum of forms of different degree or value rank");
  DifferentialForm r = a;
  for (const auto& [k, v] : b.coeffs_)
    for (std::size_t s = 0; s < v.size(); ++s) r.add(k, v[s], s);
  return r;
}

DifferentialForm operator-(const DifferentialForm& a, const DifferentialForm& b) { return a + (-b); }

DifferentialForm operator*(const Expr& f, const DifferentialForm& a) {
  DifferentialForm r(a.dim_, a.degree_, a.value_rank_);
  for (const auto& [k, v] : a.coeffs_)
    for (std::size_t s = 0; s < v.size(); ++s) r.add(k, f * v[s], s);
  return r;
}

bool operator==(const DifferentialForm& a, const DifferentialForm& b) {
  return a.degree_ == b.degree_ && a.value_rank_ == b.value_rank_ && a.coeffs_ == b.coeffs_;
}

bool DifferentialForm::keys_within(const IndexList& allowed) const {
  for (const auto& [k, v] : coeffs_)
    for (auto i : k)
      if (std::find(allowed.begin(), allowed.end(), i) == allowed.end()) return false;
  return true;
}

std::optional<std::pair<IndexTuple, std::size_t>> DifferentialForm::first_nonzero() const {
  for (const auto& [k, v] : coeffs_)
    for (std::size_t s = 0; s < v.size(); ++s)
      if (!v[s].is_zero()) return std::make_pair(k, s);
  return std::nullopt;
}

std::string DifferentialForm::to_string(const std::vector<std::string>& names) const {
  if (coeffs_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [k, v] : coeffs_) {
    for (std::size_t s = 0; s < v.size(); ++s) {
      if (v[s].is_zero()) continue;
      if (!first) out << " + ";
      first = false;
      out << "(" << v[s].to_string(names) << ")";
      for (std::size_t p = 0; p < k.size(); ++p) out << (p == 0 ? " d" : "^d") << names.at(k[p]);
      if (value_rank_ > 1) out << " e" << (s + 1);
    }
  }
  return out.str();
}

// --- calculus --------------------------------------------------------------

DifferentialForm exterior_derivative(const DifferentialForm& alpha, const IndexList& dirs) {
  DifferentialForm r(alpha.dim(), alpha.degree() + 1, alpha.value_rank());
  for (const auto& [key, v] : alpha.coeffs()) {
    for (auto j : dirs) {
      if (std::find(key.begin(), key.end(), j) != key.end()) continue;
      IndexTuple idx;
      idx.reserve(key.size() + 1);
      idx.push_back(j);
      idx.insert(idx.end(), key.begin(), key.end());
      for (std::size_t s = 0; s < v.size(); ++s)
        if (!v[s].is_zero()) r.add(idx, v[s].partial(j), s);
    }
  }
  return r;
}

DifferentialForm exterior_derivative(const DifferentialForm& alpha) {
  IndexList all(alpha.dim());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return exterior_derivative(alpha, all);
}

DifferentialForm vertical_exterior_derivative(const ChartSpec& chart, const DifferentialForm& alpha) {
  if (!chart.is_fibered()) throw Error(ErrorCode::ChartNotFibered, "chart declares no fiber blocks");
  const IndexList fib = chart.fiber();
  if (!alpha.keys_within(fib))
    throw Error(ErrorCode::NotVertical, "vertical form carries a non-fiber index");
  return exterior_derivative(alpha, fib);
}

DifferentialForm interior_product(const VectorField& x, const DifferentialForm& alpha) {
  if (alpha.degree() == 0) throw Error(ErrorCode::DegreeMismatch, "interior product of a 0-form");
  DifferentialForm r(alpha.dim(), alpha.degree() - 1, alpha.value_rank());
  for (const auto& [key, v] : alpha.coeffs()) {
    for (std::size_t p = 0; p < key.size(); ++p) {
      const Expr& xp = x[key[p]];
      if (xp.is_zero()) continue;
      IndexTuple rest;
      for (std::size_t q = 0; q < key.size(); ++q)
        if (q != p) rest.push_back(key[q]);
      for (std::size_t s = 0; s < v.size(); ++s) {
        Expr c = xp * v[s];
        r.add(rest, p % 2 == 0 ? c : -c, s);
      }
    }
  }
  return r;
}

DifferentialForm wedge(const DifferentialForm& alpha, const DifferentialForm& beta) {
  if (alpha.value_rank() > 1 && beta.value_rank() > 1)
    throw Error(ErrorCode::DegreeMismatch, "wedge of two vector-valued forms");
  const std::size_t vr = std::max(alpha.value_rank(), beta.value_rank());
  DifferentialForm r(alpha.dim(), alpha.degree() + beta.degree(), vr);
  for (const auto& [ka, va] : alpha.coeffs()) {
    for (const auto& [kb, vb] : beta.coeffs()) {
      IndexTuple idx = ka;
      idx.insert(idx.end(), kb.begin(), kb.end());
      for (std::size_t s = 0; s < vr; ++s) {
        const Expr& ca = va[alpha.value_rank() > 1 ? s : 0];
        const Expr& cb = vb[beta.value_rank() > 1 ? s : 0];
        if (!ca.is_zero() && !cb.is_zero()) r.add(idx, ca * cb, s);
      }
    }
  }
  return r;
}

Expr evaluate(const DifferentialForm& alpha, const std::vector<VectorField>& xs, std::size_t a) {
  if (xs.size() != alpha.degree()) throw Error(ErrorCode::DegreeMismatch, "wrong number of vectors");
  DifferentialForm f = alpha;
  for (const auto& x : xs) f = interior_product(x, f);
  return f.component({}, a);
}

DifferentialForm lie_derivative(const VectorField& x, const DifferentialForm& alpha,
                                const IndexList& dirs) {
  DifferentialForm r(alpha.dim(), alpha.degree(), alpha.value_rank());
  for (const auto& [key, v] : alpha.coeffs()) {
    for (std::size_t s = 0; s < v.size(); ++s) {
      if (v[s].is_zero()) continue;
      Expr xc(alpha.dim());
      for (auto j : dirs)
        if (!x[j].is_zero()) xc += x[j] * v[s].partial(j);
      r.add(key, xc, s);
      for (std::size_t p = 0; p < key.size(); ++p) {
        const Expr& comp = x[key[p]];
        if (comp.is_constant()) continue;
        for (auto l : dirs) {
          Expr dl = comp.partial(l);
          if (dl.is_zero()) continue;
          IndexTuple idx = key;
          idx[p] = l;
          r.add(idx, v[s] * dl, s);
        }
      }
    }
  }
  return r;
}

DifferentialForm lie_derivative(const VectorField& x, const DifferentialForm& alpha) {
  IndexList all(alpha.dim());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return lie_derivative(x, alpha, all);
}

DifferentialForm vertical_lie_derivative(const ChartSpec& chart, const VectorField& x,
                                         const DifferentialForm& alpha) {
  if (!chart.is_fibered()) throw Error(ErrorCode::ChartNotFibered, "chart declares no fiber blocks");
  if (!is_vertical(chart, x)) throw Error(ErrorCode::NotVertical, "vector field has base components");
  const IndexList fib = chart.fiber();
  if (!alpha.keys_within(fib))
    throw Error(ErrorCode::NotVertical, "vertical form carries a non-fiber index");
  return lie_derivative(x, alpha, fib);
}

DifferentialForm cartan_lie_derivative(const VectorField& x, const DifferentialForm& alpha,
                                       const IndexList& dirs) {
  DifferentialForm out = interior_product(x, exterior_derivative(alpha, dirs));
  if (alpha.degree() > 0) out = out + exterior_derivative(interior_product(x, alpha), dirs);
  return out;
}

// --- projections -----------------------------------------------------------

namespace {

std::pair<IndexList, IndexList> cut_blocks(const ChartSpec& chart, ProjectionCut cut) {
  if (!chart.is_fibered()) throw Error(ErrorCode::ChartNotFibered, "chart declares no fiber blocks");
  if (cut == ProjectionCut::Base) return {chart.base(), chart.fiber()};
  return {chart.non_lfiber(), chart.lfiber()};
}

}  // namespace

bool is_vertical(const ChartSpec& chart, const VectorField& x, ProjectionCut cut) {
  auto [projected, fiber] = cut_blocks(chart, cut);
  return std::all_of(projected.begin(), projected.end(), [&](std::size_t i) { return x[i].is_zero(); });
}

bool is_projectable(const ChartSpec& chart, const VectorField& x, ProjectionCut cut) {
  auto [projected, fiber] = cut_blocks(chart, cut);
  for (auto i : projected)
    for (auto f : fiber)
      if (x[i].depends_on(f)) return false;
  return true;
}

// --- distributions ---------------------------------------------------------

Distribution Distribution::coordinate_block(std::size_t dim, const IndexList& indices) {
  Distribution d;
  for (auto i : indices) d.frame.push_back(VectorField::coordinate(dim, i));
  d.declared_rank = indices.size();
  return d;
}

std::optional<IndexList> Distribution::coordinate_indices() const {
  IndexList out;
  for (const auto& x : frame) {
    std::optional<std::size_t> hit;
    for (std::size_t i = 0; i < x.dim(); ++i) {
      if (x[i].is_zero()) continue;
      if (hit || !(x[i].is_constant() && x[i].constant_value() == 1)) return std::nullopt;
      hit = i;
    }
    if (!hit) return std::nullopt;
    out.push_back(*hit);
  }
  return out;
}

AnnihilatorResult annihilator_frame(const Distribution& l, std::size_t dim) {
  AnnihilatorResult res;
  if (l.frame.size() != l.declared_rank)
    throw Error(ErrorCode::RankDeficient, "frame size differs from declared rank");
  if (auto idx = l.coordinate_indices()) {
    IndexList sorted = *idx;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw Error(ErrorCode::RankDeficient, "repeated coordinate field in frame");
    for (std::size_t j = 0; j < dim; ++j)
      if (!std::binary_search(sorted.begin(), sorted.end(), j))
        res.forms.push_back(DifferentialForm::term(dim, {j}, Expr(dim, Rational(1))));
    return res;
  }
  res.coordinate_block = false;
  Matrix<Expr> m;
  for (const auto& x : l.frame) m.push_back(x.components());
  if (rank(m) < l.declared_rank) throw Error(ErrorCode::RankDeficient, "frame is not independent");
  for (auto& v : nullspace(m, dim, Expr(dim))) {
    DifferentialForm f(dim, 1);
    for (std::size_t j = 0; j < dim; ++j) f.add({j}, v[j]);
    res.forms.push_back(std::move(f));
  }
  return res;
}

InvolutivityResult check_involutive(const Distribution& l) {
  InvolutivityResult res;
  if (l.coordinate_indices()) return res;
  Matrix<Expr> base;
  for (const auto& x : l.frame) base.push_back(x.components());
  const std::size_t r0 = rank(base);
  for (std::size_t a = 0; a < l.frame.size(); ++a) {
    for (std::size_t b = a + 1; b < l.frame.size(); ++b) {
      Matrix<Expr> m = base;
      m.push_back(lie_bracket(l.frame[a], l.frame[b]).components());
      if (rank(m) > r0) {
        res.involutive = false;
        res.witness = std::make_pair(a, b);
        return res;
      }
    }
  }
  return res;
}

}  // namespace lagconn
