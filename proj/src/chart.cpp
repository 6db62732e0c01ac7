#include "lagconn/chart.hpp"

#include "lagconn/error.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <set>

namespace lagconn {

bool Interval::contains(const Rational& x) const {
  return (!lo || x > *lo) && (!hi || x < *hi);
}

bool Interval::contains(double x) const {
  return (!lo || x > lo->get_d()) && (!hi || x < hi->get_d());
}

namespace {

bool is_identifier(const std::string& s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

}  // namespace

ChartSpec::ChartSpec(std::vector<std::string> names, IndexList base, IndexList efiber,
                     IndexList lfiber, std::vector<Interval> domain)
    : names_(std::move(names)),
      base_(std::move(base)),
      efiber_(std::move(efiber)),
      lfiber_(std::move(lfiber)),
      domain_(std::move(domain)) {
  const std::size_t n = names_.size();
  if (n == 0) throw Error(ErrorCode::InvalidChart, "chart dimension must be positive");
  std::set<std::string> seen;
  for (const auto& s : names_) {
    if (!is_identifier(s)) throw Error(ErrorCode::InvalidChart, "bad coordinate name '" + s + "'");
    if (!seen.insert(s).second) throw Error(ErrorCode::InvalidChart, "duplicate name '" + s + "'");
  }
  block_of_.assign(n, Block::Base);
  std::vector<int> hits(n, 0);
  auto mark = [&](IndexList& list, Block b) {
    std::sort(list.begin(), list.end());
    for (auto i : list) {
      if (i >= n) throw Error(ErrorCode::InvalidChart, "block index out of range");
      ++hits[i];
      block_of_[i] = b;
    }
  };
  mark(base_, Block::Base);
  mark(efiber_, Block::EFiber);
  mark(lfiber_, Block::LFiber);
  for (std::size_t i = 0; i < n; ++i)
    if (hits[i] != 1)
      throw Error(ErrorCode::InvalidChart, "blocks must partition the coordinates (index " +
                                               std::to_string(i) + ")");
  if (domain_.empty()) domain_.resize(n);
  if (domain_.size() != n) throw Error(ErrorCode::InvalidChart, "domain has wrong arity");
  for (const auto& iv : domain_)
    if (iv.lo && iv.hi && *iv.lo >= *iv.hi) throw Error(ErrorCode::InvalidChart, "empty domain");
}

std::optional<std::size_t> ChartSpec::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  return std::nullopt;
}

IndexList ChartSpec::fiber() const {
  IndexList f = efiber_;
  f.insert(f.end(), lfiber_.begin(), lfiber_.end());
  std::sort(f.begin(), f.end());
  return f;
}

IndexList ChartSpec::non_lfiber() const {
  IndexList f = base_;
  f.insert(f.end(), efiber_.begin(), efiber_.end());
  std::sort(f.begin(), f.end());
  return f;
}

IndexList ChartSpec::all() const {
  IndexList f(dim());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = i;
  return f;
}

Block ChartSpec::block_of(std::size_t i) const { return block_of_.at(i); }

bool ChartSpec::in_domain(const Point& p) const {
  for (std::size_t i = 0; i < dim(); ++i)
    if (!domain_[i].contains(p[i])) return false;
  return true;
}

bool ChartSpec::in_domain(std::span<const double> p) const {
  for (std::size_t i = 0; i < dim(); ++i)
    if (!domain_[i].contains(p[i])) return false;
  return true;
}

std::vector<Point> ChartSpec::sample_points(std::size_t count, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::vector<Point> out;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    Point p(dim());
    for (std::size_t i = 0; i < dim(); ++i) {
      const auto& iv = domain_[i];
      Rational a = iv.lo ? *iv.lo : (iv.hi ? Rational(*iv.hi - 4) : Rational(-2));
      Rational b = iv.hi ? *iv.hi : (iv.lo ? Rational(*iv.lo + 4) : Rational(2));
      // strictly interior, denominator 1024
      const auto k = static_cast<long>(rng() % 1023u) + 1;
      Rational t(k, 1024);
      t.canonicalize();
      p[i] = a + (b - a) * t;
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<double> to_double(const Point& p) {
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i].get_d();
  return out;
}

}  // namespace lagconn
