#pragma once

#include "lagconn/expr.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lagconn {

enum class Block { Base, EFiber, LFiber };

struct Interval {
  std::optional<Rational> lo;  // nullopt = unbounded
  std::optional<Rational> hi;
  bool contains(const Rational& x) const;
  bool contains(double x) const;
};

using Point = std::vector<Rational>;
using IndexList = std::vector<std::size_t>;

/// Coordinate chart with an ordered block partition and an open domain box.
class ChartSpec {
 public:
  ChartSpec() = default;
  /// Throws InvalidChart when the blocks do not partition {0..dim-1},
  /// names are not distinct identifiers, or the domain is empty.
  ChartSpec(std::vector<std::string> names, IndexList base, IndexList efiber, IndexList lfiber,
            std::vector<Interval> domain = {});

  std::size_t dim() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  std::optional<std::size_t> index_of(const std::string& name) const;

  const IndexList& base() const { return base_; }
  const IndexList& efiber() const { return efiber_; }
  const IndexList& lfiber() const { return lfiber_; }
  /// EFIBER and LFIBER indices together, sorted.
  IndexList fiber() const;
  IndexList non_lfiber() const;
  IndexList all() const;
  Block block_of(std::size_t i) const;
  bool is_fibered() const { return !efiber_.empty() || !lfiber_.empty(); }
  bool in_lfiber(std::size_t i) const { return block_of(i) == Block::LFiber; }
  bool in_base(std::size_t i) const { return block_of(i) == Block::Base; }

  const std::vector<Interval>& domain() const { return domain_; }
  bool in_domain(const Point& p) const;
  bool in_domain(std::span<const double> p) const;

  Expr var(std::size_t i) const { return Expr::variable(dim(), i); }
  Expr constant(const Rational& c) const { return Expr(dim(), c); }
  Expr zero() const { return Expr(dim()); }
  Expr parse(std::string_view source) const { return parse_expr(source, names_); }
  std::string print(const Expr& e) const { return e.to_string(names_); }

  /// Deterministic interior sample points (portable across platforms for a given seed).
  std::vector<Point> sample_points(std::size_t count, std::uint64_t seed) const;

 private:
  std::vector<std::string> names_;
  IndexList base_, efiber_, lfiber_;
  std::vector<Block> block_of_;
  std::vector<Interval> domain_;
};

std::vector<double> to_double(const Point& p);

}  // namespace lagconn
