#pragma once

#include "lagconn/structure.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fx {

using namespace lagconn;

inline ChartSpec r4(std::optional<Rational> p1_hi = std::nullopt) {
  std::vector<Interval> dom(4);
  if (p1_hi) dom[2].hi = *p1_hi;
  return ChartSpec({"q1", "q2", "p1", "p2"}, {0, 1}, {}, {2, 3}, dom);
}

inline GeometricStructure sym(const ChartSpec& c, const std::vector<std::pair<IndexTuple, std::string>>& terms) {
  GeometricStructure s;
  s.kind = Kind::Sym;
  s.chart = c;
  s.L = {2, 3};
  DifferentialForm w(4, 2);
  for (const auto& [idx, e] : terms) w.add(idx, c.parse(e));
  s.form = w;
  return s;
}

inline GeometricStructure canonical() { return sym(r4(), {{{0, 2}, "1"}, {{1, 3}, "1"}}); }
// dq1^dp1 + (1-p1) dq2^dp2 on p1 < 1
inline GeometricStructure twisted() { return sym(r4(Rational(1)), {{{0, 2}, "1"}, {{1, 3}, "1-p1"}}); }
// dq1^dp1 + dq2^dp2 + p1 dp1^dq2
inline GeometricStructure twisted_closed() { return sym(r4(), {{{0, 2}, "1"}, {{1, 3}, "1"}, {{2, 1}, "p1"}}); }
inline GeometricStructure flat_twisted(const std::string& c) {
  return sym(r4(), {{{0, 2}, "1"}, {{1, 3}, "1"}, {{0, 1}, c}});
}

inline bool all_zero(const std::vector<Expr>& v) {
  for (const auto& e : v)
    if (!e.is_zero()) return false;
  return true;
}

}  // namespace fx
