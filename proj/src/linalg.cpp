#include "lagconn/linalg.hpp"

namespace lagconn {

Matrix<Rational> eval_matrix(const Matrix<Expr>& m, std::span<const Rational> point) {
  Matrix<Rational> out(m.size());
  for (std::size_t r = 0; r < m.size(); ++r) {
    out[r].reserve(m[r].size());
    for (const auto& e : m[r]) out[r].push_back(e.eval(point));
  }
  return out;
}

}  // namespace lagconn
