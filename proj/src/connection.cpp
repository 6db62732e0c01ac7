#include "lagconn/connection.hpp"

#include "lagconn/error.hpp"

#include <algorithm>

namespace lagconn {

namespace {

bool contains(const IndexList& l, std::size_t i) { return std::find(l.begin(), l.end(), i) != l.end(); }

void require_square_scope(const Connection& nabla, const char* what) {
  if (nabla.directions() != nabla.values())
    throw Error(ErrorCode::ScopeMismatch, std::string(what) + " needs a connection with D = V");
}

IndexTuple prepend(std::size_t i, const IndexTuple& z) {
  IndexTuple idx{i};
  idx.insert(idx.end(), z.begin(), z.end());
  return idx;
}

}  // namespace

VectorField covariant_derivative(const Connection& nabla, const VectorField& x, const VectorField& y) {
  const std::size_t n = nabla.dim();
  for (std::size_t j = 0; j < n; ++j) {
    if (!x[j].is_zero() && !nabla.in_directions(j))
      throw Error(ErrorCode::OutOfScope, "direction field leaves the connection scope");
    if (!y[j].is_zero() && !nabla.in_values(j))
      throw Error(ErrorCode::OutOfScope, "section leaves the connection scope");
  }
  VectorField out(n);
  for (std::size_t i = 0; i < n; ++i) {
    Expr acc(n);
    for (auto j : nabla.directions()) {
      if (x[j].is_zero()) continue;
      Expr inner = y[i].partial(j);
      for (auto k : nabla.values())
        if (!y[k].is_zero() && !nabla.gamma(i, j, k).is_zero()) inner += nabla.gamma(i, j, k) * y[k];
      acc += x[j] * inner;
    }
    out[i] = acc;
  }
  return out;
}

CovariantTensor torsion(const Connection& nabla, ExecPolicy policy) {
  require_square_scope(nabla, "torsion");
  const std::size_t n = nabla.dim();
  CovariantTensor t(n, 2, n);
  for_each_index(t.size(), [&](std::size_t f) {
    auto [idx, i] = t.unflatten(f);
    const std::size_t j = idx[0], k = idx[1];
    if (!nabla.in_directions(j) || !nabla.in_directions(k) || !nabla.in_values(i)) return;
    t.flat(f) = nabla.gamma(i, j, k) - nabla.gamma(i, k, j);
  }, policy);
  return t;
}

CovariantTensor curvature(const Connection& nabla, ExecPolicy policy) {
  require_square_scope(nabla, "curvature");
  const std::size_t n = nabla.dim();
  const IndexList& v = nabla.values();
  CovariantTensor r(n, 3, n);
  for_each_index(r.size(), [&](std::size_t f) {
    auto [idx, i] = r.unflatten(f);
    const std::size_t j = idx[0], k = idx[1], l = idx[2];
    if (!nabla.in_values(i) || !nabla.in_values(j) || !nabla.in_directions(k) || !nabla.in_directions(l))
      return;
    Expr acc = nabla.gamma(i, l, j).partial(k) - nabla.gamma(i, k, j).partial(l);
    for (auto m : v) {
      const Expr& a = nabla.gamma(i, k, m);
      const Expr& b = nabla.gamma(m, l, j);
      if (!a.is_zero() && !b.is_zero()) acc += a * b;
      const Expr& c = nabla.gamma(i, l, m);
      const Expr& d = nabla.gamma(m, k, j);
      if (!c.is_zero() && !d.is_zero()) acc -= c * d;
    }
    r.flat(f) = acc;
  }, policy);
  return r;
}

CovariantTensor nabla_form(const Connection& nabla, const DifferentialForm& omega, ExecPolicy policy) {
  const std::size_t n = nabla.dim();
  if (!omega.keys_within(nabla.values()))
    throw Error(ErrorCode::OutOfScope, "form has components outside the connection's value span");
  const std::size_t deg = omega.degree();
  const std::size_t vr = omega.value_rank();
  CovariantTensor out(n, deg + 1, vr);
  for_each_index(out.size(), [&](std::size_t f) {
    auto [idx, a] = out.unflatten(f);
    if (!nabla.in_directions(idx[0])) return;
    for (std::size_t p = 1; p <= deg; ++p)
      if (!nabla.in_values(idx[p])) return;
    const std::size_t j = idx[0];
    IndexTuple args(idx.begin() + 1, idx.end());
    Expr acc = omega.component(args, a).partial(j);
    for (std::size_t p = 0; p < deg; ++p) {
      for (auto m : nabla.values()) {
        const Expr& g = nabla.gamma(m, j, args[p]);
        if (g.is_zero()) continue;
        IndexTuple sub = args;
        sub[p] = m;
        Expr c = omega.component(sub, a);
        if (!c.is_zero()) acc -= g * c;
      }
    }
    out.flat(f) = acc;
  }, policy);
  return out;
}

PreservationResult preserves_distribution(const Connection& nabla, const IndexList& L, bool strict) {
  PreservationResult res;
  const std::size_t n = nabla.dim();
  for (std::size_t i = 0; i < n; ++i) {
    if (contains(L, i)) continue;
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        const bool hit = contains(L, k) || (strict && contains(L, j));
        if (hit && !nabla.gamma(i, j, k).is_zero()) {
          res.preserves = false;
          res.witness = IndexTuple{i, j, k};
          return res;
        }
      }
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Bott connection

Connection bott_connection(const GeometricStructure& s) {
  const std::size_t n = s.dim();
  const std::size_t vr = s.form.value_rank();
  const auto tests = tuples(s.arg_indices(), s.k, true);
  const Expr zero(n);
  Matrix<Expr> m, rhs;
  for (std::size_t a = 0; a < vr; ++a) {
    for (const auto& z : tests) {
      std::vector<Expr> row, b;
      for (auto i : s.L) row.push_back(s.form.component(prepend(i, z), a));
      for (auto j : s.L)
        for (auto k : s.L) b.push_back(s.form.component(prepend(k, z), a).partial(j));
      m.push_back(std::move(row));
      rhs.push_back(std::move(b));
    }
  }
  auto res = solve(m, rhs, zero);
  if (res.rank < s.L.size())
    throw Error(ErrorCode::DegeneratePairing, "musical pairing on L has rank " + std::to_string(res.rank) +
                                                  " < " + std::to_string(s.L.size()));
  if (!res.consistent) {
    const std::size_t col = *res.bad_rhs;
    const std::size_t j = s.L[col / s.L.size()], k = s.L[col % s.L.size()];
    throw Error(ErrorCode::NotInRange, "Lie derivative of the flat of " + s.chart.name(k) + " along " +
                                           s.chart.name(j) + " leaves the musical image");
  }
  Connection out(n, s.L, s.L);
  for (std::size_t c = 0; c < s.L.size(); ++c)
    for (std::size_t jk = 0; jk < s.L.size() * s.L.size(); ++jk)
      out.set_gamma(s.L[c], s.L[jk / s.L.size()], s.L[jk % s.L.size()], res.x[c][jk]);
  return out;
}

CovariantTensor bott_identity_residual(const GeometricStructure& s, const Connection& nabla) {
  const std::size_t n = s.dim();
  const std::size_t vr = s.form.value_rank();
  CovariantTensor out(n, 2 + s.k, vr);
  for (const auto& z : tuples(s.arg_indices(), s.k, true)) {
    for (auto j : s.L) {
      for (auto k : s.L) {
        for (std::size_t a = 0; a < vr; ++a) {
          Expr lhs(n);
          for (std::size_t i = 0; i < n; ++i) {
            const Expr& g = nabla.gamma(i, j, k);
            if (!g.is_zero()) lhs += g * s.form.component(prepend(i, z), a);
          }
          IndexTuple idx{j, k};
          idx.insert(idx.end(), z.begin(), z.end());
          out.set(idx, a, lhs - s.form.component(prepend(k, z), a).partial(j));
        }
      }
    }
  }
  return out;
}

CovariantTensor bott_torsion_musical(const GeometricStructure& s) {
  const std::size_t n = s.dim();
  const std::size_t vr = s.form.value_rank();
  const DifferentialForm dw = s.differential(s.form);
  const auto tests = tuples(s.arg_indices(), s.k, true);
  Matrix<Expr> m, rhs;
  for (std::size_t a = 0; a < vr; ++a) {
    for (const auto& z : tests) {
      std::vector<Expr> row, b;
      for (auto i : s.L) row.push_back(s.form.component(prepend(i, z), a));
      for (auto j : s.L) {
        for (auto k : s.L) {
          IndexTuple idx{j, k};
          idx.insert(idx.end(), z.begin(), z.end());
          b.push_back(dw.component(idx, a));
        }
      }
      m.push_back(std::move(row));
      rhs.push_back(std::move(b));
    }
  }
  auto res = solve(m, rhs, Expr(n));
  if (res.rank < s.L.size()) throw Error(ErrorCode::DegeneratePairing, "musical pairing on L is singular");
  if (!res.consistent) throw Error(ErrorCode::NotInRange, "exterior derivative leaves the musical image");
  CovariantTensor t(n, 2, n);
  const std::size_t nl = s.L.size();
  for (std::size_t c = 0; c < nl; ++c)
    for (std::size_t jk = 0; jk < nl * nl; ++jk) t.set({s.L[jk / nl], s.L[jk % nl]}, s.L[c], res.x[c][jk]);
  return t;
}

CovariantTensor torsion_musical_defect(const GeometricStructure& s, const Connection& nabla) {
  const std::size_t n = s.dim();
  const std::size_t vr = s.form.value_rank();
  const DifferentialForm dw = s.differential(s.form);
  CovariantTensor out(n, 2 + s.k, vr);
  for (const auto& z : tuples(s.arg_indices(), s.k, true)) {
    for (auto j : s.L) {
      for (auto k : s.L) {
        IndexTuple idx{j, k};
        idx.insert(idx.end(), z.begin(), z.end());
        for (std::size_t a = 0; a < vr; ++a) {
          Expr lhs(n);
          for (std::size_t i = 0; i < n; ++i) {
            Expr t = nabla.gamma(i, j, k) - nabla.gamma(i, k, j);
            if (!t.is_zero()) lhs += t * s.form.component(prepend(i, z), a);
          }
          out.set(idx, a, lhs - dw.component(idx, a));
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// symplectization

Connection symplectize(const Connection& nabla0, const DifferentialForm& omega, SymplectizeFormula formula,
                       ExecPolicy policy) {
  const std::size_t n = nabla0.dim();
  if (!nabla0.is_full()) throw Error(ErrorCode::ScopeMismatch, "symplectize needs a full connection");
  if (omega.degree() != 2 || omega.value_rank() != 1)
    throw Error(ErrorCode::DegreeMismatch, "symplectize needs a scalar 2-form");
  const Expr zero(n);
  Matrix<Expr> w(n, std::vector<Expr>(n, zero));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t z = 0; z < n; ++z) w[i][z] = omega.component({i, z});
  auto winv = inverse(w, zero);
  if (!winv) throw Error(ErrorCode::Degenerate, "2-form is degenerate");

  // G[a][b][c] = ω(∇⁰_{∂a} ∂b, ∂c)
  std::vector<Expr> g = fill_table(n * n * n, zero, [&](std::size_t f) {
    const std::size_t a = f / (n * n), b = (f / n) % n, c = f % n;
    Expr acc(n);
    for (std::size_t m = 0; m < n; ++m) {
      const Expr& gm = nabla0.gamma(m, a, b);
      if (!gm.is_zero() && !w[m][c].is_zero()) acc += gm * w[m][c];
    }
    return acc;
  }, policy);
  auto G = [&](std::size_t a, std::size_t b, std::size_t c) -> const Expr& { return g[(a * n + b) * n + c]; };
  auto dw = [&](std::size_t j, std::size_t k, std::size_t z) { return w[k][z].partial(j); };
  const Rational third(1, 3), sixth(1, 6), half(1, 2);

  // R[j][k][z] = ω(∇_{∂j} ∂k, ∂z)
  std::vector<Expr> rt = fill_table(n * n * n, zero, [&](std::size_t f) {
    const std::size_t j = f / (n * n), k = (f / n) % n, z = f % n;
    switch (formula) {
      case SymplectizeFormula::General: {
        Expr nw_jkz = dw(j, k, z) - G(j, k, z) + G(j, z, k);  // (∇⁰_j ω)(k,z)
        Expr nw_kjz = dw(k, j, z) - G(k, j, z) + G(k, z, j);
        Expr t_jk_z = G(j, k, z) - G(k, j, z);  // ω(T⁰(j,k),z)
        Expr t_zj_k = G(z, j, k) - G(j, z, k);
        Expr t_zk_j = G(z, k, j) - G(k, z, j);
        return G(j, k, z) + (nw_jkz + nw_kjz).scaled(third) - t_jk_z.scaled(half) +
               (t_zj_k + t_zk_j).scaled(sixth);
      }
      case SymplectizeFormula::Expanded:
        return (G(j, k, z) + G(k, j, z) + G(z, j, k) + G(z, k, j) + G(j, z, k) + G(k, z, j)).scaled(sixth) +
               (dw(j, k, z) + dw(k, j, z)).scaled(third);
      case SymplectizeFormula::TorsionFree:
        return G(j, k, z).scaled(Rational(2, 3)) - G(k, j, z).scaled(third) +
               (G(j, z, k) + G(k, z, j) + dw(j, k, z) + dw(k, j, z)).scaled(third);
    }
    return Expr(n);
  }, policy);

  std::vector<Expr> gamma = fill_table(n * n * n, zero, [&](std::size_t f) {
    const std::size_t i = f / (n * n), j = (f / n) % n, k = f % n;
    Expr acc(n);
    for (std::size_t z = 0; z < n; ++z) {
      const Expr& r = rt[(j * n + k) * n + z];
      if (!r.is_zero() && !(*winv)[z][i].is_zero()) acc += r * (*winv)[z][i];
    }
    return acc;
  }, policy);

  Connection out(n);
  for (std::size_t f = 0; f < gamma.size(); ++f) out.set_gamma(f / (n * n), (f / n) % n, f % n, gamma[f]);
  return out;
}

Connection blend(const std::vector<Connection>& connections, const std::vector<Expr>& weights) {
  if (connections.empty() || connections.size() != weights.size())
    throw Error(ErrorCode::WeightsNotPartition, "need one weight per connection");
  const std::size_t n = connections[0].dim();
  Expr sum(n);
  for (const auto& w : weights) sum += w;
  if (!(sum == Expr(n, Rational(1))))
    throw Error(ErrorCode::WeightsNotPartition, "weights sum to " + sum.to_string({}) + " instead of 1");
  Connection out(n, connections[0].directions(), connections[0].values());
  for (std::size_t c = 0; c < connections.size(); ++c) {
    if (!connections[c].same_scope(connections[0]))
      throw Error(ErrorCode::ScopeMismatch, "blended connections have different scopes");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
          const Expr& g = connections[c].gamma(i, j, k);
          if (!g.is_zero()) out.add_gamma(i, j, k, weights[c] * g);
        }
  }
  return out;
}

// ---------------------------------------------------------------------------
// differences and classification

CovariantTensor lower_with_form(const CovariantTensor& S, const GeometricStructure& s) {
  const std::size_t n = s.dim();
  const std::size_t vr = s.form.value_rank();
  const IndexList args = s.arg_indices();
  CovariantTensor out(n, s.k + 2, vr);
  for (const auto& idx : tuples(args, s.k + 2, false)) {
    IndexTuple z(idx.begin() + 2, idx.end());
    for (std::size_t a = 0; a < vr; ++a) {
      Expr acc(n);
      for (std::size_t m = 0; m < n; ++m) {
        const Expr& sm = S.at({idx[0], idx[1]}, m);
        if (!sm.is_zero()) acc += sm * s.form.component(prepend(m, z), a);
      }
      out.set(idx, a, acc);
    }
  }
  return out;
}

DifferenceTensor difference_tensor(const Connection& nabla_prime, const Connection& nabla,
                                   const GeometricStructure& s) {
  if (!nabla_prime.same_scope(nabla)) throw Error(ErrorCode::ScopeMismatch, "connections have different scopes");
  const std::size_t n = nabla.dim();
  DifferenceTensor d{CovariantTensor(n, 2, n), {}};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) d.S.set({j, k}, i, nabla_prime.gamma(i, j, k) - nabla.gamma(i, j, k));
  d.lowered = lower_with_form(d.S, s);
  return d;
}

Connection add_difference(const Connection& nabla, const CovariantTensor& S) {
  Connection out = nabla;
  const std::size_t n = nabla.dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        const Expr& v = S.at({j, k}, i);
        if (!v.is_zero()) out.add_gamma(i, j, k, v);
      }
  return out;
}

bool ClassReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const ClassCheck& c) { return c.passed; });
}

const ClassCheck* ClassReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

ClassReport classify_difference(const CovariantTensor& t, const GeometricStructure& s) {
  const std::size_t rank = s.kind == Kind::Sym ? 3 : s.k + 2;
  if (t.rank() != rank)
    throw Error(ErrorCode::RankMismatch, "expected rank " + std::to_string(rank) + ", got " + std::to_string(t.rank()));
  const IndexList args = s.arg_indices();
  const auto all = tuples(args, rank, false);
  const std::size_t vr = t.value_rank();
  auto run = [&](const std::string& name, auto&& violates) {
    ClassCheck c{name, true, std::nullopt};
    for (const auto& idx : all) {
      for (std::size_t a = 0; a < vr; ++a) {
        if (violates(idx, a)) {
          c.passed = false;
          c.witness = std::make_pair(idx, a);
          return c;
        }
      }
    }
    return c;
  };
  auto swapped = [](IndexTuple idx, std::size_t p, std::size_t q) {
    std::swap(idx[p], idx[q]);
    return idx;
  };
  auto count_L = [&](const IndexTuple& idx) {
    return static_cast<std::size_t>(std::count_if(idx.begin(), idx.end(), [&](std::size_t i) { return s.in_L(i); }));
  };

  ClassReport rep;
  if (s.kind == Kind::Sym) {
    rep.checks.push_back(run("totally-symmetric", [&](const IndexTuple& idx, std::size_t a) {
      const Expr& v = t.at(idx, a);
      return !(v == t.at(swapped(idx, 0, 1), a)) || !(v == t.at(swapped(idx, 1, 2), a));
    }));
  } else {
    rep.checks.push_back(run("symmetric-first-two", [&](const IndexTuple& idx, std::size_t a) {
      return !(t.at(idx, a) == t.at(swapped(idx, 0, 1), a));
    }));
    rep.checks.push_back(run("antisymmetric-last-k", [&](const IndexTuple& idx, std::size_t a) {
      for (std::size_t p = 2; p + 1 < rank; ++p)
        if (!(t.at(idx, a) + t.at(swapped(idx, p, p + 1), a)).is_zero()) return true;
      return false;
    }));
    rep.checks.push_back(run("cyclic-identity", [&](const IndexTuple& idx, std::size_t a) {
      Expr acc = t.at(idx, a);
      for (std::size_t p = 2; p < rank; ++p) {
        IndexTuple moved = idx;
        moved[1] = idx[p];
        moved[p] = idx[1];
        acc -= t.at(moved, a);
      }
      return !acc.is_zero();
    }));
  }
  rep.checks.push_back(run("L-degenerate", [&](const IndexTuple& idx, std::size_t a) {
    return count_L(idx) >= 2 && !t.at(idx, a).is_zero();
  }));
  if (s.kind == Kind::Multi) {
    rep.checks.push_back(run("vertical-degenerate", [&](const IndexTuple& idx, std::size_t a) {
      return s.vertical_count(idx) >= s.r + 1 && !t.at(idx, a).is_zero();
    }));
  }
  return rep;
}

// ---------------------------------------------------------------------------

CovariantTensor torsion_dform_defect(const Connection& nabla, const DifferentialForm& alpha, ExecPolicy policy) {
  require_square_scope(nabla, "torsion/exterior-derivative defect");
  const std::size_t n = nabla.dim();
  const std::size_t deg = alpha.degree();
  const std::size_t vr = alpha.value_rank();
  const IndexList& dirs = nabla.directions();
  const CovariantTensor na = nabla_form(nabla, alpha, policy);
  const DifferentialForm da = exterior_derivative(alpha, dirs);
  const auto tups = tuples(dirs, deg + 1, true);
  CovariantTensor out(n, deg + 1, vr);
  std::vector<Expr> vals = fill_table(tups.size() * vr, Expr(n), [&](std::size_t f) {
    const IndexTuple& x = tups[f / vr];
    const std::size_t a = f % vr;
    Expr acc(n);
    for (std::size_t i = 0; i <= deg; ++i) {
      IndexTuple idx{x[i]};
      for (std::size_t q = 0; q <= deg; ++q)
        if (q != i) idx.push_back(x[q]);
      const Expr& v = na.at(idx, a);
      acc = i % 2 == 0 ? acc + v : acc - v;
    }
    acc -= da.component(x, a);
    for (std::size_t i = 0; i <= deg; ++i) {
      for (std::size_t j = i + 1; j <= deg; ++j) {
        IndexTuple rest;
        for (std::size_t q = 0; q <= deg; ++q)
          if (q != i && q != j) rest.push_back(x[q]);
        Expr term(n);
        for (auto m : nabla.values()) {
          Expr tm = nabla.gamma(m, x[i], x[j]) - nabla.gamma(m, x[j], x[i]);
          if (tm.is_zero()) continue;
          term += tm * alpha.component(prepend(m, rest), a);
        }
        acc = (i + j) % 2 == 0 ? acc - term : acc + term;
      }
    }
    return acc;
  }, policy);
  for (std::size_t f = 0; f < vals.size(); ++f) out.set(tups[f / vr], f % vr, vals[f]);
  return out;
}

bool restricts_to_bott(const Connection& nabla, const GeometricStructure& s) {
  const std::size_t n = nabla.dim();
  for (auto j : s.L) {
    for (auto k : s.L) {
      if (!nabla.in_directions(j) || !nabla.in_values(k))
        throw Error(ErrorCode::PreconditionViolated, "connection scope does not cover L");
      for (std::size_t i = 0; i < n; ++i) {
        if (s.in_L(i)) continue;
        if (!(nabla.gamma(i, j, k) - nabla.gamma(i, k, j)).is_zero())
          throw Error(ErrorCode::PreconditionViolated, "torsion on L x L has a component outside L");
      }
    }
  }
  const Connection bott = bott_connection(s);
  for (auto j : s.L)
    for (auto k : s.L)
      for (std::size_t i = 0; i < n; ++i)
        if (!(nabla.gamma(i, j, k) == bott.gamma(i, j, k))) return false;
  return true;
}

Connection darboux_connection(const ChartSpec& chart, const std::vector<Expr>& new_coords, const IndexList& dirs) {
  const std::size_t n = chart.dim();
  if (new_coords.size() != n) throw Error(ErrorCode::DegreeMismatch, "need one new coordinate per chart coordinate");
  const Expr zero(n);
  Matrix<Expr> jac(dirs.size(), std::vector<Expr>(dirs.size(), zero));
  for (std::size_t a = 0; a < dirs.size(); ++a)
    for (std::size_t i = 0; i < dirs.size(); ++i) jac[a][i] = new_coords[dirs[a]].partial(dirs[i]);
  auto jinv = inverse(jac, zero);
  if (!jinv) throw Error(ErrorCode::Degenerate, "coordinate change has singular Jacobian");
  Connection out(n, dirs, dirs);
  for (std::size_t a = 0; a < dirs.size(); ++a) {
    for (std::size_t j = 0; j < dirs.size(); ++j) {
      const Expr dj = new_coords[dirs[a]].partial(dirs[j]);
      for (std::size_t k = 0; k < dirs.size(); ++k) {
        const Expr hess = dj.partial(dirs[k]);
        if (hess.is_zero()) continue;
        for (std::size_t i = 0; i < dirs.size(); ++i)
          if (!(*jinv)[i][a].is_zero()) out.add_gamma(dirs[i], dirs[j], dirs[k], (*jinv)[i][a] * hess);
      }
    }
  }
  return out;
}

Connection zero_connection_for(const GeometricStructure& s) {
  if (s.kind == Kind::Poly) return Connection(s.dim(), s.chart.fiber(), s.chart.fiber());
  return Connection(s.dim());
}

std::vector<CovariantTensor> admissible_difference_basis(const GeometricStructure& s) {
  const std::size_t n = s.dim();
  const IndexList args = s.arg_indices();
  // unknowns S^i_{jk} with j <= k, skipping entries forced to zero by L-preservation
  struct Unknown {
    std::size_t i, j, k;
  };
  std::vector<Unknown> unknowns;
  for (auto i : args)
    for (std::size_t pj = 0; pj < args.size(); ++pj)
      for (std::size_t pk = pj; pk < args.size(); ++pk) {
        const std::size_t j = args[pj], k = args[pk];
        if (!s.in_L(i) && (s.in_L(j) || s.in_L(k))) continue;
        // multisymplectic connections also preserve the vertical bundle
        if (s.kind == Kind::Multi && s.chart.in_base(i) && !(s.chart.in_base(j) && s.chart.in_base(k))) continue;
        unknowns.push_back({i, j, k});
      }
  const Expr zero(n);
  // form preservation: Σ_p ω(.., S(∂j, ∂z_p), ..) = 0 for all j and increasing Z
  Matrix<Expr> rows;
  const std::size_t deg = s.form.degree();
  for (std::size_t a = 0; a < s.form.value_rank(); ++a) {
    for (auto j : args) {
      for (const auto& z : tuples(args, deg, true)) {
        std::vector<Expr> row(unknowns.size(), zero);
        bool any = false;
        for (std::size_t u = 0; u < unknowns.size(); ++u) {
          const auto& un = unknowns[u];
          Expr coef(n);
          for (std::size_t p = 0; p < deg; ++p) {
            // S^i_{j z_p} contributes when {j, z_p} = {un.j, un.k}
            const bool match = (j == un.j && z[p] == un.k) || (j == un.k && z[p] == un.j);
            if (!match) continue;
            IndexTuple sub = z;
            sub[p] = un.i;
            coef += s.form.component(sub, a);
          }
          if (!coef.is_zero()) {
            row[u] = coef;
            any = true;
          }
        }
        if (any) rows.push_back(std::move(row));
      }
    }
  }
  // MULTI: ω(S(X,Y), Z..) = 0 when at least r+1 of X, Y, Z are vertical. Not implied by the
  // preservation conditions above, so imposed directly.
  if (s.kind == Kind::Multi) {
    for (std::size_t px = 0; px < args.size(); ++px)
      for (std::size_t py = px; py < args.size(); ++py)
        for (const auto& z : tuples(args, deg - 1, true)) {
          IndexTuple all{args[px], args[py]};
          all.insert(all.end(), z.begin(), z.end());
          if (s.vertical_count(all) < s.r + 1) continue;
          std::vector<Expr> row(unknowns.size(), zero);
          bool any = false;
          for (std::size_t u = 0; u < unknowns.size(); ++u) {
            if (unknowns[u].j != args[px] || unknowns[u].k != args[py]) continue;
            IndexTuple sub{unknowns[u].i};
            sub.insert(sub.end(), z.begin(), z.end());
            const Expr coef = s.form.component(sub, 0);
            if (coef.is_zero()) continue;
            row[u] = coef;
            any = true;
          }
          if (any) rows.push_back(std::move(row));
        }
  }
  std::vector<std::vector<Expr>> basis;
  if (rows.empty()) {
    for (std::size_t u = 0; u < unknowns.size(); ++u) {
      std::vector<Expr> v(unknowns.size(), zero);
      v[u] = Expr(n, Rational(1));
      basis.push_back(std::move(v));
    }
  } else {
    basis = nullspace(rows, unknowns.size(), zero);
  }
  std::vector<CovariantTensor> out;
  for (const auto& v : basis) {
    CovariantTensor t(n, 2, n);
    for (std::size_t u = 0; u < unknowns.size(); ++u) {
      if (v[u].is_zero()) continue;
      t.set({unknowns[u].j, unknowns[u].k}, unknowns[u].i, v[u]);
      t.set({unknowns[u].k, unknowns[u].j}, unknowns[u].i, v[u]);
    }
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace lagconn
