#pragma once

#include "lagconn/connection.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lagconn {

/// Submanifold Q complementary to the leaves: each L-block coordinate as a
/// function of the remaining coordinates. Missing entries are zero.
struct Embedding {
  std::string name;
  std::map<std::size_t, Expr> section;

  /// InvalidStructure when a component depends on an L-block coordinate.
  void check(const ChartSpec& chart, const IndexList& L) const;
  /// Section value for coordinate i (zero when absent).
  Expr value(const ChartSpec& chart, std::size_t i) const;
  /// Foot point on Q of the leaf through x.
  std::vector<double> foot(const ChartSpec& chart, const IndexList& L, const std::vector<double>& x) const;
  Point foot(const ChartSpec& chart, const IndexList& L, const Point& x) const;
};

Embedding zero_section(const std::string& name = "zero");

struct GeodesicPath {
  std::vector<double> times;
  std::vector<std::vector<double>> positions;   // full chart dimension
  std::vector<std::vector<double>> velocities;  // |L| entries
  double step = 0.0;
  int order = 4;
  double max_midpoint_defect = 0.0;

  const std::vector<double>& end() const { return positions.back(); }
};

/// Geodesic equations of a partial connection along an L-block, compiled for
/// repeated floating-point integration. Non-L coordinates stay frozen.
class GeodesicSystem {
 public:
  /// OutOfScope unless the connection scope covers L.
  GeodesicSystem(ChartSpec chart, Connection nabla, IndexList L);

  const ChartSpec& chart() const { return chart_; }
  const Connection& connection() const { return nabla_; }
  const IndexList& L() const { return L_; }
  /// Christoffels along L vanish identically.
  bool flat_coordinates() const { return flat_; }

  /// a^i = −Γ^i_{jk} v^j v^k over L. PoleOnPath when a Christoffel is singular at x.
  void acceleration(const double* x, const double* v, double* a) const;
  /// Γ^i_{jk} v^j w^k over L.
  void contract(const double* x, const double* v, const double* w, double* out) const;

  GeodesicPath integrate(const std::vector<double>& q, const std::vector<double>& u, double t_end,
                         std::size_t steps) const;

 private:
  ChartSpec chart_;
  Connection nabla_;
  IndexList L_;
  bool flat_ = true;
  struct Entry {
    std::size_t i, j, k;
    CompiledExpr gamma;
  };
  std::vector<Entry> entries_;  // nonzero Γ^i_{jk} in local L indices
};

GeodesicPath integrate_geodesic(const GeodesicSystem& sys, const std::vector<double>& q,
                                const std::vector<double>& u, double t_end, std::size_t steps);

/// Independent integrations; identical results under either policy.
std::vector<GeodesicPath> integrate_batch(const GeodesicSystem& sys, const std::vector<std::vector<double>>& qs,
                                          const std::vector<std::vector<double>>& us, double t_end,
                                          std::size_t steps, ExecPolicy policy = default_policy());

struct ExpResult {
  std::vector<double> point;
  std::size_t steps = 0;  // 0 when computed exactly as q + u
  double halving_change = 0.0;
};

/// Unit-time geodesic endpoint. Step count doubles from 16 until step halving
/// changes the endpoint by less than 1e−10 relative.
ExpResult exp_point(const GeodesicSystem& sys, const std::vector<double>& q, const std::vector<double>& u);
/// exp_Q at the foot point over `base` (only non-L entries of `base` are read).
ExpResult exp_Q(const GeodesicSystem& sys, const Embedding& Q, const std::vector<double>& base,
                const std::vector<double>& u);

struct JacobiField {
  std::vector<double> times;
  std::vector<std::vector<double>> field;       // chart components along L
  std::vector<std::vector<double>> components;  // components in the parallel frame
  double affine_residual = 0.0;                 // deviation from the least-squares line
  double initial_data_residual = 0.0;           // deviation from v0 + s·v̇0
  bool identically_zero = false;
  /// Sample times where the field vanishes (|J| < 1e−12 scale).
  std::vector<double> zeros;
  bool at_most_one_zero = true;
};

/// NotFlatOrTorsionful unless curvature and torsion of the system's connection vanish exactly.
JacobiField jacobi_transport(const GeodesicSystem& sys, const GeodesicPath& path, const std::vector<double>& v0,
                             const std::vector<double>& vdot0);

/// Max over pairs (u, v) and weights (a, b) of
/// |F(exp(a·u + b·v)) − a·F(exp u) − b·F(exp v) − (1−a−b)·F(q)|,
/// where F maps chart coordinates to autoparallel coordinates (identity when empty).
double exp_affinity_residual(const GeodesicSystem& sys, const std::vector<double>& q,
                             const std::vector<std::vector<double>>& us, const std::vector<Expr>& autoparallel = {});

struct EulerField {
  VectorField field;
  bool exact = true;  // false when only available through the numeric fallback
  unsigned ansatz_degree = 0;
};

/// Σ with ∇_Z Σ = Z for Z in L and Σ|_Q = 0. Flat adapted charts give
/// Σ = Σ (p_i − s_i) ∂p_i; otherwise a polynomial ansatz in the L-block
/// coordinates is solved exactly. NotSolvableInClosedForm when that fails.
EulerField solve_euler_field(const GeodesicSystem& sys, const Embedding& Q, unsigned max_degree = 3);
/// Numeric fallback: Σ(x) = γ̇(1) for the geodesic from the foot point reaching x.
std::vector<double> euler_field_at(const GeodesicSystem& sys, const Embedding& Q, const std::vector<double>& x);

/// ∇_Z X − Z over Z in L (zero table means Euler).
std::vector<Expr> euler_defect(const Connection& nabla, const IndexList& L, const VectorField& x);
/// X tangent to L and ∇_Z X = 0 for Z in L, exactly.
bool is_covariantly_constant(const Connection& nabla, const IndexList& L, const VectorField& x);

/// x ↦ A x + b in chart coordinates.
struct AffineMap {
  std::vector<std::vector<double>> A;
  std::vector<double> b;
  std::vector<double> apply(const std::vector<double>& x) const;
  std::vector<double> apply_linear(const std::vector<double>& v) const;
};

/// max |f(exp_x(u)) − exp_{f(x)}(T f·u)| over the sample pairs.
double affine_exp_commutation(const AffineMap& f, const GeodesicSystem& source, const GeodesicSystem& target,
                              const std::vector<std::vector<double>>& xs, const std::vector<std::vector<double>>& us);

/// Columns t, x1..xd, v1..v|L| with a header of coordinate names.
void write_path_csv(const std::string& path, const GeodesicSystem& sys, const GeodesicPath& g);
std::string path_csv(const GeodesicSystem& sys, const GeodesicPath& g);

}  // namespace lagconn
