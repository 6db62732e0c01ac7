#include "fixtures.hpp"

#include "lagconn/connection.hpp"
#include "lagconn/error.hpp"
#include "lagconn/geodesic.hpp"
#include "lagconn/random.hpp"
#include "lagconn/scenario.hpp"
#include "lagconn/structure_maps.hpp"
#include "lagconn/suite.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

using namespace lagconn;
namespace fs = std::filesystem;

namespace {

// Tolerances
constexpr double kStraightLineTol = 1e-12;
constexpr double kSlopeTarget = 4.0;
constexpr double kSlopeBand = 0.2;
constexpr double kJacobiTol = 1e-8;
constexpr double kExpAffineTol = 1e-8;

const std::string CORPUS = LAGCONN_CORPUS_DIR;
const std::string CLI = LAGCONN_CLI_PATH;

struct Outcome {
  bool ok = true;
  std::string note;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      note = what;
    }
  }
};

std::vector<Scenario> corpus() {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(CORPUS))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<Scenario> out;
  for (const auto& f : files) out.push_back(load_scenario(f.string()));
  return out;
}

Scenario corpus_file(const std::string& name) { return load_scenario(CORPUS + "/" + name + ".json"); }

CovariantTensor as_tensor(const Connection& a) {
  const std::size_t n = a.dim();
  CovariantTensor t(n, 2, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) t.set({j, k}, i, a.gamma(i, j, k));
  return t;
}

CovariantTensor random_admissible(const GeometricStructure& s, Rng& rng) {
  const auto basis = admissible_difference_basis(s);
  CovariantTensor S(s.dim(), 2, s.dim());
  for (const auto& b : basis) {
    const Rational w(rng.integer(-3, 3));
    if (w == 0) continue;
    for (std::size_t f = 0; f < S.size(); ++f)
      if (!b.flat(f).is_zero()) S.flat(f) = S.flat(f) + b.flat(f).scaled(w);
  }
  return S;
}

bool valid_compatible(const Connection& c, const GeometricStructure& s) {
  return torsion(c).is_zero() && nabla_form(c, s.form).is_zero() && preserves_distribution(c, s.L).preserves;
}

bool form_closed(const GeometricStructure& s) { return s.differential(s.form).is_zero(); }

// ---------------------------------------------------------------------------

Outcome criterion1() {
  Outcome o;
  for (const char* name : {"canonical_sym_r4", "twisted_4d_closed"}) {
    const auto sc = corpus_file(name);
    o.require(torsion(bott_connection(sc.structure)).is_zero(), std::string(name) + ": Bott torsion nonzero");
  }
  const auto t = corpus_file("twisted_4d");
  const auto& s = t.structure;
  const auto b = bott_connection(s);
  o.require(torsion_musical_defect(s, b).is_zero(), "twisted_4d: musical torsion defect nonzero");
  o.require(torsion(b).at({2, 3}, 3) == s.chart.parse("1/(p1-1)"), "twisted_4d: T^p2(p1,p2) != 1/(p1-1)");
  o.require(!torsion(b).is_zero(), "twisted_4d: Bott torsion unexpectedly zero");
  o.note = o.ok ? "Bott torsion zero on closed forms, musical identity exact on twisted_4d" : o.note;
  return o;
}

Outcome criterion2() {
  Outcome o;
  std::size_t n = 0;
  for (const auto& sc : corpus()) {
    o.require(curvature(bott_connection(sc.structure)).is_zero(), sc.id + ": Bott curvature nonzero");
    ++n;
  }
  if (o.ok) o.note = std::to_string(n) + " scenarios, curvature exactly zero";
  return o;
}

Outcome criterion3() {
  Outcome o;
  Rng rng(2024);
  const auto chart = fx::r4();
  const int trials = 6;
  for (int t = 0; t < trials; ++t) {
    const auto w = random_closed_symplectic(chart, 2, rng);
    const auto n0 = random_connection(4, 2, rng);
    const auto g = symplectize(n0, w);
    const std::string tag = "trial " + std::to_string(t) + ": ";
    o.require(torsion(g).is_zero(), tag + "torsion nonzero");
    o.require(nabla_form(g, w).is_zero(), tag + "nabla omega nonzero");
    o.require(symplectize(g, w) == g, tag + "not a fixed point on torsion-free symplectic input");
    o.require(symplectize(g, w, SymplectizeFormula::TorsionFree) == g, tag + "torsion-free formula disagrees");
    o.require(symplectize(n0, w, SymplectizeFormula::Expanded) == g, tag + "expanded formula disagrees");
  }
  if (o.ok) o.note = std::to_string(trials) + " random (omega, nabla0) pairs, all identities exact";
  return o;
}

Outcome criterion4() {
  Outcome o;
  const auto s = fx::twisted_closed();
  const auto& c = s.chart;
  const IndexList all{0, 1, 2, 3};
  // blend of two Darboux-flat pieces with an exact rational partition of unity
  const auto d1 = darboux_connection(c, {c.var(0), c.var(1), c.var(2), c.parse("p2-p1^2/2")}, all);
  const auto d2 = darboux_connection(c, {c.var(0), c.var(1), c.parse("p1+3*q1^2"), c.parse("p2-p1^2/2")}, all);
  const Expr f = c.parse("1+q1^2"), g = c.parse("1+q2^2+p1^2");
  const auto blended = blend({d1, d2}, {f / (f + g), g / (f + g)});
  o.require(valid_compatible(blended, s), "blend is not torsion-free symplectic L-preserving");
  // symplectization of a generic L-preserving nabla0
  Rng rng(77);
  const auto a = random_L_preserving_perturbation(s, 2, rng);
  const auto sym = symplectize(add_difference(d1, as_tensor(a)), s.form);
  o.require(valid_compatible(sym, s), "symplectized connection is not valid");
  o.require(restricts_to_bott(sym, s), "symplectized connection does not restrict to Bott");
  o.require(!(sym == blended), "the two constructions coincide");
  const auto diff = difference_tensor(sym, blended, s);
  const auto rep = classify_difference(diff.lowered, s);
  o.require(rep.passed(), "difference fails classification");
  o.require(rep.find("totally-symmetric") && rep.find("L-degenerate"), "classification checks missing");
  // converse
  for (int t = 0; t < 3; ++t) {
    const auto S = random_admissible(s, rng);
    o.require(classify_difference(lower_with_form(S, s), s).passed(), "random admissible S fails classification");
    const auto moved = add_difference(blended, S);
    o.require(valid_compatible(moved, s), "blend + S is not valid");
  }
  if (o.ok) o.note = "blend vs symplectize difference classified; blend + S stays valid";
  return o;
}

Outcome criterion5() {
  Outcome o;
  Rng rng(5);
  for (const char* name : {"poly_k1_nhat2", "multi_n2_k2_r2"}) {
    const auto sc = corpus_file(name);
    const auto& s = sc.structure;
    const std::string tag = std::string(name) + ": ";
    const auto& flat = sc.connections.at("flat");
    const auto& pert = sc.connections.at("perturbed");
    o.require(valid_compatible(flat, s) && valid_compatible(pert, s), tag + "corpus connections invalid");
    const auto rep = classify_difference(difference_tensor(pert, flat, s).lowered, s);
    o.require(rep.passed(), tag + "corpus difference fails classification");
    const auto S = random_admissible(s, rng);
    const auto moved = add_difference(flat, S);
    o.require(valid_compatible(moved, s), tag + "S-perturbed connection invalid");
    const auto r2 = classify_difference(difference_tensor(moved, flat, s).lowered, s);
    o.require(r2.passed(), tag + "S-perturbed difference fails classification");
    std::vector<std::string> required{"symmetric-first-two", "antisymmetric-last-k", "cyclic-identity", "L-degenerate"};
    if (s.kind == Kind::Multi) required.push_back("vertical-degenerate");
    for (const auto& n : required) o.require(r2.find(n) != nullptr, tag + "missing check " + n);
    // corrupt: component on two L slots pointing out of L
    CovariantTensor bad = S;
    std::size_t m = s.dim();
    for (auto i : s.arg_indices())
      if (!s.in_L(i)) {
        m = i;
        break;
      }
    const std::size_t l = s.L.front();
    bad.set({l, l}, m, bad.at({l, l}, m) + s.chart.constant(1));
    const auto rb = classify_difference(lower_with_form(bad, s), s);
    bool witnessed = false;
    for (const auto& ch : rb.checks)
      if (!ch.passed && ch.witness) witnessed = true;
    o.require(!rb.passed() && witnessed, tag + "corrupted S not rejected with a witness");
  }
  if (o.ok) o.note = "poly and multi differences classified; corrupted S rejected with witness";
  return o;
}

Outcome criterion6() {
  Outcome o;
  Rng rng(606);
  int pairs = 0;
  for (int t = 0; t < 10; ++t) {
    const std::size_t dim = t % 2 == 0 ? 4 : 6;
    const unsigned deg = 1 + t % 3;
    IndexList all, fib;
    for (std::size_t i = 0; i < dim; ++i) all.push_back(i);
    for (std::size_t i = dim / 2; i < dim; ++i) fib.push_back(i);
    const std::size_t fdeg = 1 + (t / 2) % 3;
    // full
    const auto n = random_connection(dim, deg, rng);
    const auto a = random_form(dim, fdeg, all, deg, rng);
    o.require(torsion_dform_defect(n, a).is_zero(), "full defect nonzero (pair " + std::to_string(t) + ")");
    // vertical: scope and form restricted to the fiber directions
    Connection v(dim, fib, fib);
    for (auto i : fib)
      for (auto j : fib)
        for (auto k : fib)
          if (rng.integer(0, 1)) v.set_gamma(i, j, k, random_polynomial(dim, all, deg, rng));
    const auto b = random_form(dim, std::min<std::size_t>(fdeg, fib.size()), fib, deg, rng);
    o.require(torsion_dform_defect(v, b).is_zero(), "vertical defect nonzero (pair " + std::to_string(t) + ")");
    pairs += 2;
  }
  if (o.ok) o.note = std::to_string(pairs) + " random pairs (dims 4 and 6, degrees 1-3), defect exactly zero";
  return o;
}

Outcome criterion7() {
  Outcome o;
  Rng rng(7);
  std::size_t checked = 0;
  for (const auto& sc : corpus()) {
    const auto& s = sc.structure;
    if (!form_closed(s)) continue;
    for (const auto& [name, c] : sc.connections) {
      if (!c.same_scope(zero_connection_for(s)) || !valid_compatible(c, s)) continue;
      const std::string tag = sc.id + "/" + name + ": ";
      o.require(restricts_to_bott(c, s), tag + "does not restrict to Bott");
      const auto S = random_admissible(s, rng);
      o.require(restricts_to_bott(add_difference(c, S), s), tag + "restriction lost after adding S");
      ++checked;
    }
  }
  o.require(checked >= 8, "too few valid corpus connections");
  if (o.ok) o.note = std::to_string(checked) + " corpus connections, also after adding admissible S";
  return o;
}

Outcome criterion8() {
  Outcome o;
  std::ostringstream note;
  {
    const auto s = fx::canonical();
    const GeodesicSystem sys(s.chart, bott_connection(s), s.L);
    const std::vector<double> q{0.3, -0.2, 0.1, 0.4}, u{0.5, -1.0};
    const auto g = sys.integrate(q, u, 1.0, 32);
    double dev = 0.0;
    for (std::size_t t = 0; t < g.times.size(); ++t)
      for (std::size_t a = 0; a < 2; ++a)
        dev = std::max(dev, std::abs(g.positions[t][s.L[a]] - (q[s.L[a]] + g.times[t] * u[a])));
    o.require(dev <= kStraightLineTol, "flat geodesic deviates from a straight line");
    note << "straight-line dev " << dev;
  }
  {
    const auto s = fx::twisted();
    const GeodesicSystem sys(s.chart, bott_connection(s), s.L);
    const std::vector<double> q{0, 0, 0, 0}, u{0.5, 1.0};
    const auto ref = sys.integrate(q, u, 1.0, 2048).end();
    std::vector<double> errs;
    for (std::size_t n : {8u, 16u, 32u, 64u}) errs.push_back(std::abs(sys.integrate(q, u, 1.0, n).end()[3] - ref[3]));
    double worst = 0.0;
    for (std::size_t i = 1; i < errs.size(); ++i) {
      const double slope = std::log2(errs[i - 1] / errs[i]);
      o.require(std::abs(slope - kSlopeTarget) <= kSlopeBand, "step-halving slope outside 4 +- 0.2");
      worst = std::max(worst, std::abs(slope - kSlopeTarget));
    }
    note << "; slope within " << worst << " of 4";
  }
  {
    const auto s = fx::twisted_closed();
    const auto& c = s.chart;
    const GeodesicSystem sys(c, bott_connection(s), s.L);
    const auto path = sys.integrate({0.1, 0.2, 0.3, 0.4}, {0.5, -0.25}, 1.0, 64);
    const auto j = jacobi_transport(sys, path, {0.3, -0.2}, {1.0, 0.5});
    o.require(j.affine_residual < kJacobiTol, "Jacobi components not affine");
    const std::vector<Expr> F{c.var(0), c.var(1), c.var(2), c.parse("p2-p1^2/2")};
    const double aff =
        exp_affinity_residual(sys, {0.1, 0.2, 0.3, 0.4}, {{1, 0.5}, {-0.5, 0.25}, {0.2, -0.7}}, F);
    o.require(aff < kExpAffineTol, "exp not affine in autoparallel coordinates");
    note << "; jacobi " << j.affine_residual << "; exp affinity " << aff;
  }
  if (o.ok) o.note = note.str();
  return o;
}

Outcome criterion9() {
  Outcome o;
  const auto sc = corpus_file("weinstein_flat_twisted");
  const auto& s = sc.structure;
  const auto& c = s.chart;
  StructureMapOptions opts;
  opts.samples = sc.samples();
  opts.expected_base_form = &*sc.expected_base_form;
  opts.second_embedding = &sc.embeddings.at("graph_dF");
  const auto r = weinstein_verify(s, sc.embeddings.at("zero"), opts);
  o.require(r.passed() && r.exact, "pipeline on zero section failed");
  o.require(r.theta && r.theta->component({0}) == c.parse("p1") && r.theta->component({1}) == c.parse("p2") &&
                r.theta->component({2}).is_zero() && r.theta->component({3}).is_zero(),
            "theta is not p_i dq^i");
  o.require(r.base_form && lift_form(*r.base_form, r.base_form->form) == *sc.expected_base_form,
            "base form is not 3 dq1^dq2");
  o.require(r.theta_difference.has_value(), "no descended theta difference");
  if (r.theta_difference) {
    const auto& q = r.theta_difference->quotient;
    const auto& td = r.theta_difference->form;
    const bool plus = td.component({0}) == q.parse("2*q1*q2") && td.component({1}) == q.parse("q1^2");
    const bool minus = td.component({0}) == q.parse("-2*q1*q2") && td.component({1}) == q.parse("-q1^2");
    o.require(plus || minus, "theta difference is not +-dF");
    o.require(r.find("embedding-invariance") && r.find("embedding-invariance")->passed(),
              "base forms of the two embeddings differ by more than d theta_Q");
  }
  // Lagrangian case
  const auto lag = fx::flat_twisted("0");
  const DifferentialForm zero(4, 2);
  StructureMapOptions lo;
  lo.samples = lag.chart.sample_points(4, 1);
  lo.expected_base_form = &zero;
  const auto rl = weinstein_verify(lag, zero_section(), lo);
  o.require(rl.passed() && rl.base_form && rl.base_form->form.is_zero(), "Lagrangian zero section: omega_Q != 0");
  if (o.ok && r.theta_difference)
    o.note = "omega_Q = 3 dq1^dq2; c = 0 gives 0; theta_Q witness " +
             r.theta_difference->form.to_string(r.theta_difference->quotient.names());
  return o;
}

Outcome criterion10() {
  Outcome o;
  for (const char* name : {"poly_twisted", "multi_twisted"}) {
    const auto sc = corpus_file(name);
    const auto& s = sc.structure;
    StructureMapOptions opts;
    opts.samples = sc.samples();
    opts.expected_base_form = &*sc.expected_base_form;
    const auto r = structure_map_verify(s, sc.embeddings.at("zero"), opts);
    const std::string tag = std::string(name) + ": ";
    o.require(r.passed() && r.exact, tag + "pipeline failed");
    o.require(r.base_form && lift_form(*r.base_form, r.base_form->form) == *sc.expected_base_form,
              tag + "recovered base form differs from the twist");
    o.require(r.find("base-form-closed") && r.find("base-form-closed")->passed(), tag + "closedness not verified");
    if (s.kind == Kind::Multi)
      o.require(r.find("base-form-horizontality") && r.find("base-form-horizontality")->passed(),
                tag + "horizontality degree not verified");
  }
  if (o.ok) o.note = "poly twist dy1^dy2 (x) (5,-1) and multi twist 2 dx1^dx2^dy recovered exactly";
  return o;
}

Outcome criterion11() {
  Outcome o;
  const auto s = fx::canonical();
  const auto& c = s.chart;
  const auto L = s.distribution();
  auto code = [&](const DifferentialForm& a, std::string& msg) {
    try {
      descend_form(a, c, L);
    } catch (const Error& e) {
      msg = e.what();
      return e.code();
    }
    return ErrorCode::NotApplicable;
  };
  const auto good = DifferentialForm::term(4, {0, 1}, c.parse("q1^2*q2+q2"));
  o.require(check_basic(good, c, L).passed(), "basic form rejected");
  const auto d = descend_form(good, c, L);
  o.require(d.quotient.dim() == 2 && d.form.component({0, 1}) == d.quotient.parse("q1^2*q2+q2"),
            "descended coefficients wrong");
  std::string msg;
  o.require(code(DifferentialForm::term(4, {0, 1}, c.parse("p1*q2")), msg) == ErrorCode::NotLeafConstant &&
                msg.find("(q1,q2)") != std::string::npos && msg.find("at (") != std::string::npos,
            "p-dependent form not rejected with index/point witness");
  o.require(code(DifferentialForm::term(4, {1, 3}, c.parse("1")), msg) == ErrorCode::NotHorizontal &&
                msg.find("d/dp2") != std::string::npos && msg.find("at (") != std::string::npos,
            "non-horizontal form not rejected with index/point witness");
  Rng rng(1111);
  const IndexList all{0, 1, 2, 3};
  for (int t = 0; t < 20; ++t) {
    const auto a = random_form(4, 1 + t % 3, all, 2, rng);
    VectorField x(4);
    for (std::size_t i = 0; i < 4; ++i) x[i] = random_polynomial(4, all, 2, rng);
    o.require(lie_derivative(x, a) == cartan_lie_derivative(x, a, all), "Cartan formula fails");
    o.require(exterior_derivative(exterior_derivative(a)).is_zero(), "d o d != 0");
  }
  if (o.ok) o.note = "descent accept/reject with witnesses; Cartan and d o d exact on 20 random forms";
  return o;
}

int run_cli(const std::string& scenario, const std::string& report) {
  const std::string cmd = "\"" + CLI + "\" all \"" + scenario + "\" --report \"" + report + "\" > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return rc == -1 ? -1 : WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion12() {
  Outcome o;
  const fs::path work = fs::temp_directory_path() / ("lagconn_accept_" + std::to_string(::getpid()));
  fs::create_directories(work);
  std::size_t n = 0;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(CORPUS)) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    const std::string a = (work / (f.stem().string() + ".a.json")).string();
    const std::string b = (work / (f.stem().string() + ".b.json")).string();
    const int ra = run_cli(f.string(), a), rb = run_cli(f.string(), b);
    o.require(ra == 0 && rb == 0, f.stem().string() + ": exit code " + std::to_string(ra) + "/" + std::to_string(rb));
    const std::string sa = slurp(a);
    o.require(!sa.empty() && sa == slurp(b), f.stem().string() + ": reports differ between runs");
    ++n;
  }
  fs::remove_all(work);
  if (o.ok) o.note = std::to_string(n) + " scenarios, byte-identical reports, exit 0";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, criterion1}, {2, criterion2}, {3, criterion3},   {4, criterion4},   {5, criterion5},   {6, criterion6},
      {7, criterion7}, {8, criterion8}, {9, criterion9}, {10, criterion10}, {11, criterion11}, {12, criterion12}};
  int failed = 0;
  for (const auto& [id, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.ok = false;
      o.note = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.ok) ++failed;
    std::printf("criterion %2d: %s  (%.2fs)  %s\n", id, o.ok ? "PASS" : "FAIL", secs, o.note.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
