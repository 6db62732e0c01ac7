#include "lagconn/suite.hpp"

#include "lagconn/connection.hpp"
#include "lagconn/error.hpp"
#include "lagconn/geodesic.hpp"
#include "lagconn/kernels.hpp"
#include "lagconn/random.hpp"
#include "lagconn/structure_maps.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>

namespace lagconn {

using nlohmann::json;

std::string to_string(Suite s) {
  switch (s) {
    case Suite::Validate: return "validate";
    case Suite::Bott: return "bott";
    case Suite::Symplectize: return "symplectize";
    case Suite::Classify: return "classify";
    case Suite::Geodesic: return "geodesic";
    case Suite::Weinstein: return "weinstein";
    case Suite::All: return "all";
  }
  return "all";
}

std::optional<Suite> parse_suite(const std::string& name) {
  for (Suite s : {Suite::Validate, Suite::Bott, Suite::Symplectize, Suite::Classify, Suite::Geodesic,
                  Suite::Weinstein, Suite::All})
    if (to_string(s) == name) return s;
  return std::nullopt;
}

bool Report::passed() const {
  return std::all_of(records.begin(), records.end(), [](const CheckRecord& r) { return r.passed(); });
}

json Report::to_json() const {
  json recs = json::array();
  for (const auto& r : records) {
    json j = {{"check", r.name}, {"anchor", r.anchor}, {"status", to_string(r.status)}};
    if (r.status == Status::NumericPass || (r.status == Status::Fail && r.residual != 0.0)) j["residual"] = r.residual;
    if (!r.witness.empty()) j["witness"] = r.witness;
    if (!r.detail.empty()) j["detail"] = r.detail;
    recs.push_back(std::move(j));
  }
  json out = {{"scenario", scenario}, {"suite", suite},    {"seed", seed},
              {"samples", samples},   {"tol", tol},        {"passed", passed()},
              {"records", recs}};
  if (!timings_ms.empty()) {
    json t = json::object();
    for (const auto& [name, ms] : timings_ms) t[name] = ms;
    out["timings_ms"] = t;
  }
  return out;
}

std::string Report::dump() const { return to_json().dump(2) + "\n"; }

namespace {

using Records = std::vector<CheckRecord>;

bool form_closed(const GeometricStructure& s) { return s.differential(s.form).is_zero(); }

std::string tensor_witness(const CovariantTensor& t, const ChartSpec& chart) {
  auto nz = t.first_nonzero();
  if (!nz) return {};
  std::string w = "entry " + format_tuple(nz->first, chart.names());
  if (t.value_rank() > 1) w += "^" + (nz->second < chart.dim() ? chart.name(nz->second) : std::to_string(nz->second));
  return w + " = " + chart.print(t.at(nz->first, nz->second));
}

CheckRecord zero_table(std::string name, std::string anchor, const CovariantTensor& t, const ChartSpec& chart) {
  return exact_check(std::move(name), std::move(anchor), t.is_zero(), tensor_witness(t, chart));
}

std::string connection_summary(const Connection& c, const ChartSpec& chart) {
  std::string out;
  const std::size_t n = c.dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        const Expr& g = c.gamma(i, j, k);
        if (g.is_zero()) continue;
        if (!out.empty()) out += "; ";
        out += "G^" + chart.name(i) + "_" + chart.name(j) + chart.name(k) + " = " + chart.print(g);
      }
  return out.empty() ? "all Christoffel symbols vanish" : out;
}

std::string class_witness(const ClassReport& r, const ChartSpec& chart) {
  for (const auto& c : r.checks) {
    if (c.passed) continue;
    std::string w = c.name;
    if (c.witness) w += " fails at " + format_tuple(c.witness->first, chart.names());
    return w;
  }
  return {};
}

// Torsion-free, form-compatible, L-preserving and restricting to Bott.
void compatibility_records(Records& out, const std::string& prefix, const Connection& c, const Scenario& sc) {
  const GeometricStructure& s = sc.structure;
  const ChartSpec& chart = sc.chart();
  try {
    out.push_back(zero_table(prefix + "/torsion-free", "torsion", torsion(c), chart));
    out.push_back(zero_table(prefix + "/preserves-form", "form-compatibility", nabla_form(c, s.form), chart));
    auto pres = preserves_distribution(c, s.L);
    out.push_back(exact_check(prefix + "/preserves-L", "L-preservation", pres.preserves,
                              pres.witness ? "G" + format_tuple(*pres.witness, chart.names()) + " is nonzero" : ""));
    if (s.kind == Kind::Multi) {
      IndexList vertical = chart.efiber();
      vertical.insert(vertical.end(), chart.lfiber().begin(), chart.lfiber().end());
      std::sort(vertical.begin(), vertical.end());
      auto pv = preserves_distribution(c, vertical);
      out.push_back(exact_check(prefix + "/preserves-vertical", "vertical-preservation", pv.preserves,
                                pv.witness ? "G" + format_tuple(*pv.witness, chart.names()) + " is nonzero" : ""));
    }
    out.push_back(exact_check(prefix + "/restricts-to-bott", "restriction-to-bott", restricts_to_bott(c, s),
                              "Christoffels on L x L differ from the Bott connection"));
  } catch (const Error& e) {
    out.push_back(exact_check(prefix + "/compatibility", "plumbing", false, e.what()));
  }
}

Records validate_section(const Scenario& sc) {
  Records out;
  for (auto r : validate(sc.structure, sc.samples()).checks) {
    r.name = "validate/" + r.name;
    out.push_back(std::move(r));
  }
  return out;
}

Records bott_section(const Scenario& sc) {
  Records out;
  const GeometricStructure& s = sc.structure;
  const ChartSpec& chart = sc.chart();
  Connection b;
  try {
    b = bott_connection(s);
  } catch (const Error& e) {
    out.push_back(exact_check("bott/construct", "bott-connection", false, e.what()));
    return out;
  }
  CheckRecord rec = exact_check("bott/construct", "bott-connection", true);
  rec.detail = connection_summary(b, chart);
  out.push_back(rec);
  out.push_back(zero_table("bott/defining-identity", "bott-connection", bott_identity_residual(s, b), chart));
  out.push_back(
      zero_table("bott/torsion-musical-identity", "bott-torsion-identity", torsion_musical_defect(s, b), chart));
  if (form_closed(s)) out.push_back(zero_table("bott/torsion-zero", "bott-torsion-vanishes", torsion(b), chart));
  out.push_back(zero_table("bott/curvature-zero", "bott-flatness", curvature(b), chart));
  for (const auto& [name, c] : sc.connections) {
    bool covers = true;
    for (auto i : s.L) covers = covers && c.in_directions(i) && c.in_values(i);
    if (!covers) continue;
    try {
      out.push_back(exact_check("bott/restriction/" + name, "restriction-to-bott", restricts_to_bott(c, s),
                                "Christoffels on L x L differ from the Bott connection"));
    } catch (const Error& e) {
      out.push_back(exact_check("bott/restriction/" + name, "restriction-to-bott", false, e.what()));
    }
  }
  return out;
}

Records symplectize_section(const Scenario& sc) {
  Records out;
  const GeometricStructure& s = sc.structure;
  const ChartSpec& chart = sc.chart();
  Rng rng(sc.seed);
  for (int t = 0; t < 3; ++t) {
    const std::string p = "symplectize/random-" + std::to_string(t);
    try {
      const Connection n0 = random_connection(s.dim(), 2, rng);
      const Connection g = symplectize(n0, s.form);
      out.push_back(zero_table(p + "/torsion-free", "symplectization", torsion(g), chart));
      out.push_back(zero_table(p + "/preserves-form", "symplectization", nabla_form(g, s.form), chart));
      const Connection e = symplectize(n0, s.form, SymplectizeFormula::Expanded);
      out.push_back(exact_check(p + "/expanded-formula-agrees", "symplectization", e == g,
                                "expanded formula differs from the general formula"));
      out.push_back(exact_check(p + "/fixed-point", "symplectization", symplectize(g, s.form) == g,
                                "symplectization moves a torsion-free symplectic connection"));
      out.push_back(exact_check(p + "/torsion-free-formula-agrees", "symplectization",
                                symplectize(g, s.form, SymplectizeFormula::TorsionFree) == g,
                                "torsion-free formula differs on a torsion-free input"));
    } catch (const Error& e) {
      out.push_back(exact_check(p, "symplectization", false, e.what()));
    }
  }
  // L-preserving inputs built on each compatible corpus connection
  for (const auto& [name, c] : sc.connections) {
    if (!c.is_full()) continue;
    if (!torsion(c).is_zero() || !nabla_form(c, s.form).is_zero()) continue;
    const std::string p = "symplectize/L-preserving/" + name;
    try {
      const Connection n0 = add_difference(c, [&] {
        const Connection a = random_L_preserving_perturbation(s, 1, rng);
        CovariantTensor t(s.dim(), 2, s.dim());
        for (std::size_t i = 0; i < s.dim(); ++i)
          for (std::size_t j = 0; j < s.dim(); ++j)
            for (std::size_t k = 0; k < s.dim(); ++k) t.set({j, k}, i, a.gamma(i, j, k));
        return t;
      }());
      compatibility_records(out, p, symplectize(n0, s.form), sc);
    } catch (const Error& e) {
      out.push_back(exact_check(p, "symplectization", false, e.what()));
    }
  }
  return out;
}

Records classify_section(const Scenario& sc) {
  Records out;
  const GeometricStructure& s = sc.structure;
  const ChartSpec& chart = sc.chart();
  for (const auto& [name, c] : sc.connections) compatibility_records(out, "classify/" + name, c, sc);

  std::vector<std::pair<std::string, Connection>> candidates(sc.connections.begin(), sc.connections.end());
  if (!sc.weights.empty()) {
    try {
      std::vector<Connection> parts;
      for (const auto& n : sc.blend) parts.push_back(sc.connections.at(n));
      Connection b = blend(parts, sc.weights);
      compatibility_records(out, "classify/blend", b, sc);
      candidates.emplace_back("blend", std::move(b));
    } catch (const Error& e) {
      out.push_back(exact_check("classify/blend", "partition-of-unity", false, e.what()));
    }
  }
  if (candidates.empty()) return out;
  const auto& [ref_name, ref] = candidates.front();
  for (std::size_t c = 1; c < candidates.size(); ++c) {
    const std::string p = "classify/difference/" + candidates[c].first + "-" + ref_name;
    try {
      const DifferenceTensor d = difference_tensor(candidates[c].second, ref, s);
      const ClassReport r = classify_difference(d.lowered, s);
      out.push_back(exact_check(p, "difference-classification", r.passed(), class_witness(r, chart)));
    } catch (const Error& e) {
      out.push_back(exact_check(p, "difference-classification", false, e.what()));
    }
  }

  // converse direction: an admissible S keeps every property
  try {
    const auto basis = admissible_difference_basis(s);
    Rng rng(sc.seed + 17);
    CovariantTensor S(s.dim(), 2, s.dim());
    for (const auto& b : basis) {
      const Rational w(rng.integer(-3, 3));
      if (w == 0) continue;
      for (std::size_t f = 0; f < S.size(); ++f)
        if (!b.flat(f).is_zero()) S.flat(f) = S.flat(f) + b.flat(f).scaled(w);
    }
    CheckRecord rec = exact_check("classify/admissible-basis", "difference-classification", !basis.empty(),
                                  "no admissible difference tensors");
    rec.detail = std::to_string(basis.size()) + " basis tensors";
    out.push_back(rec);
    const ClassReport r = classify_difference(lower_with_form(S, s), s);
    out.push_back(exact_check("classify/perturbation-classified", "difference-classification", r.passed(),
                              class_witness(r, chart)));
    compatibility_records(out, "classify/perturbed-" + ref_name, add_difference(ref, S), sc);

    // corrupt S with a component along two L slots pointing out of L
    CovariantTensor bad = S;
    const IndexList args = s.arg_indices();
    std::optional<std::size_t> m;
    for (auto a : args)
      if (!s.in_L(a)) {
        m = a;
        break;
      }
    if (m && !s.L.empty()) {
      const std::size_t l = s.L.front();
      bad.set({l, l}, *m, bad.at({l, l}, *m) + chart.constant(1));
      const ClassReport rb = classify_difference(lower_with_form(bad, s), s);
      CheckRecord rr = exact_check("classify/corrupted-difference-rejected", "difference-classification", !rb.passed(),
                                   "corrupted difference tensor passed the classification");
      if (!rb.passed()) rr.detail = class_witness(rb, chart);
      out.push_back(rr);
    }
  } catch (const Error& e) {
    out.push_back(exact_check("classify/admissible-basis", "difference-classification", false, e.what()));
  }
  return out;
}

std::vector<double> seeded_velocity(std::size_t m, std::uint64_t seed, std::size_t salt) {
  Rng rng(seed * 1000003u + salt);
  std::vector<double> u(m);
  for (auto& x : u) x = static_cast<double>(rng.integer(-64, 64)) / 256.0;
  return u;
}

Records geodesic_section(const Scenario& sc, const std::string& csv_path) {
  Records out;
  const GeometricStructure& s = sc.structure;
  const ChartSpec& chart = sc.chart();
  Connection b;
  try {
    b = bott_connection(s);
  } catch (const Error& e) {
    out.push_back(exact_check("geodesic/bott", "plumbing", false, e.what()));
    return out;
  }
  const GeodesicSystem sys(chart, b, s.L);
  const bool torsion_free = torsion(b).is_zero() && curvature(b).is_zero();
  const auto samples = sc.samples();
  const std::size_t count = std::min<std::size_t>(3, samples.size());
  bool exported = false;

  for (const auto& [ename, E] : sc.embeddings) {
    for (std::size_t p = 0; p < count; ++p) {
      const std::string pre = "geodesic/" + ename + "/" + std::to_string(p);
      const auto x = to_double(samples[p]);
      const auto u = seeded_velocity(s.L.size(), sc.seed, p);
      try {
        const auto q = E.foot(chart, s.L, x);
        const ExpResult e = exp_point(sys, q, u);
        if (e.steps == 0) {
          double dev = 0.0;
          const GeodesicPath g = sys.integrate(q, u, 1.0, 8);
          for (std::size_t t = 0; t < g.times.size(); ++t)
            for (std::size_t a = 0; a < s.L.size(); ++a)
              dev = std::max(dev, std::abs(g.positions[t][s.L[a]] - (q[s.L[a]] + g.times[t] * u[a])));
          out.push_back(numeric_check(pre + "/straight-line", "flat-geodesics", dev, 1e-12));
        } else {
          out.push_back(numeric_check(pre + "/step-halving", "geodesic-integration", e.halving_change, 1e-10));
          const auto fine = sys.integrate(q, u, 1.0, e.steps * 10).end();
          double rel = 0.0, scale = 0.0;
          for (std::size_t i = 0; i < fine.size(); ++i) {
            rel = std::max(rel, std::abs(fine[i] - e.point[i]));
            scale = std::max(scale, std::abs(fine[i]));
          }
          out.push_back(numeric_check(pre + "/finer-step-reference", "geodesic-integration",
                                      rel / std::max(scale, 1.0), 1e-8));
        }
        if (torsion_free && p == 0) {
          const GeodesicPath g = sys.integrate(q, u, 1.0, std::max<std::size_t>(e.steps, 32));
          const auto v0 = seeded_velocity(s.L.size(), sc.seed, 100 + p);
          const auto v1 = seeded_velocity(s.L.size(), sc.seed, 200 + p);
          const JacobiField jf = jacobi_transport(sys, g, v0, v1);
          out.push_back(numeric_check(pre + "/jacobi-affine", "jacobi-fields", jf.affine_residual, sc.tol));
        }
        if (!csv_path.empty() && !exported) {
          write_path_csv(csv_path, sys, sys.integrate(q, u, 1.0, std::max<std::size_t>(e.steps, 32)));
          exported = true;
        }
      } catch (const Error& e) {
        if (e.code() == ErrorCode::LeftDomain || e.code() == ErrorCode::OutOfDomain) {
          CheckRecord r = exact_check(pre + "/domain", "geodesic-integration", true);
          r.detail = std::string("domain exit reported: ") + e.what();
          out.push_back(r);
        } else {
          out.push_back(exact_check(pre, "geodesic-integration", false, e.what()));
        }
      }
    }
  }

  if (torsion_free && !sc.embeddings.empty()) {
    std::vector<VectorField> fields;
    for (const auto& [ename, E] : sc.embeddings) {
      try {
        const EulerField ef = solve_euler_field(sys, E);
        const auto d = euler_defect(b, s.L, ef.field);
        const bool ok = std::all_of(d.begin(), d.end(), [](const Expr& x) { return x.is_zero(); });
        out.push_back(exact_check("geodesic/" + ename + "/euler-field", "euler-vector-field", ok, "Euler defect"));
        fields.push_back(ef.field);
      } catch (const Error& e) {
        out.push_back(exact_check("geodesic/" + ename + "/euler-field", "euler-vector-field", false, e.what()));
      }
    }
    for (std::size_t f = 1; f < fields.size(); ++f)
      out.push_back(exact_check("geodesic/euler-difference-constant-" + std::to_string(f), "covariantly-constant",
                                is_covariantly_constant(b, s.L, fields[f] - fields[0]),
                                "difference of Euler fields is not covariantly constant"));
  }
  return out;
}

Records weinstein_section(const Scenario& sc) {
  Records out;
  const GeometricStructure& s = sc.structure;
  const auto samples = sc.samples();
  std::vector<std::string> names;
  for (const auto& [n, _] : sc.embeddings) names.push_back(n);
  for (std::size_t e = 0; e < names.size(); ++e) {
    const Embedding& E = sc.embeddings.at(names[e]);
    StructureMapOptions o;
    o.samples = samples;
    o.tol = sc.tol;
    if (names.size() > 1) o.second_embedding = &sc.embeddings.at(names[(e + 1) % names.size()]);
    if (sc.expected_base_form && names[e] == sc.expected_embedding) o.expected_base_form = &*sc.expected_base_form;
    try {
      const StructureMapReport r = structure_map_verify(s, E, o);
      for (auto rec : r.checks) {
        rec.name = "weinstein/" + names[e] + "/" + rec.name;
        out.push_back(std::move(rec));
      }
      if (r.base_form) {
        CheckRecord rec = exact_check("weinstein/" + names[e] + "/base-form", "base-form-extraction", true);
        rec.detail = r.base_form->form.to_string(r.base_form->quotient.names());
        out.push_back(rec);
      }
    } catch (const Error& err) {
      out.push_back(exact_check("weinstein/" + names[e], "base-form-extraction", false, err.what()));
    }
  }
  return out;
}

void apply_expected_failures(Records& recs, const Scenario& sc) {
  for (auto& r : recs) {
    if (std::find(sc.expected_failures.begin(), sc.expected_failures.end(), r.name) == sc.expected_failures.end())
      continue;
    if (r.passed()) {
      r.status = Status::Fail;
      r.witness = "declared failure did not occur";
    } else {
      r.status = Status::ExactPass;
      r.detail = "fails as declared: " + r.witness;
      r.witness.clear();
    }
  }
}

}  // namespace

bool suite_applicable(const Scenario& sc, Suite suite) {
  const GeometricStructure& s = sc.structure;
  switch (suite) {
    case Suite::Validate:
    case Suite::Bott:
    case Suite::Geodesic:
    case Suite::All: return true;
    case Suite::Symplectize: return s.kind == Kind::Sym && form_closed(s);
    case Suite::Classify: return form_closed(s);
    case Suite::Weinstein: return form_closed(s) && !sc.embeddings.empty();
  }
  return false;
}

Report run_suite(const Scenario& input, Suite suite, const SuiteOptions& opts) {
  Scenario sc = input;
  if (opts.seed) sc.seed = *opts.seed;
  if (opts.samples) sc.sample_count = *opts.samples;
  if (opts.tol) sc.tol = *opts.tol;
  if (!suite_applicable(sc, suite))
    throw Error(ErrorCode::NotApplicable, "suite '" + to_string(suite) + "' does not apply to scenario " + sc.id);

  std::vector<std::pair<std::string, std::function<Records()>>> sections;
  auto want = [&](Suite s) { return suite == s || (suite == Suite::All && suite_applicable(sc, s)); };
  if (want(Suite::Validate)) sections.emplace_back("validate", [&] { return validate_section(sc); });
  if (want(Suite::Bott)) sections.emplace_back("bott", [&] { return bott_section(sc); });
  if (want(Suite::Symplectize)) sections.emplace_back("symplectize", [&] { return symplectize_section(sc); });
  if (want(Suite::Classify)) sections.emplace_back("classify", [&] { return classify_section(sc); });
  if (want(Suite::Geodesic))
    sections.emplace_back("geodesic", [&] { return geodesic_section(sc, opts.csv_path); });
  if (want(Suite::Weinstein)) sections.emplace_back("weinstein", [&] { return weinstein_section(sc); });

  std::vector<Records> results(sections.size());
  std::vector<double> ms(sections.size(), 0.0);
  for_each_index(
      sections.size(),
      [&](std::size_t i) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
          results[i] = sections[i].second();
        } catch (const Error& e) {
          results[i] = {exact_check(sections[i].first, "plumbing", false, e.what())};
        }
        ms[i] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      },
      opts.parallel ? ExecPolicy::Parallel : ExecPolicy::Serial);

  Report rep;
  rep.scenario = sc.id;
  rep.suite = to_string(suite);
  rep.seed = sc.seed;
  rep.samples = sc.sample_count;
  rep.tol = sc.tol;
  for (std::size_t i = 0; i < sections.size(); ++i) {
    rep.records.insert(rep.records.end(), results[i].begin(), results[i].end());
    if (opts.timings) rep.timings_ms.emplace_back(sections[i].first, ms[i]);
  }
  apply_expected_failures(rep.records, sc);
  return rep;
}

}  // namespace lagconn
