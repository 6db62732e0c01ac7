#include "lagconn/scenario.hpp"

#include "lagconn/error.hpp"

#include <fstream>
#include <sstream>

namespace lagconn {

using nlohmann::json;

namespace {

struct Ctx {
  std::string source;

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    throw Error(ErrorCode::SchemaError, source + ": " + field + ": " + what);
  }

  const json& need(const json& j, const char* key, const std::string& field) const {
    if (!j.is_object() || !j.contains(key)) fail(field + "." + key, "missing");
    return j.at(key);
  }

  std::size_t size(const json& j, const std::string& field) const {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
      fail(field, "expected a non-negative integer");
    return j.get<std::size_t>();
  }

  std::string str(const json& j, const std::string& field) const {
    if (!j.is_string()) fail(field, "expected a string");
    return j.get<std::string>();
  }

  std::size_t index(const json& j, const ChartSpec* chart, std::size_t dim, const std::string& field) const {
    if (j.is_string() && chart) {
      auto i = chart->index_of(j.get<std::string>());
      if (!i) fail(field, "unknown coordinate '" + j.get<std::string>() + "'");
      return *i;
    }
    const std::size_t i = size(j, field);
    if (i >= dim) fail(field, "index " + std::to_string(i) + " out of range");
    return i;
  }

  IndexList indices(const json& j, const ChartSpec* chart, std::size_t dim, const std::string& field) const {
    if (!j.is_array()) fail(field, "expected an array");
    IndexList out;
    for (std::size_t p = 0; p < j.size(); ++p)
      out.push_back(index(j[p], chart, dim, field + "[" + std::to_string(p) + "]"));
    return out;
  }

  Expr expr(const json& j, const ChartSpec& chart, const std::string& field) const {
    if (j.is_number_integer()) return chart.constant(Rational(j.get<long>()));
    const std::string text = str(j, field);
    try {
      return chart.parse(text);
    } catch (const Error& e) {
      throw Error(ErrorCode::ExprError, source + ": " + field + ": " + e.what());
    }
  }

  std::optional<Rational> bound(const json& j, const std::string& field) const {
    if (j.is_null()) return std::nullopt;
    if (j.is_number_integer()) return Rational(j.get<long>());
    const std::string text = str(j, field);
    try {
      Rational r(text);
      r.canonicalize();
      return r;
    } catch (const std::invalid_argument&) {
      fail(field, "'" + text + "' is not a rational");
    }
  }
};

std::string at(const std::string& field, std::size_t p) { return field + "[" + std::to_string(p) + "]"; }

DifferentialForm parse_form(const Ctx& c, const json& j, const ChartSpec& chart, std::size_t degree,
                            std::size_t value_rank, const std::string& field) {
  if (!j.is_array()) c.fail(field, "expected an array of terms");
  DifferentialForm out(chart.dim(), degree, value_rank);
  for (std::size_t t = 0; t < j.size(); ++t) {
    const std::string f = at(field, t);
    const IndexList idx = c.indices(c.need(j[t], "indices", f), &chart, chart.dim(), f + ".indices");
    if (idx.size() != degree)
      c.fail(f + ".indices", "expected " + std::to_string(degree) + " indices, got " + std::to_string(idx.size()));
    const json& coeffs = c.need(j[t], "coeffs", f);
    std::vector<Expr> vals;
    if (coeffs.is_array()) {
      for (std::size_t a = 0; a < coeffs.size(); ++a) vals.push_back(c.expr(coeffs[a], chart, at(f + ".coeffs", a)));
    } else {
      vals.push_back(c.expr(coeffs, chart, f + ".coeffs"));
    }
    if (vals.size() != value_rank)
      c.fail(f + ".coeffs", "expected " + std::to_string(value_rank) + " coefficients, got " + std::to_string(vals.size()));
    IndexTuple sorted = idx;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) continue;  // repeated index: zero term
    try {
      for (std::size_t a = 0; a < vals.size(); ++a) out.add(idx, vals[a], a);
    } catch (const Error& e) {
      c.fail(f, e.what());
    }
  }
  return out;
}

Connection parse_connection(const Ctx& c, const json& j, const ChartSpec& chart, const std::string& field) {
  const std::size_t n = chart.dim();
  const json* entries = &j;
  Connection out(n);
  if (j.is_object()) {
    const IndexList d = c.indices(c.need(j, "directions", field), &chart, n, field + ".directions");
    const IndexList v = c.indices(c.need(j, "values", field), &chart, n, field + ".values");
    out = Connection(n, d, v);
    entries = &c.need(j, "entries", field);
  }
  if (!entries->is_array()) c.fail(field, "expected an array of Christoffel entries");
  for (std::size_t e = 0; e < entries->size(); ++e) {
    const json& x = (*entries)[e];
    const std::string f = at(field, e);
    const std::size_t i = c.index(c.need(x, "i", f), &chart, n, f + ".i");
    const std::size_t jj = c.index(c.need(x, "j", f), &chart, n, f + ".j");
    const std::size_t k = c.index(c.need(x, "k", f), &chart, n, f + ".k");
    const Expr v = c.expr(c.need(x, "expr", f), chart, f + ".expr");
    try {
      out.add_gamma(i, jj, k, v);
    } catch (const Error& err) {
      c.fail(f, err.what());
    }
  }
  return out;
}

Kind parse_kind(const Ctx& c, const json& j, const std::string& field) {
  const std::string k = c.str(j, field);
  if (k == "SYM") return Kind::Sym;
  if (k == "POLY") return Kind::Poly;
  if (k == "MULTI") return Kind::Multi;
  c.fail(field, "unknown kind '" + k + "'");
}

}  // namespace

std::vector<Point> Scenario::samples() const {
  std::vector<Point> out = chart().sample_points(sample_count, seed);
  out.insert(out.end(), extra_points.begin(), extra_points.end());
  return out;
}

DifferentialForm form_from_json(const json& j, const ChartSpec& chart, std::size_t degree, std::size_t value_rank,
                                const std::string& field) {
  return parse_form(Ctx{"<form>"}, j, chart, degree, value_rank, field);
}

Scenario parse_scenario(const json& j, const std::string& source) {
  const Ctx c{source};
  if (!j.is_object()) c.fail("<root>", "expected an object");
  Scenario s;
  {
    auto slash = source.find_last_of('/');
    std::string stem = slash == std::string::npos ? source : source.substr(slash + 1);
    if (auto dot = stem.rfind(".json"); dot != std::string::npos) stem = stem.substr(0, dot);
    s.id = stem;
  }
  if (j.contains("id")) s.id = c.str(j["id"], "id");

  // chart
  const json& cj = c.need(j, "chart", "<root>");
  const std::size_t dim = c.size(c.need(cj, "dim", "chart"), "chart.dim");
  const json& nj = c.need(cj, "names", "chart");
  if (!nj.is_array() || nj.size() != dim) c.fail("chart.names", "expected " + std::to_string(dim) + " names");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < dim; ++i) names.push_back(c.str(nj[i], at("chart.names", i)));
  const json& bj = c.need(cj, "blocks", "chart");
  auto block = [&](const char* key) {
    if (!bj.contains(key)) return IndexList{};
    const json& b = bj[key];
    IndexList out;
    if (!b.is_array()) c.fail(std::string("chart.blocks.") + key, "expected an array");
    for (std::size_t p = 0; p < b.size(); ++p) {
      const std::string f = at(std::string("chart.blocks.") + key, p);
      if (b[p].is_string()) {
        auto it = std::find(names.begin(), names.end(), b[p].get<std::string>());
        if (it == names.end()) c.fail(f, "unknown coordinate");
        out.push_back(static_cast<std::size_t>(it - names.begin()));
      } else {
        out.push_back(c.index(b[p], nullptr, dim, f));
      }
    }
    return out;
  };
  if (!bj.contains("base")) c.fail("chart.blocks.base", "missing");
  const IndexList base = block("base"), efiber = block("efiber"), lfiber = block("lfiber");
  std::vector<Interval> domain(dim);
  if (cj.contains("domain") && !cj["domain"].is_null()) {
    const json& dj = cj["domain"];
    if (!dj.is_array() || dj.size() != dim) c.fail("chart.domain", "expected one entry per coordinate");
    for (std::size_t i = 0; i < dim; ++i) {
      if (dj[i].is_null()) continue;
      const std::string f = at("chart.domain", i);
      if (!dj[i].is_array() || dj[i].size() != 2) c.fail(f, "expected [lo, hi]");
      domain[i].lo = c.bound(dj[i][0], f + "[0]");
      domain[i].hi = c.bound(dj[i][1], f + "[1]");
    }
  }
  ChartSpec chart;
  try {
    chart = ChartSpec(names, base, efiber, lfiber, domain);
  } catch (const Error& e) {
    c.fail("chart", e.what());
  }

  // structure
  const json& sj = c.need(j, "structure", "<root>");
  GeometricStructure& g = s.structure;
  g.chart = chart;
  g.kind = parse_kind(c, c.need(sj, "kind", "structure"), "structure.kind");
  if (sj.contains("k")) g.k = c.size(sj["k"], "structure.k");
  if (sj.contains("r")) g.r = c.size(sj["r"], "structure.r");
  if (sj.contains("nhat")) g.nhat = c.size(sj["nhat"], "structure.nhat");
  if (g.kind == Kind::Sym) g.k = 1;
  if (g.kind != Kind::Poly) g.nhat = 1;
  g.L = c.indices(c.need(sj, "L", "structure"), &chart, dim, "structure.L");
  const std::size_t degree = g.kind == Kind::Sym ? 2 : g.k + 1;
  g.form = parse_form(c, c.need(sj, "form", "structure"), chart, degree, g.nhat, "structure.form");
  try {
    g.check_invariants();
  } catch (const Error& e) {
    c.fail("structure", e.what());
  }

  // optional parts
  if (j.contains("connections")) {
    const json& cs = j["connections"];
    if (!cs.is_object()) c.fail("connections", "expected an object");
    for (const auto& [name, v] : cs.items()) s.connections[name] = parse_connection(c, v, chart, "connections." + name);
  }
  if (j.contains("embeddings")) {
    const json& es = j["embeddings"];
    if (!es.is_object()) c.fail("embeddings", "expected an object");
    for (const auto& [name, v] : es.items()) {
      const std::string f = "embeddings." + name;
      if (!v.is_object()) c.fail(f, "expected an object");
      Embedding e{name, {}};
      for (const auto& [coord, ex] : v.items()) {
        auto i = chart.index_of(coord);
        if (!i) c.fail(f + "." + coord, "unknown coordinate");
        e.section[*i] = c.expr(ex, chart, f + "." + coord);
      }
      try {
        e.check(chart, g.L);
      } catch (const Error& err) {
        c.fail(f, err.what());
      }
      s.embeddings[name] = std::move(e);
    }
  }
  if (j.contains("weights")) {
    const json& w = j["weights"];
    if (!w.is_array()) c.fail("weights", "expected an array");
    for (std::size_t p = 0; p < w.size(); ++p) s.weights.push_back(c.expr(w[p], chart, at("weights", p)));
  }
  if (j.contains("blend")) {
    const json& b = j["blend"];
    if (!b.is_array()) c.fail("blend", "expected an array of connection names");
    for (std::size_t p = 0; p < b.size(); ++p) {
      std::string name = c.str(b[p], at("blend", p));
      if (!s.connections.count(name)) c.fail(at("blend", p), "unknown connection '" + name + "'");
      s.blend.push_back(name);
    }
  } else if (!s.weights.empty()) {
    for (const auto& [name, _] : s.connections) s.blend.push_back(name);
  }
  if (!s.weights.empty() && s.weights.size() != s.blend.size())
    c.fail("weights", "expected one weight per blended connection");
  if (j.contains("expected_base_form")) {
    const std::size_t bdeg = g.kind == Kind::Sym ? 2 : g.k + 1;
    s.expected_base_form = parse_form(c, j["expected_base_form"], chart, bdeg, g.nhat, "expected_base_form");
  }
  if (j.contains("expected_embedding")) {
    s.expected_embedding = c.str(j["expected_embedding"], "expected_embedding");
    if (!s.embeddings.count(s.expected_embedding)) c.fail("expected_embedding", "unknown embedding");
  } else if (!s.embeddings.empty()) {
    s.expected_embedding = s.embeddings.begin()->first;
  }
  if (j.contains("expected_failures")) {
    const json& ef = j["expected_failures"];
    if (!ef.is_array()) c.fail("expected_failures", "expected an array of check names");
    for (std::size_t p = 0; p < ef.size(); ++p) s.expected_failures.push_back(c.str(ef[p], at("expected_failures", p)));
  }
  if (j.contains("samples")) {
    const json& sm = j["samples"];
    if (sm.contains("count")) s.sample_count = c.size(sm["count"], "samples.count");
    if (sm.contains("seed")) s.seed = c.size(sm["seed"], "samples.seed");
    if (sm.contains("points")) {
      const json& pts = sm["points"];
      if (!pts.is_array()) c.fail("samples.points", "expected an array");
      for (std::size_t p = 0; p < pts.size(); ++p) {
        const std::string f = at("samples.points", p);
        if (!pts[p].is_array() || pts[p].size() != dim) c.fail(f, "expected " + std::to_string(dim) + " coordinates");
        Point pt;
        for (std::size_t i = 0; i < dim; ++i) {
          auto b = c.bound(pts[p][i], at(f, i));
          if (!b) c.fail(at(f, i), "null coordinate");
          pt.push_back(*b);
        }
        s.extra_points.push_back(std::move(pt));
      }
    }
  }
  if (j.contains("tol")) {
    if (!j["tol"].is_number()) c.fail("tol", "expected a number");
    s.tol = j["tol"].get<double>();
    if (!(s.tol > 0)) c.fail("tol", "must be positive");
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::SchemaError, path + ": cannot open file");
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, path + ": <root>: " + e.what());
  }
  return parse_scenario(j, path);
}

json form_to_json(const DifferentialForm& f, const ChartSpec& chart) {
  json out = json::array();
  for (const auto& [key, vals] : f.coeffs()) {
    json coeffs = json::array();
    for (const auto& v : vals) coeffs.push_back(chart.print(v));
    out.push_back({{"indices", key}, {"coeffs", coeffs}});
  }
  return out;
}

json scenario_to_json(const Scenario& s) {
  const ChartSpec& chart = s.chart();
  json j;
  j["id"] = s.id;
  json domain = json::array();
  bool any_bound = false;
  for (const auto& iv : chart.domain()) {
    if (!iv.lo && !iv.hi) {
      domain.push_back(nullptr);
      continue;
    }
    any_bound = true;
    domain.push_back({iv.lo ? json(iv.lo->get_str()) : json(nullptr), iv.hi ? json(iv.hi->get_str()) : json(nullptr)});
  }
  j["chart"] = {{"dim", chart.dim()},
                {"names", chart.names()},
                {"blocks", {{"base", chart.base()}, {"efiber", chart.efiber()}, {"lfiber", chart.lfiber()}}},
                {"domain", any_bound ? domain : json(nullptr)}};
  const GeometricStructure& g = s.structure;
  j["structure"] = {{"kind", to_string(g.kind)}, {"k", g.k},      {"r", g.r},
                    {"nhat", g.nhat},            {"L", g.L},      {"form", form_to_json(g.form, chart)}};
  if (!s.connections.empty()) {
    json cs = json::object();
    for (const auto& [name, nabla] : s.connections) {
      json entries = json::array();
      for (std::size_t i = 0; i < chart.dim(); ++i)
        for (std::size_t jj = 0; jj < chart.dim(); ++jj)
          for (std::size_t k = 0; k < chart.dim(); ++k)
            if (!nabla.gamma(i, jj, k).is_zero())
              entries.push_back({{"i", i}, {"j", jj}, {"k", k}, {"expr", chart.print(nabla.gamma(i, jj, k))}});
      if (nabla.is_full()) cs[name] = entries;
      else cs[name] = {{"directions", nabla.directions()}, {"values", nabla.values()}, {"entries", entries}};
    }
    j["connections"] = cs;
  }
  if (!s.embeddings.empty()) {
    json es = json::object();
    for (const auto& [name, e] : s.embeddings) {
      json sec = json::object();
      for (const auto& [i, v] : e.section) sec[chart.name(i)] = chart.print(v);
      es[name] = sec;
    }
    j["embeddings"] = es;
  }
  if (!s.weights.empty()) {
    json w = json::array();
    for (const auto& e : s.weights) w.push_back(chart.print(e));
    j["weights"] = w;
    j["blend"] = s.blend;
  }
  if (s.expected_base_form) {
    j["expected_base_form"] = form_to_json(*s.expected_base_form, chart);
    j["expected_embedding"] = s.expected_embedding;
  }
  if (!s.expected_failures.empty()) j["expected_failures"] = s.expected_failures;
  json samples = {{"count", s.sample_count}, {"seed", s.seed}};
  if (!s.extra_points.empty()) {
    json pts = json::array();
    for (const auto& p : s.extra_points) {
      json row = json::array();
      for (const auto& x : p) row.push_back(x.get_str());
      pts.push_back(row);
    }
    samples["points"] = pts;
  }
  j["samples"] = samples;
  j["tol"] = s.tol;
  return j;
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::SchemaError, path + ": cannot write file");
  f << scenario_to_json(s).dump(2) << '\n';
}

}  // namespace lagconn
