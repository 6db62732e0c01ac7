#include "lagconn/error.hpp"
#include "lagconn/scenario.hpp"
#include "lagconn/suite.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace lagconn;
using nlohmann::json;

namespace {
const std::string CORPUS = LAGCONN_CORPUS_DIR;

json corpus_json(const std::string& name) {
  std::ifstream in(CORPUS + "/" + name + ".json");
  return json::parse(in);
}

ErrorCode parse_code(const json& j, std::string* msg = nullptr) {
  try {
    parse_scenario(j, "test.json");
  } catch (const Error& e) {
    if (msg) *msg = e.what();
    return e.code();
  }
  return ErrorCode::NotApplicable;
}
}  // namespace

TEST_CASE("bundled corpus loads") {
  for (const auto& entry : std::filesystem::directory_iterator(CORPUS)) {
    CAPTURE(entry.path().string());
    const Scenario s = load_scenario(entry.path().string());
    CHECK(s.embeddings.size() >= 2);
    CHECK_FALSE(s.connections.empty());
  }
  const Scenario c = load_scenario(CORPUS + "/canonical_sym_r4.json");
  CHECK(c.id == "canonical_sym_r4");
  CHECK(c.structure.kind == Kind::Sym);
  CHECK(c.chart().dim() == 4);
}

TEST_CASE("twisted scenario keeps its domain through a round trip") {
  const Scenario s = load_scenario(CORPUS + "/twisted_4d.json");
  REQUIRE(s.chart().domain()[2].hi.has_value());
  CHECK(*s.chart().domain()[2].hi == Rational(1));
  CHECK_FALSE(s.chart().domain()[2].lo.has_value());
  const Scenario r = parse_scenario(scenario_to_json(s), "roundtrip.json");
  CHECK(scenario_to_json(r) == scenario_to_json(s));
  CHECK(r.chart().domain()[2].hi == s.chart().domain()[2].hi);
  CHECK(r.structure.form == s.structure.form);
  CHECK(r.connections.at("bott_reference") == s.connections.at("bott_reference"));
}

TEST_CASE("every corpus file round-trips") {
  for (const auto& entry : std::filesystem::directory_iterator(CORPUS)) {
    const Scenario s = load_scenario(entry.path().string());
    CHECK(scenario_to_json(parse_scenario(scenario_to_json(s))) == scenario_to_json(s));
  }
}

TEST_CASE("schema errors name the field") {
  json j = corpus_json("canonical_sym_r4");
  j["structure"].erase("L");
  std::string msg;
  CHECK(parse_code(j, &msg) == ErrorCode::SchemaError);
  CHECK(msg.find("structure.L") != std::string::npos);
  CHECK(msg.find("test.json") != std::string::npos);

  json k = corpus_json("canonical_sym_r4");
  k["structure"]["kind"] = "QUAD";
  CHECK(parse_code(k) == ErrorCode::SchemaError);

  json w = corpus_json("canonical_sym_r4");
  w["weights"] = json::array({"1"});
  CHECK(parse_code(w) == ErrorCode::SchemaError);

  json b = corpus_json("canonical_sym_r4");
  b["embeddings"]["zero"]["r"] = "0";
  CHECK(parse_code(b) == ErrorCode::SchemaError);
}

TEST_CASE("bad expressions are expression errors") {
  json j = corpus_json("canonical_sym_r4");
  j["structure"]["form"][0]["coeffs"] = "1+";
  CHECK(parse_code(j) == ErrorCode::ExprError);
  json k = corpus_json("canonical_sym_r4");
  k["connections"]["sheared"][0]["expr"] = "w";
  CHECK(parse_code(k) == ErrorCode::ExprError);
}

TEST_CASE("missing file is a schema error") {
  try {
    load_scenario(CORPUS + "/does_not_exist.json");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SchemaError);
  }
}

TEST_CASE("validate suite on the canonical scenario is all exact") {
  const Report r = run_suite(load_scenario(CORPUS + "/canonical_sym_r4.json"), Suite::Validate);
  CHECK(r.passed());
  for (const auto& rec : r.records) CHECK(rec.status == Status::ExactPass);
}

TEST_CASE("reports are deterministic and independent of parallelism") {
  const Scenario s = load_scenario(CORPUS + "/twisted_4d_closed.json");
  SuiteOptions serial, parallel;
  parallel.parallel = true;
  const std::string a = run_suite(s, Suite::All, serial).dump();
  CHECK(a == run_suite(s, Suite::All, serial).dump());
  CHECK(a == run_suite(s, Suite::All, parallel).dump());
}

TEST_CASE("suite applicability") {
  const Scenario t = load_scenario(CORPUS + "/twisted_4d.json");
  CHECK_FALSE(suite_applicable(t, Suite::Symplectize));
  CHECK_FALSE(suite_applicable(t, Suite::Weinstein));
  CHECK_THROWS_AS(run_suite(t, Suite::Classify), Error);
  const Report all = run_suite(t, Suite::All);
  CHECK(all.passed());
  bool saw_torsion_identity = false;
  for (const auto& rec : all.records)
    if (rec.name == "bott/torsion-musical-identity") {
      saw_torsion_identity = true;
      CHECK(rec.status == Status::ExactPass);
    }
  CHECK(saw_torsion_identity);
}

TEST_CASE("declared failures must actually fail") {
  Scenario s = load_scenario(CORPUS + "/canonical_sym_r4.json");
  s.expected_failures = {"validate/closed"};
  const Report r = run_suite(s, Suite::Validate);
  CHECK_FALSE(r.passed());
}

TEST_CASE("option overrides are reflected in the report") {
  SuiteOptions o;
  o.seed = 42;
  o.samples = 3;
  o.tol = 1e-6;
  const Report r = run_suite(load_scenario(CORPUS + "/canonical_sym_r4.json"), Suite::Validate, o);
  CHECK(r.seed == 42);
  CHECK(r.samples == 3);
  CHECK(r.tol == doctest::Approx(1e-6));
  CHECK(r.to_json().contains("records"));
  CHECK_FALSE(r.to_json().contains("timings_ms"));
}

TEST_CASE("form JSON round trip") {
  const Scenario s = load_scenario(CORPUS + "/poly_twisted.json");
  const auto j = form_to_json(s.structure.form, s.chart());
  CHECK(form_from_json(j, s.chart(), s.structure.form.degree(), s.structure.form.value_rank(), "f") ==
        s.structure.form);
}
