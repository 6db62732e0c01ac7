#include "lagconn/error.hpp"
#include "lagconn/scenario.hpp"
#include "lagconn/suite.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

bool input_error(lagconn::ErrorCode c) {
  using lagconn::ErrorCode;
  switch (c) {
    case ErrorCode::SchemaError:
    case ErrorCode::ExprError:
    case ErrorCode::InvalidChart:
    case ErrorCode::InvalidStructure:
    case ErrorCode::SyntaxError:
    case ErrorCode::UnknownIdentifier:
    case ErrorCode::DimensionTooLarge:
    case ErrorCode::NotApplicable:
    case ErrorCode::ChartNotFibered:
    case ErrorCode::OutOfDomain: return true;
    default: return false;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lagconn: connection-theory verification suites"};
  std::string suite_name, path, report_path, csv_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<double> tol;
  bool parallel = false, timings = false, quiet = false;

  app.add_option("suite", suite_name, "validate|bott|symplectize|classify|geodesic|weinstein|all")
      ->required()
      ->check(CLI::IsMember({"validate", "bott", "symplectize", "classify", "geodesic", "weinstein", "all"}));
  app.add_option("scenario", path, "scenario JSON file")->required();
  app.add_option("--report", report_path, "write the JSON report here");
  app.add_option("--seed", seed, "override the sample seed");
  app.add_option("--samples", samples, "override the sample count");
  app.add_option("--tol", tol, "override the numeric tolerance");
  app.add_option("--csv", csv_path, "export one geodesic path as CSV");
  app.add_flag("--parallel", parallel, "run independent sections concurrently");
  app.add_flag("--timings", timings, "include section timings in the report");
  app.add_flag("-q,--quiet", quiet, "print only the summary line");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const lagconn::Scenario sc = lagconn::load_scenario(path);
    lagconn::SuiteOptions opts;
    opts.seed = seed;
    opts.samples = samples;
    opts.tol = tol;
    opts.parallel = parallel;
    opts.timings = timings;
    opts.csv_path = csv_path;
    const lagconn::Report rep = lagconn::run_suite(sc, *lagconn::parse_suite(suite_name), opts);

    std::size_t failed = 0;
    for (const auto& r : rep.records) {
      if (!r.passed()) ++failed;
      if (quiet && r.passed()) continue;
      std::cout << lagconn::to_string(r.status) << "  " << r.name;
      if (r.status == lagconn::Status::NumericPass) std::cout << "  residual=" << r.residual;
      if (!r.witness.empty()) std::cout << "  witness: " << r.witness;
      std::cout << "\n";
    }
    std::cout << rep.scenario << " " << rep.suite << ": " << rep.records.size() - failed << "/"
              << rep.records.size() << " passed\n";

    if (!report_path.empty()) {
      std::ofstream out(report_path, std::ios::binary);
      if (!out) {
        std::cerr << "cannot write " << report_path << "\n";
        return 2;
      }
      out << rep.dump();
    }
    return rep.passed() ? 0 : 1;
  } catch (const lagconn::Error& e) {
    std::cerr << e.what() << "\n";
    return input_error(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
}
