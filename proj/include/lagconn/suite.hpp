#pragma once

#include "lagconn/report.hpp"
#include "lagconn/scenario.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lagconn {

enum class Suite { Validate, Bott, Symplectize, Classify, Geodesic, Weinstein, All };

std::string to_string(Suite s);
std::optional<Suite> parse_suite(const std::string& name);

struct SuiteOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<double> tol;
  bool parallel = false;  // run independent sections concurrently
  bool timings = false;   // include wall-clock timings (breaks byte-identical reports)
  std::string csv_path;   // geodesic path export
};

struct Report {
  std::string scenario;
  std::string suite;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  double tol = 0.0;
  std::vector<CheckRecord> records;
  std::vector<std::pair<std::string, double>> timings_ms;

  bool passed() const;
  nlohmann::json to_json() const;
  /// Pretty-printed JSON with a trailing newline.
  std::string dump() const;
};

/// True when the suite makes sense for the scenario (e.g. SYMPLECTIZE needs a
/// closed symplectic form).
bool suite_applicable(const Scenario& sc, Suite suite);

/// NotApplicable when an explicitly requested suite does not fit the scenario.
/// Check failures never throw; they become fail records.
Report run_suite(const Scenario& sc, Suite suite, const SuiteOptions& opts = {});

}  // namespace lagconn
