#pragma once

#include "lagconn/geodesic.hpp"
#include "lagconn/structure.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lagconn {

struct Scenario {
  std::string id;
  GeometricStructure structure;
  std::map<std::string, Connection> connections;
  std::map<std::string, Embedding> embeddings;
  std::vector<Expr> weights;
  std::vector<std::string> blend;  // connections combined with `weights` (all, in name order, by default)
  std::optional<DifferentialForm> expected_base_form;
  std::string expected_embedding;  // embedding the expected base form belongs to
  std::vector<std::string> expected_failures;
  std::size_t sample_count = 8;
  std::uint64_t seed = 1;
  std::vector<Point> extra_points;
  double tol = 1e-8;

  const ChartSpec& chart() const { return structure.chart; }
  /// Seeded interior samples followed by the explicit points.
  std::vector<Point> samples() const;
};

/// SchemaError(path, field) for malformed input; ExprError for expressions
/// that do not parse against the chart.
Scenario parse_scenario(const nlohmann::json& j, const std::string& source = "<memory>");
Scenario load_scenario(const std::string& path);

nlohmann::json scenario_to_json(const Scenario& s);
void save_scenario(const Scenario& s, const std::string& path);

nlohmann::json form_to_json(const DifferentialForm& f, const ChartSpec& chart);
DifferentialForm form_from_json(const nlohmann::json& j, const ChartSpec& chart, std::size_t degree,
                                std::size_t value_rank, const std::string& field);

}  // namespace lagconn
