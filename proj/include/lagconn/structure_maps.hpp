#pragma once

#include "lagconn/geodesic.hpp"
#include "lagconn/report.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lagconn {

/// Full forms use d and the ordinary Lie derivative; vertical forms use d_V and
/// the vertical Lie derivative (frame fields must then be vertical).
enum class FormMode { Full, Vertical };

struct BasicnessCheck {
  bool horizontal = true;
  bool leaf_constant = true;
  std::string witness;  // frame field, component and a sample point where it is nonzero
  bool passed() const { return horizontal && leaf_constant; }
};

/// i_X α ≡ 0 and L_X α ≡ 0 for every frame field X of L, exactly.
BasicnessCheck check_basic(const DifferentialForm& alpha, const ChartSpec& chart, const Distribution& L,
                           FormMode mode = FormMode::Full);

struct DescendedForm {
  ChartSpec quotient;        // chart without the L-block coordinates
  IndexList kept;            // original index of each quotient coordinate
  DifferentialForm form;     // on the quotient chart
  DifferentialForm pullback; // the same form on the original chart
  std::size_t original_dim = 0;
};

/// Eliminates the L-block coordinates of a basic form. NotHorizontal /
/// NotLeafConstant with witnesses; NotApplicable when L is not a coordinate block.
DescendedForm descend_form(const DifferentialForm& alpha, const ChartSpec& chart, const Distribution& L,
                           FormMode mode = FormMode::Full);

/// Re-expresses a form on the original chart through the quotient coordinates.
DifferentialForm lift_form(const DescendedForm& d, const DifferentialForm& base_form);

struct StructureMapReport {
  std::string embedding;
  std::optional<VectorField> euler;
  std::optional<DifferentialForm> theta;
  std::optional<DescendedForm> base_form;
  std::optional<DescendedForm> theta_difference;  // descended θ_1 − θ_2 when a second embedding is given
  std::vector<CheckRecord> checks;
  bool exact = true;  // false when the numeric fallback was used

  bool passed() const;
  const CheckRecord* find(const std::string& name) const;
};

struct StructureMapOptions {
  const DifferentialForm* expected_base_form = nullptr;  // on the original chart
  const Embedding* second_embedding = nullptr;
  std::vector<Point> samples;  // for witnesses, domain-exit probes and the numeric fallback
  double tol = 1e-8;
};

/// SYM: θ = −i_Σ ω, ω + dθ basic, descended ω_Q closed, optional comparison and
/// embedding invariance.
StructureMapReport weinstein_verify(const GeometricStructure& s, const Embedding& Q,
                                    const StructureMapOptions& opts = {});
/// POLY: the same with d_V, vertical frame fields and an n̂-valued θ̂.
StructureMapReport poly_structure_verify(const GeometricStructure& s, const Embedding& E,
                                         const StructureMapOptions& opts = {});
/// MULTI: full d, plus the horizontality degree of the extracted base form.
StructureMapReport multi_structure_verify(const GeometricStructure& s, const Embedding& E,
                                          const StructureMapOptions& opts = {});
/// Dispatches on the structure kind.
StructureMapReport structure_map_verify(const GeometricStructure& s, const Embedding& E,
                                        const StructureMapOptions& opts = {});

}  // namespace lagconn
