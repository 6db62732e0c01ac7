#include "lagconn/error.hpp"

namespace lagconn {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorCode::PoleAtPoint: return "PoleAtPoint";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::MonomialCeiling: return "MonomialCeiling";
    case ErrorCode::InvalidChart: return "InvalidChart";
    case ErrorCode::ChartNotFibered: return "ChartNotFibered";
    case ErrorCode::NotVertical: return "NotVertical";
    case ErrorCode::DegreeMismatch: return "DegreeMismatch";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::OutOfScope: return "OutOfScope";
    case ErrorCode::ScopeMismatch: return "ScopeMismatch";
    case ErrorCode::DegeneratePairing: return "DegeneratePairing";
    case ErrorCode::PoleAtSample: return "PoleAtSample";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::WeightsNotPartition: return "WeightsNotPartition";
    case ErrorCode::RankMismatch: return "RankMismatch";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::DegenerateAtPoint: return "DegenerateAtPoint";
    case ErrorCode::NotInRange: return "NotInRange";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::InvalidStructure: return "InvalidStructure";
    case ErrorCode::LeftDomain: return "LeftDomain";
    case ErrorCode::PoleOnPath: return "PoleOnPath";
    case ErrorCode::NotFlatOrTorsionful: return "NotFlatOrTorsionful";
    case ErrorCode::NotSolvableInClosedForm: return "NotSolvableInClosedForm";
    case ErrorCode::NotHorizontal: return "NotHorizontal";
    case ErrorCode::NotLeafConstant: return "NotLeafConstant";
    case ErrorCode::BasicnessFailed: return "BasicnessFailed";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::ExprError: return "ExprError";
    case ErrorCode::NotApplicable: return "NotApplicable";
  }
  return "Unknown";
}

}  // namespace lagconn
