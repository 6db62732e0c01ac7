#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lagconn {

enum class ErrorCode {
  SyntaxError,
  UnknownIdentifier,
  PoleAtPoint,
  OutOfDomain,
  MonomialCeiling,
  InvalidChart,
  ChartNotFibered,
  NotVertical,
  DegreeMismatch,
  RankDeficient,
  OutOfScope,
  ScopeMismatch,
  DegeneratePairing,
  PoleAtSample,
  Degenerate,
  WeightsNotPartition,
  RankMismatch,
  PreconditionViolated,
  DegenerateAtPoint,
  NotInRange,
  DimensionTooLarge,
  InvalidStructure,
  LeftDomain,
  PoleOnPath,
  NotFlatOrTorsionful,
  NotSolvableInClosedForm,
  NotHorizontal,
  NotLeafConstant,
  BasicnessFailed,
  SchemaError,
  ExprError,
  NotApplicable,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lagconn
