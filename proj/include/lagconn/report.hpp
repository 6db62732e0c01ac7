#pragma once

#include <string>
#include <vector>

namespace lagconn {

enum class Status { ExactPass, NumericPass, Fail };

std::string to_string(Status s);

/// One verified claim. `anchor` names the identity being checked, or
/// "plumbing" for infrastructure checks. Failures always carry a witness.
struct CheckRecord {
  std::string name;
  std::string anchor;
  Status status = Status::ExactPass;
  double residual = 0.0;  // meaningful for NumericPass / numeric failures
  std::string witness;
  std::string detail;

  bool passed() const { return status != Status::Fail; }
};

CheckRecord exact_check(std::string name, std::string anchor, bool ok, std::string witness = {});
CheckRecord numeric_check(std::string name, std::string anchor, double residual, double tol,
                          std::string witness = {});

}  // namespace lagconn
