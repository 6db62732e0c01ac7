#include "lagconn/report.hpp"

#include <cmath>
#include <utility>

namespace lagconn {

std::string to_string(Status s) {
  switch (s) {
    case Status::ExactPass: return "exact-pass";
    case Status::NumericPass: return "numeric-pass";
    case Status::Fail: return "fail";
  }
  return "fail";
}

CheckRecord exact_check(std::string name, std::string anchor, bool ok, std::string witness) {
  CheckRecord c;
  c.name = std::move(name);
  c.anchor = std::move(anchor);
  c.status = ok ? Status::ExactPass : Status::Fail;
  if (!ok) c.witness = witness.empty() ? "unspecified" : std::move(witness);
  return c;
}

CheckRecord numeric_check(std::string name, std::string anchor, double residual, double tol, std::string witness) {
  CheckRecord c;
  c.name = std::move(name);
  c.anchor = std::move(anchor);
  c.residual = residual;
  const bool ok = std::isfinite(residual) && residual <= tol;
  c.status = ok ? Status::NumericPass : Status::Fail;
  if (!ok) c.witness = witness.empty() ? "residual above tolerance" : std::move(witness);
  return c;
}

}  // namespace lagconn
