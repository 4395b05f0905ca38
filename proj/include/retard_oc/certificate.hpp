#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "retard_oc/curve.hpp"

namespace retard_oc {

/// One hypothesis check. `time` and `point` locate the worst violation;
/// both are empty when the check has no natural location.
struct CheckResult {
  std::string name;
  bool pass = false;
  double worst_residual = 0.0;
  std::optional<double> time;
  std::vector<double> point;
  std::string detail;
};

/// Report of a verification run. Diagnostics are informational and do
/// not enter the overall verdict.
struct Certificate {
  std::string subject;
  std::vector<CheckResult> checks;
  std::vector<CheckResult> diagnostics;
  std::map<std::string, double> tolerances;
  std::uint64_t seed = 0;
  std::optional<double> cost;

  bool overall() const;
  const CheckResult* find(const std::string& name) const;
  std::vector<std::string> failed() const;

  std::string to_text() const;
  std::string to_json() const;
};

}  // namespace retard_oc
