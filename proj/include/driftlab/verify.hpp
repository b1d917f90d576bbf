#pragma once

#include <string>
#include <vector>

namespace driftlab {

struct CriterionResult {
  int index = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Runs the full acceptance suite (10 criteria) on the built-in default
/// configurations. Exceptions inside a criterion are caught and reported
/// as failures.
std::vector<CriterionResult> run_acceptance();

}  // namespace driftlab
