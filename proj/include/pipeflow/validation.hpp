// The acceptance suite: every criterion as a library function returning a
// structured result, shared by the acceptance test binary and the `validate`
// CLI command.
#pragma once

#include <string>
#include <vector>

namespace pipeflow {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double measured = 0.0;   // headline measured value (criterion-specific)
  double tolerance = 0.0;  // headline tolerance it is compared against
  std::string detail;
  double seconds = 0.0;
};

// Runs criteria 1..12 in order.
std::vector<CriterionResult> run_acceptance();

}  // namespace pipeflow
