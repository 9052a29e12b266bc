// Acceptance suite: one pass/fail line per criterion, nonzero exit on failure.
#include <cstdio>

#include "pipeflow/validation.hpp"

int main() {
  const auto results = pipeflow::run_acceptance();
  bool all_pass = true;
  double total = 0.0;
  for (const auto& r : results) {
    std::printf("%s criterion %2d: %s [measured %.6g, tolerance %.6g, %.2fs]\n",
                r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.measured, r.tolerance,
                r.seconds);
    if (!r.detail.empty()) std::printf("      %s\n", r.detail.c_str());
    all_pass = all_pass && r.pass;
    total += r.seconds;
  }
  std::printf("%s (total %.1fs)\n", all_pass ? "ALL CRITERIA PASS" : "CRITERIA FAILED",
              total);
  return all_pass ? 0 : 1;
}
