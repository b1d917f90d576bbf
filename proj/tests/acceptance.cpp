// Acceptance gate: one pass/fail line per criterion; nonzero exit on any
// failure. Runs the same suite as `driftlab verify`.

#include <cstdio>

#include "driftlab/verify.hpp"

int main() {
  const auto results = driftlab::run_acceptance();
  bool all = true;
  for (const auto& r : results) {
    std::printf("%s  criterion %d (%s): %s\n", r.pass ? "PASS" : "FAIL", r.index,
                r.name.c_str(), r.detail.c_str());
    all = all && r.pass;
  }
  std::printf("%s\n", all ? "acceptance: all criteria pass" : "acceptance: FAILURES present");
  return all ? 0 : 1;
}
