// Release-gate acceptance runner: executes the full validation suite and
// prints one PASS/FAIL line per check. Exit status 0 only when every check
// holds at its pinned tolerance.
#include <cstdio>

#include "validate.hpp"

int main() {
  std::printf("mamimo acceptance suite (level=full)\n");
  std::fflush(stdout);
  int failures = 0;
  const auto results = mamimo::run_validation(
      mamimo::ValidateLevel::kFull, [&](const mamimo::CheckResult& r) {
        if (!r.passed) ++failures;
        std::printf("[%s] %-22s %s (%.1f s)\n", r.passed ? "PASS" : "FAIL",
                    r.name.c_str(), r.detail.c_str(), r.seconds);
        std::fflush(stdout);
      });
  std::printf("%zu checks, %d failed\n", results.size(), failures);
  return failures == 0 ? 0 : 1;
}
