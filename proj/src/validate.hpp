#pragma once

#include <functional>
#include <string>
#include <vector>

#include "channel.hpp"
#include "linalg.hpp"
#include "rates.hpp"

namespace mamimo {

// fast = reduced sample counts / smoke-scale training, full = the release
// gate with the advertised tolerances and time caps.
enum class ValidateLevel { kFast, kFull };

ValidateLevel level_from_name(const std::string& name);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

// Rate-bound signature matching ub_rate; the dominance checker takes it as a
// parameter so tests can inject a deliberately broken bound and watch the
// check fail.
using BoundFn = std::function<RateBreakdown(
    const std::vector<CMatrix>&, const CMatrix&, const CeeModel&, double)>;

struct DominanceStats {
  int violated = 0;          // Monte-Carlo mean > bound + 3 standard errors
  int reverse_violated = 0;  // bound > Monte-Carlo mean + 3 standard errors
  int total = 0;
};

// Random default-scale instances; counts receiver-instances where the
// Monte-Carlo rate exceeds bound + 3 standard errors, and where the bound
// exceeds the Monte-Carlo rate by the same margin.
DominanceStats run_dominance(int instances, int samples,
                             const std::vector<double>& nmse_values,
                             const BoundFn& bound, uint64_t seed);

CheckResult check_closed_form_dominance(ValidateLevel level);
CheckResult check_trace_identity(ValidateLevel level);
CheckResult check_zeta_zero_consistency(ValidateLevel level);
CheckResult check_gradient(ValidateLevel level);
CheckResult check_oracle_invariance(ValidateLevel level);
// training_ordering, region_trend and cee_degradation share trained runs.
std::vector<CheckResult> run_training_checks(ValidateLevel level);
CheckResult check_determinism(ValidateLevel level);

// All checks in release order; on_result streams each result as it lands.
std::vector<CheckResult> run_validation(
    ValidateLevel level,
    const std::function<void(const CheckResult&)>& on_result = {});

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace mamimo
