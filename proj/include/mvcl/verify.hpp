#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mvcl {

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool pass = false;  // measured <= threshold
};

struct VerifyOptions {
  std::uint64_t seed = 2024;
  // Test fixture: flips the sign of one analytic gradient entry before the
  // finite-difference comparison, which must make the gradient check fail.
  bool inject_gradient_fault = false;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool all_pass = false;
};

// Fast self-verification gate: oracle agreement for all losses, analytic
// vs finite-difference gradients, pinned hand values, the circle energy
// oracle, and the large-batch uniformity gap. Each check reports the
// measured value against its threshold; all_pass requires every check.
VerifyReport run_verification(const VerifyOptions& opts);

}  // namespace mvcl
