#pragma once

// End-to-end verification suite: runs every headline check of the library at
// one (c, k) and reports measured values against pinned tolerances. Used by
// the `verify-all` CLI command and by the acceptance test binary.

#include <functional>
#include <string>
#include <vector>

namespace mch {

struct CheckResult {
  std::string name;
  bool pass = false;
  double runtime_sec = 0;
  std::string detail;  // measured values vs tolerances
};

struct VerifyOptions {
  bool include_evolution = true;  // criteria 6 and 8
  bool include_orbital = true;    // criterion 7 (the slow one)
};

/// Runs the full criteria suite at (c, k); on_result fires after each check.
/// Returns all results plus any conditioning warnings in *warnings.
std::vector<CheckResult> verify_all(
    double c, double k, const VerifyOptions& opts = {},
    const std::function<void(const CheckResult&)>& on_result = nullptr,
    std::vector<std::string>* warnings = nullptr);

std::string verify_report_json(double c, double k, const std::vector<CheckResult>& results,
                               const std::vector<std::string>& warnings);

}  // namespace mch
