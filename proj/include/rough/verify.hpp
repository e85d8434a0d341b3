#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rough {

enum class CheckStatus { kPass, kFail, kSkip };

struct CheckResult {
  std::string id;
  CheckStatus status = CheckStatus::kSkip;
  std::string detail;  // one-line numeric summary
  double seconds = 0.0;
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  // multiplies every Monte-Carlo replica budget; 0 skips MC checks entirely
  double replica_scale = 1.0;
  std::string only;  // run checks whose id starts with this prefix
};

// The acceptance suite: asymptotic bands, sampler oracles, solver sanity,
// increment laws, linearization, and the particle cross-check. Tolerances
// are pinned here, in one place. Never aborts on first failure.
std::vector<CheckResult> run_acceptance(const VerifyOptions& opts = {});

// 0 all run checks pass, 1 any failure, 3 nothing ran (all skipped)
int verify_exit_code(const std::vector<CheckResult>& results);

std::string status_name(CheckStatus s);

}  // namespace rough
