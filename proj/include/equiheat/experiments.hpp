#pragma once

#include "equiheat/config.hpp"
#include "equiheat/report.hpp"

namespace equiheat {

/// Dispatch an experiment (kind = trace | oscillatory | gaussian-volume |
/// selberg | bundle-heat | probes) to the module operations. Deterministic
/// given the seed; pass/fail derives only from the declared tolerances.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Exit codes of the CLI: 0 pass, 1 tolerance failure, 2 validation error,
/// 3 numeric error.
enum ExitCode { kExitPass = 0, kExitToleranceFail = 1, kExitValidation = 2, kExitNumeric = 3 };

}  // namespace equiheat
