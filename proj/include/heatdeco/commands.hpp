#pragma once

#include "heatdeco/config.hpp"

namespace heatdeco {

enum ExitCode : int {
  kExitOk = 0,
  kExitStatisticalFailure = 1,
  kExitConfigError = 2,
  kExitIoError = 3,
  kExitInternalError = 4,
};

/// Per-mode trajectory files (trajectory 0 of each mode) and
/// simulate_summary.json.
int cmd_simulate(const RunConfig& config);

/// Stationary-variance and rate-recovery tests per mode, fdr_report.json.
/// Exit 1 if any test fails.
int cmd_fdr_verify(const RunConfig& config);

/// deco_scan.csv (or .json) with columns k,exponent,magnitude,conserved_flag.
/// Exit 4 if the exponents are not strictly decreasing in k.
int cmd_deco_scan(const RunConfig& config);

/// Equilibrium lattice ensemble: field_sample.json plus the first field as
/// field_sample_0.csv. Exit 1 if any check is out of tolerance.
int cmd_field_sample(const RunConfig& config);

/// Full command-line entry point: subcommand plus --config and overrides.
int run_cli(int argc, const char* const* argv);

}  // namespace heatdeco
