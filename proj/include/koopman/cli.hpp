#pragma once

#include <string>
#include <vector>

#include "koopman/sim.hpp"

namespace koopman {

/// CSV with one row per grid point:
/// t, x1..xn, y1..ym, xk_hat1..xk_hatn, xb_hat1..xb_hatn, err_koopman, err_baseline.
std::string trajectory_csv(const ExperimentResult& res);

/// Sidecar record: fitted rates, dimensions, verdicts, placed/achieved poles,
/// diagnostics, warnings.
std::string summary_json(const ExperimentResult& res, const ExperimentConfig& config);

/// Per-mode table: position, alpha, lambda, |<h_i, psi_alpha>| per output.
std::string spectrum_csv(const ExperimentResult& res);

/// Entry point for the command-line tool; args exclude the program name.
/// Exit codes: 0 success, 2 validation, 3 assumption violation, 4 synthesis
/// failure, 5 simulation failure.
int run_cli(const std::vector<std::string>& args);

}  // namespace koopman
