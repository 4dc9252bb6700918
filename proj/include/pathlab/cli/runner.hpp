#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "pathlab/cli/config.hpp"
#include "pathlab/estimators/checks.hpp"

namespace pathlab::cli {

enum ExitCode { kOk = 0, kUsageError = 1, kViolated = 2 };

// The experiments a config asks for ("all" expands to every experiment the
// model supports).
std::vector<std::string> planned_experiments(const ExperimentConfig& c);

// Throws sde::OffGridTime or ConfigError before any path is simulated.
void validate(const ExperimentConfig& c);

std::vector<estimators::CheckResult> run_experiments(const ExperimentConfig& c);

// Writes results.csv, summary.txt and effective_config.json under c.output.
int run(const ExperimentConfig& c, std::ostream& log);

/* Re-runs the experiment for each value of `param` (radius, dt, m, T, N,
   seed, t0, sigma, threshold) and writes one sweep.csv with a leading sweep
   column.  Radius sweeps of error-norms add a monotonicity row; seed sweeps
   add a battery row per checked quantity (pass rate >= 95%), and only those
   rows decide the exit code. */
int sweep(const ExperimentConfig& c, const std::string& param, const std::vector<std::string>& values,
          std::ostream& log);

// Runs `body` and maps configuration, oracle and abort errors to exit code 1.
int guarded(std::ostream& err, const std::function<int()>& body);

}  // namespace pathlab::cli
