#pragma once

#include <functional>
#include <iosfwd>
#include <string>

#include "config.hpp"
#include "fracvolt/grid.hpp"

namespace fracvolt::cli {

enum ExitCode : int {
  kOk = 0,
  kVerifyFailed = 1,
  kConfigError = 2,
  kNumericalError = 3,
  kDivergentDerivative = 4,
  kDivergentCondition = 5,
};

/// Writes the ensemble (or driver-only) table and a JSON sidecar under cfg.output.dir;
/// prints the sidecar to `out`.
int cmd_simulate(const ExperimentConfig& cfg, std::ostream& out);
/// Prints {alpha, diagnostics, value[, rs]}.
int cmd_integrate(const ExperimentConfig& cfg, std::ostream& out);
/// Prints the ConditionReport; 5 when any entry diverges.
int cmd_check(const ExperimentConfig& cfg, std::ostream& out);
/// Prints the SuiteResult; 1 when a check fails.
int cmd_verify(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);

/// Runs `fn`, mapping library exceptions to exit codes with a JSON diagnostic on `err`.
int guarded(const std::function<int()>& fn, std::ostream& err);

/// "poly:3x^2-x+1" or "const:5" sampled on `grid`; anything else is read as a path CSV.
GridPath function_source(const std::string& spec, const Grid& grid);
bool is_function_source(const std::string& spec);

}  // namespace fracvolt::cli
