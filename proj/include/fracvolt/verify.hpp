#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace fracvolt {

struct VerifyOptions {
  /// Monte Carlo sample size; 0 selects each criterion's default.
  std::size_t N = 0;
  std::uint64_t seed = 20240917;
  unsigned threads = 1;
  /// Resolution of the condition checks.
  std::size_t resolution = std::size_t{1} << 11;
};

struct CheckLine {
  int criterion = 0;
  std::string name;
  bool pass = false;
  double value = 0.0;
  double bound = 0.0;
  std::string detail;
};

struct SuiteResult {
  std::string suite;
  std::vector<CheckLine> checks;
  bool pass() const;
  /// Lexicographically keyed JSON; identical for identical inputs.
  std::string to_json() const;
};

/// cf-match, second-moment, subordinator-moments, fbm-cov, frac-units, gls-vs-rs,
/// conditions-matrix.
const std::vector<std::string>& suite_names();
/// Criteria run by a suite; throws std::invalid_argument for an unknown name.
const std::vector<int>& suite_criteria(const std::string& suite);

std::vector<CheckLine> run_criterion(int criterion, const VerifyOptions& opt);
SuiteResult run_suite(const std::string& suite, const VerifyOptions& opt);

}  // namespace fracvolt
