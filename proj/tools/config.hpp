#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracvolt/levy_noise.hpp"
#include "fracvolt/volterra.hpp"

namespace fracvolt::cli {

/// Bad config text, unknown key or out-of-range value. Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DriverConfig {
  /// brownian | atoms | gamma_subordinated | stable_subordinated | cp_subordinated
  std::string type = "brownian";
  double a = 1.0;
  double b = 0.0;
  std::vector<Atom> atoms;
  double c = 1.0;
  double rate = 1.0;
  double stable_alpha = 0.5;
  double c1 = 1.0;
  double jump_shape = 1.0;
  double jump_scale = 1.0;
  LevyTriplet build() const;
};

struct KernelConfig {
  /// none | unit | mg | example_one (j = 1)
  std::string type = "mg";
  double H = 0.5;
  /// Empty for `none`.
  std::optional<VolterraKernel> build() const;
};

struct SimulateConfig {
  DriverConfig driver;
  KernelConfig kernel;
  double T = 1.0;
  std::size_t n = 1024;
  std::size_t paths = 100;
};

struct IntegrateConfig {
  /// "poly:<polynomial in x>", "const:<c>" or a path CSV file.
  std::string f;
  std::string g;
  double alpha = 0.5;
  double T = 1.0;
  /// Grid for function sources when neither side is a file.
  std::size_t n = 4096;
  bool rs_check = false;
};

struct CheckConfig {
  /// Dp | D2 | Dinf
  std::string condition = "D2";
  double p = 2.0;
  double alpha = 0.5;
  KernelConfig kernel;
  std::optional<DriverConfig> noise;
  /// linear | csv; absent derives E from the noise.
  std::optional<std::string> E_type;
  double sigma2 = 1.0;
  std::string E_path;
  bool continuous_martingale = false;
  double beta = 0.45;
  double rho = 4.0;
  bool fast_path = true;
  std::size_t resolution = std::size_t{1} << 11;
  double T = 1.0;
  double inner_tol = 1e-6;
};

struct VerifyConfig {
  std::string suite;
  std::size_t N = 0;
  std::size_t resolution = std::size_t{1} << 11;
};

struct OutputConfig {
  std::string dir = "out";
  /// csv | json
  std::string format = "csv";
};

struct ExperimentConfig {
  std::uint64_t seed = 20240917;
  unsigned threads = 1;
  SimulateConfig simulate;
  IntegrateConfig integrate;
  CheckConfig check;
  VerifyConfig verify;
  OutputConfig output;
};

/// YAML mapping with optional top-level keys seed, threads, simulate, integrate,
/// check, verify, output. Unknown keys anywhere throw ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

}  // namespace fracvolt::cli
