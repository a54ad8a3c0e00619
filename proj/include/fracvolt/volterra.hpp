#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fracvolt/grid.hpp"
#include "fracvolt/levy_noise.hpp"

namespace fracvolt {

struct MolchanGolosov {
  double H = 0.5;
};

/// g(j,t,s) = c_H s^(1/2-H) int_s^t u^(H-1/2) (u-s)^(H-3/2) j(u) du, H in (1/2, 1).
struct ExampleOneKernel {
  double H = 0.7;
  std::function<double(double)> j;
  double bound_G = 1.0;
  std::string j_name = "custom";
  int panels = 16;
  bool unit_j = false;
};

struct CustomKernel {
  std::function<double(double, double)> g;
  std::string name = "custom";
  std::optional<double> bound_C;
  std::optional<double> half_holder_C;
  std::vector<double> lp_memberships;
};

/// C_H of the Molchan-Golosov kernel, normalized so that Y is standard fBm.
double mg_constant(double H);
/// c_H = (H (2H - 1) / B(2 - 2H, H - 1/2))^(1/2), H > 1/2.
double example_one_constant(double H);

class VolterraKernel {
 public:
  using Family = std::variant<MolchanGolosov, ExampleOneKernel, CustomKernel>;

  static VolterraKernel molchan_golosov(double H);
  static VolterraKernel example_one(double H, std::function<double(double)> j, double bound_G,
                                    std::string j_name = "custom");
  /// ExampleOne with j = 1, G = 1.
  static VolterraKernel example_one_unit(double H);
  static VolterraKernel custom(CustomKernel k);

  const Family& family() const noexcept { return family_; }
  /// 0 for s >= t; s = 0 returns the limiting value.
  double operator()(double t, double s) const;
  std::optional<double> hurst() const;
  /// True when g = 1 on 0 < s < t (MG at H = 1/2).
  bool is_unit() const;
  /// g(lt, ls) = l^(H-1/2) g(t, s): MG, and ExampleOne with j = 1.
  bool is_homogeneous() const;
  std::string describe() const;

 private:
  explicit VolterraKernel(Family f) : family_(std::move(f)) {}
  Family family_;
  double C_ = 1.0;
};

/// Evaluator for repeated use in quadrature. Homogeneous kernels are served from
/// g(t,s) = t^(H-1/2) s'^(1/2-H) (1-s')^(H-1/2) S(s'), s' = s/t, with S interpolated
/// (cubic, log-graded toward both ends) from the kernel's own values; relative error
/// is below 1e-8. Other kernels are evaluated directly.
std::function<double(double, double)> fast_evaluator(const VolterraKernel& k);

/// Kernel value for 0 <= s < t; throws std::domain_error otherwise.
double eval_kernel(const VolterraKernel& k, double t, double s);

struct VolterraPath {
  GridPath path;
  std::string kernel_meta;
  std::string driver_meta;
};

/// Kernel weights g(t_i, s_j*) at midpoints s_j* of [t_j, t_{j+1}], j < i, from
/// fast_evaluator. Rows are
/// cached up to `kMaxCachedSteps` steps and recomputed on demand above that.
class KernelMatrix {
 public:
  static constexpr std::size_t kMaxCachedSteps = std::size_t{1} << 14;

  KernelMatrix(const VolterraKernel& k, const Grid& grid, unsigned threads = 1);
  const Grid& grid() const noexcept { return grid_; }
  /// g(t_i, s_j*) for j < i.
  std::vector<double> row(std::size_t i) const;
  /// Y_{t_i} = sum_{j<i} g(t_i, s_j*) dZ_j.
  GridPath apply(const GridPath& Z) const;

 private:
  std::function<double(double, double)> eval_;
  Grid grid_;
  std::vector<std::vector<double>> rows_;
};

VolterraPath build_path(const VolterraKernel& k, const GridPath& Z);

struct IncrementDecomposition {
  double boundary_term = 0.0;
  double history_term = 0.0;
};
/// Y_t - Y_s = int_s^t g(t,u) dZ_u + int_0^s (g(t,u) - g(s,u)) dZ_u on the build_path nodes.
IncrementDecomposition increment_decomposition(const VolterraKernel& k, const GridPath& Z, std::size_t s_idx,
                                               std::size_t t_idx);

struct HolderEstimate {
  double exponent = 0.0;
  double stderr_ = 0.0;
  std::vector<double> lags;
  std::vector<double> variogram;
};
/// Half the least-squares slope of log E|Y_{t+h} - Y_t|^2 against log h, pooled over
/// all paths and start points. `lags` are in grid steps.
HolderEstimate holder_exponent_estimate(std::span<const GridPath> paths, const std::vector<std::size_t>& lags);
/// Lags 1, 2, 4, ... up to n / 8.
std::vector<std::size_t> dyadic_lags(std::size_t steps, std::size_t count = 6);

struct VolterraEnsemble {
  std::vector<VolterraPath> paths;
  std::vector<std::uint64_t> seeds;
  Grid grid;
  std::uint64_t master = 0;
  std::string kernel_meta;
  std::string driver_meta;
  std::string sidecar_json() const;
};

VolterraEnsemble build_ensemble(const VolterraKernel& k, const LevyTriplet& driver, const Grid& grid,
                                std::size_t paths, std::uint64_t master, unsigned threads = 1);

}  // namespace fracvolt
