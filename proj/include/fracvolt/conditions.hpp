#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fracvolt/grid.hpp"
#include "fracvolt/levy_noise.hpp"
#include "fracvolt/volterra.hpp"

namespace fracvolt {

/// Deterministic compensator E_t of the integrator, E_0 = 0, nondecreasing.
class EProfile {
 public:
  /// E_t = sigma2 t.
  static EProfile linear(double sigma2);
  /// Piecewise linear through (knots[i], values[i]); knots start at 0 with value 0.
  static EProfile piecewise(std::vector<double> knots, std::vector<double> values);
  /// Two columns `t,E` (optional header line); read as a piecewise-linear profile.
  static EProfile from_csv(std::istream& in);

  double operator()(double t) const;
  /// dE/dt, right-continuous; constant beyond the last knot.
  double density(double t) const;
  double density_bound() const;
  std::string describe() const;

 private:
  EProfile() = default;
  std::vector<double> knots_, values_;
  std::string kind_ = "linear";
};

struct IntegratorHypotheses {
  /// Integrability exponent of (D_p); ignored by check_D2 and check_Dinf.
  double p = 2.0;
  double alpha = 0.5;
  /// Lévy integrator; used by check_Dp and, when `E` is absent, to derive E.
  std::optional<LevyTriplet> noise;
  std::optional<EProfile> E;
  /// The martingale part of the integrator is continuous (required by check_Dinf).
  bool continuous_martingale = false;
  VolterraKernel kernel = VolterraKernel::molchan_golosov(0.5);
  double T = 1.0;
  /// Resolution n = 2^k: the singularity series of every item is followed for k halvings.
  std::size_t resolution = std::size_t{1} << 11;
  /// Relative tolerance of the innermost integrals.
  double inner_tol = 1e-6;
  std::string to_json() const;
};

struct ConditionEntry {
  std::string name;
  bool finite = false;
  /// Integral value; NaN when only the verdict is known (fast path).
  double value = 0.0;
  /// (n = 2^k, partial sum) after each halving of the singular window.
  std::vector<std::pair<std::size_t, double>> trace;
  double last_ratio = 0.0;
};

struct ConditionReport {
  std::string condition;
  std::string hypotheses;
  std::vector<ConditionEntry> entries;
  bool verdict = false;
  bool fast_path = false;
  std::string class_label;
  const ConditionEntry& entry(const std::string& name) const;
  std::string to_json() const;
};

/// (D_p): items 1-4 evaluated at t = T. The Lévy integrator must have symmetric pi
/// with int |x|^p pi(dx) < inf, and in addition a = b = 0 for p in [1,2), a = 0 for
/// p > 2, b = 0 for p = 2. The kernel must lie in L_p([0,T]). Violations throw
/// PreconditionError.
ConditionReport check_Dp(const IntegratorHypotheses& h);

/// (D_2): items 1-4 with dE_v = E'(v) dv at t = T.
ConditionReport check_D2(const IntegratorHypotheses& h);

struct DinfOptions {
  double beta = 0.45;
  double rho = 4.0;
  /// Accept the bounded, 1/2-Hölder kernel shortcut when its conditions hold.
  bool allow_fast_path = true;
};

/// (D_inf) items 1-2 over 0 < x < y < T, doubled for the symmetric half. Needs a
/// continuous martingale with bounded E' and beta > 1/rho + 1 - alpha.
ConditionReport check_Dinf(const IntegratorHypotheses& h, const DinfOptions& opt);

/// Exit-code helper: 5 when any report diverges.
bool any_divergent(std::span<const ConditionReport> reports);

struct ExampleOneJ {
  double H = 0.7;
  double alpha = 0.5;
  double t = 1.0;
  ConditionReport report;  // entries J1..J4
  double J12() const;
};

/// J1..J4 of the ExampleOne kernel with j = 1 and E_t = t: the (D_2) items at time t.
ExampleOneJ example1_J_integrals(double H, double alpha, double t, std::size_t resolution = std::size_t{1} << 11);

struct J12Reduction {
  std::vector<double> ts;
  std::vector<double> j12;
  /// (J1 + J2)(t) / int_0^t (t-s)^(2H+2alpha-2) ds.
  std::vector<double> ratios;
  double max_rel_spread = 0.0;
};
J12Reduction j12_reduction(double H, double alpha, const std::vector<double>& ts,
                           std::size_t resolution = std::size_t{1} << 11);

struct IdentityProbe {
  double z = 0.0;
  double v = 0.0;
  double lhs = 0.0;
  /// lhs / (v^(1/2-H) z^(1/2-H) (v-z)^(2H-2)).
  double constant = 0.0;
};
struct FracIdentityReport {
  double H = 0.7;
  std::vector<IdentityProbe> probes;
  double max_rel_spread = 0.0;
};
/// int_0^z u^(1-2H) (z-u)^(H-3/2) (v-u)^(H-3/2) du against
/// C v^(1/2-H) z^(1/2-H) (v-z)^(2H-2) for 0 < z < v.
FracIdentityReport frac_integral_identity(double H, const std::vector<std::pair<double, double>>& probes);

struct GrrDiagnostic {
  double beta = 0.0;
  double rho = 0.0;
  /// Ensemble mean of sum_{i != j} |Y_i - Y_j|^rho / |t_i - t_j|^(beta rho + 1) dt^2.
  double xi_moment = 0.0;
  /// (steps, xi_moment) at n/4, n/2 and n.
  std::vector<std::pair<std::size_t, double>> trace;
  /// The increments of xi_moment shrink under refinement.
  bool xi_finite = false;
  double holder_slope = 0.0;
  /// beta - 1/rho.
  double holder_floor = 0.0;
  bool pass = false;
};
/// Ensemble check of the Garsia-Rodemich-Rumsey bound: when xi^rho looks finite under
/// refinement, the Hölder slope must reach beta - 1/rho (less a 0.05 estimation allowance).
GrrDiagnostic grr_holder_diagnostic(std::span<const GridPath> paths, double beta, double rho);

}  // namespace fracvolt
