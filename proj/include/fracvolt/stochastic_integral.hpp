#pragma once

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fracvolt/grid.hpp"
#include "fracvolt/levy_noise.hpp"

namespace fracvolt {

/// A deterministic integrand on [0, T]: either a step function or a callable.
/// Step: f = levels[k] on [breakpoints[k], breakpoints[k+1]), with breakpoints[0] = 0
/// and breakpoints.back() = T.
class DeterministicFunction {
 public:
  enum class Kind { Step, Callable };

  static DeterministicFunction step(std::vector<double> breakpoints, std::vector<double> levels);
  static DeterministicFunction constant(double c, double T);
  /// `lp_norms` maps p to an annotated ||f||_p; each entry is spot-checked against quadrature.
  static DeterministicFunction callable(std::function<double(double)> fn, double T,
                                        std::map<double, double> lp_norms = {},
                                        std::optional<double> holder_exponent = std::nullopt);

  Kind kind() const noexcept { return kind_; }
  double T() const noexcept { return T_; }
  double operator()(double s) const;
  const std::vector<double>& breakpoints() const noexcept { return breaks_; }
  const std::vector<double>& levels() const noexcept { return levels_; }
  std::optional<double> holder_exponent() const noexcept { return holder_; }

  /// int_0^T h(f(s)) ds. Exact for step functions; dyadic quadrature graded at both ends otherwise.
  template <class H>
  auto time_integral(H&& h) const;
  /// ||f||_p^p.
  double lp_power(double p) const;
  double integral() const;
  DeterministicFunction scaled(double c) const;

 private:
  Kind kind_ = Kind::Step;
  double T_ = 1.0;
  std::vector<double> breaks_{0.0, 1.0};
  std::vector<double> levels_{0.0};
  std::function<double(double)> fn_;
  std::map<double, double> lp_norms_;
  std::optional<double> holder_;

  void validate() const;
};

struct RCriterion {
  double value = 0.0;
  bool integrable = true;
  RefinementTrace trace;
};

/// r(u) = a u^2 + int (|xu|^2 ^ 1) pi(dx) + |b u + int (tau(xu) - tau(x) u) pi(dx)|.
double r_function(const LevyTriplet& triplet, double u);
RCriterion r_criterion(const LevyTriplet& triplet, const DeterministicFunction& f);

/// Left-point sum  sum_j f(t_j) (Z_{t_{j+1}} - Z_{t_j}).
double integrate_deterministic(const DeterministicFunction& f, const GridPath& Z);

/// Law of int f dZ as an infinitely divisible triple (b_f, a_f, F_f).
struct IntegralLawSpec {
  double b_f = 0.0;
  double a_f = 0.0;
  LevyTriplet triplet;
  DeterministicFunction f;

  /// int h(x) F_f(dx) = int_0^T int h(f(s) x) pi(dx) ds for h vanishing at 0.
  double pushforward(const std::function<double(double)>& h) const;
  /// log E exp(i lambda int f dZ) = int_0^T Psi(lambda f(s)) ds.
  std::complex<double> log_cf(double lambda) const;
  std::complex<double> cf(double lambda) const { return std::exp(log_cf(lambda)); }
};

IntegralLawSpec integral_law(const LevyTriplet& triplet, const DeterministicFunction& f);

/// Psi(mu), through -Phi(mu^2/2) for subordinated triplets.
std::complex<double> levy_exponent(const LevyTriplet& triplet, double mu);

/// ||f||_2^2 (a + int x^2 pi(dx)); requires b = 0 and symmetric pi.
double second_moment_exact(const LevyTriplet& triplet, const DeterministicFunction& f);
/// (int f)^2 (b + int (x - tau(x)) pi(dx))^2 + ||f||_2^2 (a + int x^2 pi(dx)).
double second_moment_general(const LevyTriplet& triplet, const DeterministicFunction& f);

struct MomentBoundTerms {
  double p = 2.0;
  double lp_term = 0.0;         // ||f||_p^p int |x|^p pi(dx)
  double diffusion_term = 0.0;  // a^{p/2} ||f||_2^p
  double drift_term = 0.0;      // |b|^p ||f||_1^p
  double pi_moment = 0.0;
  bool pi_moment_finite = true;
  double pi_moment_large_jumps = 0.0;  // int_{|x|>1} |x|^p pi(dx)
  bool pi_moment_large_finite = true;
  bool apr1 = false;          // p in [1,2), a = b = 0, symmetric, finite moment
  bool apr2 = false;          // p >= 2, b = 0, symmetric, finite moment
  bool with_drift = false;    // the b != 0 variant
  bool applicable = false;
  double total = 0.0;         // sum of the terms of the applicable bound
};

MomentBoundTerms moment_bound_rhs(const LevyTriplet& triplet, const DeterministicFunction& f, double p);

struct MomentScalingOptions {
  std::vector<double> scales{1.0, 2.0, 4.0, 8.0};
  std::size_t steps = 256;
  unsigned threads = 1;
  double sigma = 3.0;
};

struct MomentScalingPoint {
  double scale = 1.0;
  double moment = 0.0;
  double stderr_ = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double ratio_stderr = 0.0;
  std::optional<double> exact_ratio;  // against second_moment_general, p = 2 only
  std::optional<double> exact_ratio_stderr;
};

struct MomentScalingReport {
  MomentBoundTerms terms;
  std::vector<MomentScalingPoint> ratio_curve;
  bool monotone_bounded = false;
  bool heavy_tail_warning = false;
  std::string hypotheses;
  std::string to_json() const;
};

MomentScalingReport verify_moment_scaling(const LevyTriplet& triplet, const DeterministicFunction& f, double p,
                                          std::size_t n_paths, std::uint64_t seed,
                                          const MomentScalingOptions& opt = {});

}  // namespace fracvolt

#include "fracvolt/numerics.hpp"

namespace fracvolt {

template <class H>
auto DeterministicFunction::time_integral(H&& h) const {
  using R = decltype(h(0.0));
  if (kind_ == Kind::Step) {
    R acc{};
    for (std::size_t k = 0; k < levels_.size(); ++k) acc += (breaks_[k + 1] - breaks_[k]) * h(levels_[k]);
    return acc;
  }
  DyadicOptions opt;
  opt.rel_tol = 1e-11;
  opt.min_levels = 3;
  if constexpr (std::is_same_v<R, double>) {
    DyadicResult r = dyadic_both([&](double s) { return h(fn_(s)); }, 0.0, T_, opt);
    if (r.divergent) return std::numeric_limits<double>::infinity();
    return r.value;
  } else {
    DyadicResult re = dyadic_both([&](double s) { return h(fn_(s)).real(); }, 0.0, T_, opt);
    DyadicResult im = dyadic_both([&](double s) { return h(fn_(s)).imag(); }, 0.0, T_, opt);
    if (re.divergent || im.divergent) throw NumericalError("time integral diverged", re.value, re.trace);
    return R(re.value, im.value);
  }
}

}  // namespace fracvolt
