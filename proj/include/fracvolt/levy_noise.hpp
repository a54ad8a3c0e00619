#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "fracvolt/errors.hpp"
#include "fracvolt/grid.hpp"

namespace fracvolt {

/// Truncation used in the Levy-Khintchine exponent: identity on [-1, 1], sign outside.
constexpr double truncate_jump(double z) noexcept { return z > 1.0 ? 1.0 : (z < -1.0 ? -1.0 : z); }

/// Gamma(shape, scale) distributed jump sizes of a compound Poisson subordinator.
struct JumpLaw {
  double shape = 1.0;
  double scale = 1.0;

  double density(double x) const;
  double mean() const noexcept { return shape * scale; }
  double laplace(double lambda) const { return std::pow(1.0 + lambda * scale, -shape); }
  double sample(std::mt19937_64& rng) const;
};

struct GammaFamily {
  double c = 1.0;
  double rate = 1.0;
};
/// Laplace exponent c1 * lambda^alpha.
struct StableFamily {
  double alpha = 0.5;
  double c1 = 1.0;
};
struct CompoundPoissonFamily {
  double rate = 1.0;
  JumpLaw jumps;
};
struct CustomNuFamily {
  std::function<double(double)> density;
  std::string name = "custom";
};

/// A subordinator: drift plus a Levy measure nu on (0, infinity).
struct SubordinatorSpec {
  double drift = 0.0;
  std::variant<GammaFamily, StableFamily, CompoundPoissonFamily, CustomNuFamily> family;

  static SubordinatorSpec gamma(double c, double rate, double drift = 0.0);
  static SubordinatorSpec stable(double alpha, double c1, double drift = 0.0);
  static SubordinatorSpec compound_poisson(double rate, JumpLaw jumps, double drift = 0.0);
  static SubordinatorSpec custom(std::function<double(double)> density, double drift = 0.0,
                                 std::string name = "custom");
  /// Drift only, no jumps.
  static SubordinatorSpec deterministic(double drift);

  /// Density of nu at x > 0.
  double nu_density(double x) const;
  /// nu((0, infinity)); infinite for Gamma, stable and most custom measures.
  double total_mass() const;
  std::string describe() const;
  /// Checks parameter ranges and, for custom measures, that min(x, 1) nu(dx) integrates.
  void validate() const;
};

struct Atom {
  double location = 0.0;
  double mass = 0.0;
};

struct AtomsMeasure {
  std::vector<Atom> atoms;
};

/// A Levy measure with a density. `singularity_order` annotates the behaviour
/// density ~ |x|^(-1-order) at 0 (order < 2). When `jump_sampler` is set the
/// measure must have finite `total_mass` and the sampler draws normalized jumps.
struct DensityMeasure {
  std::function<double(double)> density;
  double singularity_order = 0.0;
  bool symmetric = false;
  double total_mass = std::numeric_limits<double>::infinity();
  std::function<double(std::mt19937_64&)> jump_sampler;
};

/// The Levy measure of a subordinated Wiener process W(L_t).
struct SubordinatedMeasure {
  SubordinatorSpec subordinator;
};

/// Integral of |x|^p against a Levy measure, split at |x| = 1.
struct MomentResult {
  double value = 0.0;
  bool finite = true;
  double small_jumps = 0.0;
  bool small_finite = true;
  double large_jumps = 0.0;
  bool large_finite = true;
  RefinementTrace trace;
};

class LevyMeasureSpec {
 public:
  using Kind = std::variant<AtomsMeasure, DensityMeasure, SubordinatedMeasure>;

  LevyMeasureSpec() : kind_(AtomsMeasure{}), cache_(std::make_shared<Cache>()) {}
  explicit LevyMeasureSpec(Kind k);

  const Kind& kind() const noexcept { return kind_; }
  bool is_zero() const;
  bool symmetric() const;
  /// Density of pi at x (density and subordinated kinds only).
  double density(double x) const;
  /// Cached moment lookup; computes on first use.
  MomentResult moment(double p, const std::function<MomentResult(double)>& compute) const;

 private:
  struct Cache {
    std::mutex mu;
    std::map<double, MomentResult> moments;
  };
  Kind kind_;
  std::shared_ptr<Cache> cache_;
};

/// Characteristic triplet (a, b, pi).
struct LevyTriplet {
  double diffusion_a = 0.0;
  double drift_b = 0.0;
  LevyMeasureSpec levy_measure;

  static LevyTriplet brownian(double a);
  static LevyTriplet atoms(std::vector<Atom> atoms, double a = 0.0, double b = 0.0);
  static LevyTriplet density(DensityMeasure m, double a = 0.0, double b = 0.0);
  /// The triplet of W(L_t): diffusion equal to the subordinator drift, no drift.
  static LevyTriplet subordinated(SubordinatorSpec sub);

  void validate() const;
  std::string describe() const;
  const SubordinatorSpec* subordinator() const;
};

std::complex<double> characteristic_exponent(const LevyTriplet& triplet, double mu);
/// -Phi(mu^2 / 2): the exponent of a subordinated Wiener process through its subordinator.
double subordinated_exponent(const SubordinatorSpec& sub, double mu);
double laplace_exponent(const SubordinatorSpec& sub, double lambda);
double induced_density(const SubordinatorSpec& sub, double x);
MomentResult pi_abs_moment(const LevyTriplet& triplet, double p);
/// b - int tau(x) pi(dx): the linear drift of a finite-activity driver.
double effective_drift(const LevyTriplet& triplet);

struct SubordinatorConditions {
  bool C = false;
  bool D = false;
  std::optional<double> EL1;
};
/// Large-jump moment conditions: C is int_1^inf x^(1/2) nu(dx) < inf, D is int_1^inf x nu(dx) < inf.
SubordinatorConditions check_conditions_C_D(const SubordinatorSpec& sub);

GridPath sample_subordinator(const SubordinatorSpec& sub, const Grid& grid, std::uint64_t seed);
GridPath sample_driver(const LevyTriplet& triplet, const Grid& grid, std::uint64_t seed);
/// Validates once and returns a reusable seed -> path sampler (thread-safe).
std::function<GridPath(std::uint64_t)> make_driver_sampler(const LevyTriplet& triplet, const Grid& grid);

/// Path i uses SeedSequence(master).seed(i).
std::vector<GridPath> sample_subordinator_ensemble(const SubordinatorSpec& sub, const Grid& grid, std::size_t paths,
                                                   std::uint64_t master, unsigned threads = 1);
std::vector<GridPath> sample_driver_ensemble(const LevyTriplet& triplet, const Grid& grid, std::size_t paths,
                                             std::uint64_t master, unsigned threads = 1);

}  // namespace fracvolt
