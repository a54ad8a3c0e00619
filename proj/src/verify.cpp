#include "fracvolt/verify.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "fracvolt/conditions.hpp"
#include "fracvolt/errors.hpp"
#include "fracvolt/fractional.hpp"
#include "fracvolt/grid.hpp"
#include "fracvolt/levy_noise.hpp"
#include "fracvolt/numerics.hpp"
#include "fracvolt/stochastic_integral.hpp"
#include "fracvolt/volterra.hpp"

namespace fracvolt {

namespace {

std::size_t samples(const VerifyOptions& opt, std::size_t fallback) { return opt.N > 0 ? opt.N : fallback; }

CheckLine below(int criterion, std::string name, double value, double bound, std::string detail = {}) {
  return {criterion, std::move(name), std::isfinite(value) && value <= bound, value, bound, std::move(detail)};
}

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

Moments moments(const std::vector<double>& xs) {
  NeumaierSum s;
  for (double x : xs) s += x;
  const double m = s.value() / static_cast<double>(xs.size());
  NeumaierSum v;
  for (double x : xs) v += (x - m) * (x - m);
  return {m, v.value() / static_cast<double>(xs.size() - 1)};
}

// Step f with breaks on the n = 10 grid.
DeterministicFunction step_f() { return DeterministicFunction::step({0.0, 0.3, 0.7, 1.0}, {1.0, -0.5, 2.0}); }

std::vector<double> integrals(const LevyTriplet& z, const DeterministicFunction& f, std::size_t N,
                              const VerifyOptions& opt, std::uint64_t stream) {
  const Grid grid = Grid::over(0.0, 1.0, 10);
  const auto paths = sample_driver_ensemble(z, grid, N, SeedSequence(opt.seed).seed(stream, 7), opt.threads);
  std::vector<double> out(N);
  for (std::size_t i = 0; i < N; ++i) out[i] = integrate_deterministic(f, paths[i]);
  return out;
}

std::vector<CheckLine> cf_match(const VerifyOptions& opt) {
  const std::size_t N = samples(opt, 100000);
  const LevyTriplet z = LevyTriplet::subordinated(SubordinatorSpec::compound_poisson(3.0, JumpLaw{2.0, 0.5}));
  const DeterministicFunction f = step_f();
  const auto xs = integrals(z, f, N, opt, 1);
  const IntegralLawSpec law = integral_law(z, f);
  double worst = 0.0;
  std::string at;
  for (double lam : {-4.0, -2.0, -1.0, -0.5, -0.25, 0.25, 0.5, 1.0, 2.0, 4.0}) {
    NeumaierSum re, im;
    for (double x : xs) {
      re += std::cos(lam * x);
      im += std::sin(lam * x);
    }
    const std::complex<double> emp(re.value() / N, im.value() / N);
    const double d = std::abs(emp - law.cf(lam));
    if (d > worst) {
      worst = d;
      at = "lambda=" + format_double(lam);
    }
  }
  return {below(1, "cf_max_abs_error", worst, 3.0 / std::sqrt(static_cast<double>(N)), at)};
}

std::vector<CheckLine> second_moment(const VerifyOptions& opt) {
  const std::size_t N = samples(opt, 100000);
  const DeterministicFunction f = step_f();
  const std::vector<std::pair<std::string, LevyTriplet>> drivers = {
      {"brownian", LevyTriplet::brownian(1.0)},
      {"gamma_subordinated", LevyTriplet::subordinated(SubordinatorSpec::gamma(2.0, 3.0))},
      {"compound_poisson", LevyTriplet::atoms({{-0.5, 2.0}, {0.5, 2.0}})},
      {"cp_subordinated", LevyTriplet::subordinated(SubordinatorSpec::compound_poisson(3.0, JumpLaw{2.0, 0.5}))}};
  std::vector<CheckLine> out;
  std::uint64_t stream = 10;
  for (const auto& [name, z] : drivers) {
    auto xs = integrals(z, f, N, opt, stream++);
    for (double& x : xs) x *= x;
    const Moments m = moments(xs);
    const double exact = second_moment_exact(z, f);
    const double se = std::sqrt(m.var / static_cast<double>(N));
    out.push_back(below(2, "second_moment_" + name, std::abs(m.mean - exact) / se, 4.0,
                        "empirical=" + format_double(m.mean) + " exact=" + format_double(exact)));
  }
  return out;
}

std::vector<CheckLine> subordinator_moments(const VerifyOptions& opt) {
  const std::size_t N = samples(opt, 100000);
  const Grid unit = Grid::over(0.0, 1.0, 1);
  std::vector<CheckLine> out;

  const double c = 2.0, rate = 3.0;
  const LevyTriplet wl = LevyTriplet::subordinated(SubordinatorSpec::gamma(c, rate));
  const auto paths = sample_driver_ensemble(wl, unit, N, SeedSequence(opt.seed).seed(20, 7), opt.threads);
  std::vector<double> x(N);
  for (std::size_t i = 0; i < N; ++i) x[i] = paths[i].values[1];
  const Moments m = moments(x);
  NeumaierSum m4;
  for (double v : x) m4 += std::pow(v - m.mean, 4);
  const double se = std::sqrt((m4.value() / N - m.var * m.var) / N);
  out.push_back(below(3, "gamma_var_WL1", std::abs(m.var - c / rate) / se, 3.0,
                      "empirical=" + format_double(m.var) + " exact=" + format_double(c / rate)));

  const double a = 0.7, p = 0.3;
  const auto ls = sample_subordinator_ensemble(SubordinatorSpec::stable(a, 1.0), unit, N,
                                               SeedSequence(opt.seed).seed(21, 7), opt.threads);
  std::vector<double> lp(N);
  for (std::size_t i = 0; i < N; ++i) lp[i] = std::pow(ls[i].values[1], p);
  const double emp = moments(lp).mean;
  const double exact = std::tgamma(1.0 - p / a) / std::tgamma(1.0 - p);
  out.push_back(below(3, "stable_moment_L1_0.3", std::abs(emp / exact - 1.0), 0.10,
                      "empirical=" + format_double(emp) + " exact=" + format_double(exact)));
  return out;
}

std::vector<GridPath> ensemble_paths(const LevyTriplet& z, const VerifyOptions& opt, std::uint64_t stream,
                                     std::size_t N) {
  const Grid grid = Grid::over(0.0, 1.0, 1024);
  const VolterraEnsemble e = build_ensemble(VolterraKernel::molchan_golosov(0.7), z, grid, N,
                                            SeedSequence(opt.seed).seed(stream, 7), opt.threads);
  std::vector<GridPath> out;
  out.reserve(e.paths.size());
  for (const auto& p : e.paths) out.push_back(p.path);
  return out;
}

std::vector<CheckLine> fbm_cov(const VerifyOptions& opt) {
  const double H = 0.7;
  const std::size_t N = samples(opt, 10000);
  const auto paths = ensemble_paths(LevyTriplet::brownian(1.0), opt, 30, N);
  const std::vector<std::size_t> probes = {205, 410, 614, 819, 1024};
  double worst = 0.0;
  std::string at;
  for (std::size_t a : probes) {
    for (std::size_t b : probes) {
      std::vector<double> prod(N);
      for (std::size_t i = 0; i < N; ++i) prod[i] = paths[i].values[a] * paths[i].values[b];
      const Moments m = moments(prod);
      const double s = paths[0].t(a), t = paths[0].t(b);
      const double exact = 0.5 * (std::pow(s, 2 * H) + std::pow(t, 2 * H) - std::pow(std::abs(t - s), 2 * H));
      const double z = std::abs(m.mean - exact) / std::sqrt(m.var / N);
      if (z > worst) {
        worst = z;
        at = "s=" + format_double(s) + " t=" + format_double(t);
      }
    }
  }
  std::vector<CheckLine> out;
  out.push_back(below(4, "fbm_cov_max_z", worst, 4.0, at));
  const HolderEstimate he = holder_exponent_estimate(paths, dyadic_lags(1024));
  out.push_back(below(4, "fbm_holder_slope", std::abs(he.exponent - H), 0.05, "H_hat=" + format_double(he.exponent)));
  return out;
}

std::vector<CheckLine> flpmg_scaling(const VerifyOptions& opt) {
  const double H = 0.7;
  const std::size_t N = samples(opt, 10000);
  const auto paths = ensemble_paths(LevyTriplet::atoms({{-1.0, 2.5}, {1.0, 2.5}}), opt, 31, N);
  const HolderEstimate he = holder_exponent_estimate(paths, dyadic_lags(1024));
  const double slope = 2.0 * he.exponent;
  return {below(5, "flpmg_variogram_slope", std::abs(slope - 2 * H), 0.1, "slope=" + format_double(slope))};
}

double rel_l2(const GridPath& got, const std::function<double(double)>& want, double lo, double hi) {
  NeumaierSum num, den;
  for (std::size_t i = 0; i <= got.steps(); ++i) {
    const double t = got.t(i);
    if (t < lo - 1e-12 || t > hi + 1e-12) continue;
    const double w = want(t);
    num += (got.values[i] - w) * (got.values[i] - w);
    den += w * w;
  }
  return std::sqrt(num.value() / den.value());
}

std::vector<CheckLine> frac_units(const VerifyOptions&) {
  const std::size_t n = std::size_t{1} << 12;
  const Grid grid = Grid::over(0.0, 1.0, n);
  double worst_i = 0.0, worst_d = 0.0;
  std::string at_i, at_d;
  for (double gam : {1.0, 2.0}) {
    for (double a : {0.3, 0.5, 0.7}) {
      for (Side side : {Side::Left, Side::Right}) {
        const bool left = side == Side::Left;
        // Distance to the base point.
        auto dist = [left](double x) { return left ? x : 1.0 - x; };
        const GridPath f = sample_function([&](double x) { return std::pow(dist(x), gam); }, grid);
        const GridPath I = frac_integral(f, {a, side});
        const GridPath D = frac_derivative_extrapolated(f, {a, side});
        const double ci = std::tgamma(gam + 1) / std::tgamma(gam + 1 + a);
        const double cd = std::tgamma(gam + 1) / std::tgamma(gam + 1 - a);
        const std::string tag = "gamma=" + format_double(gam) + " alpha=" + format_double(a) + (left ? " left" : " right");
        for (std::size_t i = 0; i <= I.steps(); ++i) {
          const double x = dist(I.t(i));
          if (x < 0.25) continue;
          const double e = std::abs(I.values[i] / (ci * std::pow(x, gam + a)) - 1.0);
          if (e > worst_i) worst_i = e, at_i = tag;
        }
        for (std::size_t i = 0; i <= D.steps(); ++i) {
          const double x = dist(D.t(i));
          if (x < 0.25) continue;
          const double e = std::abs(D.values[i] / (cd * std::pow(x, gam - a)) - 1.0);
          if (e > worst_d) worst_d = e, at_d = tag;
        }
      }
    }
  }
  std::vector<CheckLine> out;
  out.push_back(below(6, "power_law_integral_rel", worst_i, 1e-5, at_i + " on distance >= 1/4"));
  out.push_back(below(6, "power_law_derivative_rel", worst_d, 1e-5, at_d + " on distance >= 1/4"));

  auto fn = [](double x) { return std::sin(3.0 * x) + x * x; };
  const GridPath f = sample_function(fn, grid);
  double worst_inv = 0.0;
  for (double a : {0.3, 0.5, 0.7}) {
    const GridPath back = frac_derivative(frac_integral(f, {a, Side::Left}), {a, Side::Left});
    worst_inv = std::max(worst_inv, rel_l2(back, fn, 0.0, 1.0));
  }
  out.push_back(below(6, "derivative_of_integral_rel_l2", worst_inv, 1e-4));

  double worst_semi = 0.0;
  for (auto [a, b] : {std::pair{0.3, 0.4}, std::pair{0.5, 0.25}, std::pair{0.2, 0.7}}) {
    const GridPath ab = frac_integral(frac_integral(f, {b, Side::Left}), {a, Side::Left});
    const GridPath direct = frac_integral(f, {a + b, Side::Left});
    NeumaierSum num, den;
    for (std::size_t i = 0; i <= n; ++i) {
      num += (ab.values[i] - direct.values[i]) * (ab.values[i] - direct.values[i]);
      den += direct.values[i] * direct.values[i];
    }
    worst_semi = std::max(worst_semi, std::sqrt(num.value() / den.value()));
  }
  out.push_back(below(6, "semigroup_rel_l2", worst_semi, 1e-4));
  return out;
}

double weierstrass(double x, double H, double shift) {
  double s = 0.0;
  for (int k = 0; k <= 8; ++k) s += std::pow(2.0, -k * H) * std::sin(std::ldexp(2.3, k) * x + k + shift);
  return s;
}

std::vector<CheckLine> gls_vs_rs(const VerifyOptions&) {
  const std::size_t n = std::size_t{1} << 12;
  const Grid grid = Grid::over(0.0, 1.0, n);
  const GridPath f = sample_function([](double x) { return x; }, grid);
  const GridPath g = sample_function([](double x) { return x * x; }, grid);
  double worst = 0.0, lo = INFINITY, hi = -INFINITY;
  for (double a : {0.3, 0.5, 0.7}) {
    const double v = gls_integral(f, g, a).value;
    worst = std::max(worst, std::abs(v / (2.0 / 3.0) - 1.0));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  std::vector<CheckLine> out;
  out.push_back(below(7, "gls_smooth_rel", worst, 1e-3));
  out.push_back(below(7, "gls_alpha_band", hi - lo, 5e-3));

  const GridPath hf = sample_function([](double x) { return weierstrass(x, 0.6, 0.0); }, grid);
  const GridPath hg = sample_function([](double x) { return weierstrass(x, 0.8, 1.0); }, grid);
  const double rs = rs_integral(hf, hg, PartitionMode::Midpoint);
  const double gls = gls_integral(hf, hg, 0.4).value;
  out.push_back(below(7, "gls_rs_holder_pair_rel", std::abs(gls / rs - 1.0), 1e-2,
                      "gls=" + format_double(gls) + " rs=" + format_double(rs)));
  return out;
}

struct Case {
  double H, alpha;
};

double tidy(double x) { return std::round(x * 1e12) / 1e12; }

std::string case_tag(const Case& c) { return "H=" + format_double(c.H) + " alpha=" + format_double(c.alpha); }

IntegratorHypotheses example_one(const Case& c, const VerifyOptions& opt) {
  IntegratorHypotheses h;
  h.p = 2.0;
  h.alpha = c.alpha;
  h.kernel = VolterraKernel::example_one_unit(c.H);
  h.E = EProfile::linear(1.0);
  h.noise = LevyTriplet::brownian(1.0);
  h.resolution = opt.resolution;
  return h;
}

std::string divergent_names(const ConditionReport& r) {
  std::string s;
  for (const auto& e : r.entries) {
    if (!e.finite) s += (s.empty() ? "" : ",") + e.name;
  }
  return s.empty() ? "none" : s;
}

std::vector<CheckLine> conditions_matrix(const VerifyOptions& opt) {
  std::vector<Case> above, under;
  for (double H : {0.6, 0.7, 0.9}) {
    above.push_back({H, tidy(1.0 - H + 0.1)});
    above.push_back({H, 0.9});
    under.push_back({H, tidy(1.0 - H - 0.1)});
  }
  double d2_bad = 0, dp_bad = 0, under_bad = 0, mismatch = 0;
  std::string d2_detail, dp_detail, under_detail, mismatch_detail;
  auto note = [](std::string& s, const std::string& x) { s += (s.empty() ? "" : "; ") + x; };
  auto compare = [&](const Case& c, const ConditionReport& d2, const ConditionReport& dp) {
    for (std::size_t i = 0; i < std::min(d2.entries.size(), dp.entries.size()); ++i) {
      if (d2.entries[i].finite != dp.entries[i].finite) {
        ++mismatch;
        note(mismatch_detail, case_tag(c) + " item " + std::to_string(i + 1));
      }
    }
  };
  for (const Case& c : above) {
    const auto h = example_one(c, opt);
    const ConditionReport d2 = check_D2(h);
    const ConditionReport dp = check_Dp(h);
    if (!d2.verdict) ++d2_bad, note(d2_detail, case_tag(c) + " divergent " + divergent_names(d2));
    if (!dp.verdict) ++dp_bad, note(dp_detail, case_tag(c) + " divergent " + divergent_names(dp));
    compare(c, d2, dp);
  }
  for (const Case& c : under) {
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) {
      note(under_detail, case_tag(c) + " skipped, alpha outside (0,1)");
      continue;
    }
    const auto h = example_one(c, opt);
    const ConditionReport d2 = check_D2(h);
    const ConditionReport dp = check_Dp(h);
    if (d2.verdict && dp.verdict) ++under_bad;
    note(under_detail, case_tag(c) + " D2:" + divergent_names(d2) + " Dp:" + divergent_names(dp));
    compare(c, d2, dp);
  }
  std::vector<CheckLine> out;
  out.push_back(below(8, "D2_all_finite_above_threshold", d2_bad, 0.0, d2_detail.empty() ? "all finite" : d2_detail));
  out.push_back(below(8, "Dp2_all_finite_above_threshold", dp_bad, 0.0, dp_detail.empty() ? "all finite" : dp_detail));
  out.push_back(below(8, "divergent_entry_below_threshold", under_bad, 0.0, under_detail));

  IntegratorHypotheses h;
  h.alpha = 0.9;
  h.kernel = VolterraKernel::molchan_golosov(0.5);
  h.noise = LevyTriplet::brownian(1.0);
  h.E = EProfile::linear(1.0);
  h.continuous_martingale = true;
  h.resolution = opt.resolution;
  const ConditionReport fast = check_Dinf(h, {0.45, 4.0, true});
  const ConditionReport quad = check_Dinf(h, {0.45, 4.0, false});
  const ConditionReport over = check_Dinf(h, {0.6, 4.0, false});
  const double dinf_bad = (fast.verdict ? 0 : 1) + (quad.verdict ? 0 : 1) + (over.verdict ? 1 : 0);
  out.push_back(below(8, "Dinf_unit_kernel_beta_split", dinf_bad, 0.0,
                      "beta=0.45 fast:" + std::string(fast.verdict ? "finite" : "divergent") +
                          " quadrature:" + (quad.verdict ? "finite" : "divergent") +
                          "; beta=0.6:" + (over.verdict ? "finite" : "divergent")));
  out.push_back(below(8, "D2_equals_Dp2_itemwise", mismatch, 0.0, mismatch_detail.empty() ? "identical" : mismatch_detail));
  return out;
}

std::vector<CheckLine> example1(const VerifyOptions& opt) {
  std::vector<CheckLine> out;
  const FracIdentityReport id =
      frac_integral_identity(0.7, {{0.5, 1.0}, {0.2, 1.0}, {0.9, 1.0}, {0.1, 0.3}, {1.0, 3.0}, {0.25, 0.75}});
  out.push_back(below(9, "identity_constant_spread", id.max_rel_spread, 1e-3,
                      "constant=" + format_double(id.probes.front().constant)));
  double worst_law = 0.0, worst_flat = 0.0;
  for (Case c : {Case{0.7, 0.5}, Case{0.6, 0.6}}) {
    const J12Reduction r = j12_reduction(c.H, c.alpha, {0.5, 1.0, 2.0}, opt.resolution);
    const double expect = std::pow(2.0, 2 * c.H + 2 * c.alpha - 1);
    for (std::size_t i = 0; i + 1 < r.j12.size(); ++i) {
      worst_law = std::max(worst_law, std::abs(r.j12[i + 1] / r.j12[i] / expect - 1.0));
    }
    worst_flat = std::max(worst_flat, r.max_rel_spread);
  }
  out.push_back(below(9, "J12_doubling_power_law", worst_law, 1e-6));
  out.push_back(below(9, "J12_reduction_ratio_spread", worst_flat, 1e-6));
  return out;
}

}  // namespace

bool SuiteResult::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckLine& c) { return c.pass; });
}

std::string SuiteResult::to_json() const {
  nlohmann::json j;
  j["suite"] = suite;
  j["pass"] = pass();
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json e{{"criterion", c.criterion}, {"name", c.name}, {"pass", c.pass}, {"bound", c.bound},
                     {"detail", c.detail}};
    e["value"] = std::isfinite(c.value) ? nlohmann::json(c.value) : nlohmann::json(nullptr);
    j["checks"].push_back(e);
  }
  return j.dump(2);
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"cf-match",  "second-moment", "subordinator-moments",
                                                 "fbm-cov",   "frac-units",    "gls-vs-rs",
                                                 "conditions-matrix"};
  return names;
}

const std::vector<int>& suite_criteria(const std::string& suite) {
  static const std::map<std::string, std::vector<int>> table = {
      {"cf-match", {1}},  {"second-moment", {2}}, {"subordinator-moments", {3}}, {"fbm-cov", {4, 5}},
      {"frac-units", {6}}, {"gls-vs-rs", {7}},    {"conditions-matrix", {8, 9}}};
  const auto it = table.find(suite);
  if (it == table.end()) throw std::invalid_argument("unknown suite: " + suite);
  return it->second;
}

std::vector<CheckLine> run_criterion(int criterion, const VerifyOptions& opt) {
  switch (criterion) {
    case 1: return cf_match(opt);
    case 2: return second_moment(opt);
    case 3: return subordinator_moments(opt);
    case 4: return fbm_cov(opt);
    case 5: return flpmg_scaling(opt);
    case 6: return frac_units(opt);
    case 7: return gls_vs_rs(opt);
    case 8: return conditions_matrix(opt);
    case 9: return example1(opt);
    default: throw std::invalid_argument("no criterion " + std::to_string(criterion));
  }
}

SuiteResult run_suite(const std::string& suite, const VerifyOptions& opt) {
  SuiteResult r;
  r.suite = suite;
  for (int c : suite_criteria(suite)) {
    auto lines = run_criterion(c, opt);
    r.checks.insert(r.checks.end(), lines.begin(), lines.end());
  }
  return r;
}

}  // namespace fracvolt
