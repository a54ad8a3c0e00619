#include "fracvolt/stochastic_integral.hpp"

#include <algorithm>
#include <stdexcept>

#include <json.hpp>

namespace fracvolt {
namespace {

DyadicOptions pi_opts() {
  DyadicOptions o;
  o.min_levels = 6;
  o.max_levels = 90;
  o.rel_tol = 1e-12;
  return o;
}

double checked(const DyadicResult& r, const char* what) {
  if (r.divergent) throw NumericalError(what, r.value, r.trace);
  return r.value;
}

// E[(c N^2) ^ 1] for a standard normal N.
double truncated_gauss_square(double c) {
  if (c <= 0.0) return 0.0;
  const double k = 1.0 / std::sqrt(c);
  const double phi = std::exp(-0.5 * k * k) / std::sqrt(2.0 * M_PI);
  return c * (std::erf(k / M_SQRT2) - 2.0 * k * phi) + std::erfc(k / M_SQRT2);
}

// int (|xu|^2 ^ 1) pi(dx)
double truncated_quadratic(const LevyTriplet& tr, double u) {
  const double u2 = u * u;
  const auto& kind = tr.levy_measure.kind();
  if (const auto* a = std::get_if<AtomsMeasure>(&kind)) {
    NeumaierSum s;
    for (const Atom& x : a->atoms) s += x.mass * std::min(x.location * x.location * u2, 1.0);
    return s.value();
  }
  if (const auto* sm = std::get_if<SubordinatedMeasure>(&kind)) {
    const SubordinatorSpec& sub = sm->subordinator;
    return checked(half_line_peaked([&](double s) { return truncated_gauss_square(u2 * s) * sub.nu_density(s); }, 1.0 / u2,
                             pi_opts()),
                   "r(u): subordinator quadrature diverged");
  }
  const auto& d = std::get<DensityMeasure>(kind);
  auto both = [&](double x) { return d.density(x) + d.density(-x); };
  const double k = 1.0 / std::abs(u);
  const double inner = checked(dyadic_left([&](double x) { return u2 * x * x * both(x); }, 0.0, k, pi_opts()),
                               "r(u): small-jump quadrature diverged");
  const double outer = checked(doubling_tail(both, k, k, pi_opts()), "r(u): large-jump quadrature diverged");
  return inner + outer;
}

// b u + int (tau(xu) - tau(x) u) pi(dx)
double drift_functional(const LevyTriplet& tr, double u) {
  const double base = tr.drift_b * u;
  const auto& kind = tr.levy_measure.kind();
  if (const auto* a = std::get_if<AtomsMeasure>(&kind)) {
    NeumaierSum s;
    s += base;
    for (const Atom& x : a->atoms) s += x.mass * (truncate_jump(x.location * u) - truncate_jump(x.location) * u);
    return s.value();
  }
  if (tr.levy_measure.symmetric()) return base;
  const auto& d = std::get<DensityMeasure>(kind);
  auto odd = [&](double x) { return (truncate_jump(x * u) - truncate_jump(x) * u) * (d.density(x) - d.density(-x)); };
  return base + checked(half_line(odd, 1.0, pi_opts()), "compensator quadrature diverged");
}

// int (x - tau(x)) pi(dx)
double large_jump_mean(const LevyTriplet& tr) {
  const auto& kind = tr.levy_measure.kind();
  if (const auto* a = std::get_if<AtomsMeasure>(&kind)) {
    NeumaierSum s;
    for (const Atom& x : a->atoms) s += x.mass * (x.location - truncate_jump(x.location));
    return s.value();
  }
  if (tr.levy_measure.symmetric()) return 0.0;
  const auto& d = std::get<DensityMeasure>(kind);
  return checked(doubling_tail([&](double x) { return (x - 1.0) * (d.density(x) - d.density(-x)); }, 1.0, 1.0,
                               pi_opts()),
                 "large-jump mean diverged");
}

}  // namespace

DeterministicFunction DeterministicFunction::step(std::vector<double> breakpoints, std::vector<double> levels) {
  DeterministicFunction f;
  f.kind_ = Kind::Step;
  f.breaks_ = std::move(breakpoints);
  f.levels_ = std::move(levels);
  f.T_ = f.breaks_.empty() ? 0.0 : f.breaks_.back();
  f.validate();
  return f;
}

DeterministicFunction DeterministicFunction::constant(double c, double T) { return step({0.0, T}, {c}); }

DeterministicFunction DeterministicFunction::callable(std::function<double(double)> fn, double T,
                                                      std::map<double, double> lp_norms,
                                                      std::optional<double> holder_exponent) {
  DeterministicFunction f;
  f.kind_ = Kind::Callable;
  f.fn_ = std::move(fn);
  f.T_ = T;
  f.breaks_ = {0.0, T};
  f.levels_.clear();
  f.lp_norms_ = std::move(lp_norms);
  f.holder_ = holder_exponent;
  f.validate();
  return f;
}

void DeterministicFunction::validate() const {
  if (!(T_ > 0.0) || !std::isfinite(T_)) throw std::invalid_argument("integrand domain [0,T] needs T > 0");
  if (kind_ == Kind::Step) {
    if (breaks_.size() != levels_.size() + 1 || levels_.empty())
      throw std::invalid_argument("step function needs one more breakpoint than levels");
    if (breaks_.front() != 0.0) throw std::invalid_argument("step breakpoints start at 0");
    for (std::size_t k = 1; k < breaks_.size(); ++k)
      if (!(breaks_[k] > breaks_[k - 1])) throw std::invalid_argument("step breakpoints must increase strictly");
    for (double l : levels_)
      if (!std::isfinite(l)) throw std::invalid_argument("step levels must be finite");
    return;
  }
  if (!fn_) throw std::invalid_argument("callable integrand is empty");
  for (const auto& [p, norm] : lp_norms_) {
    const double q = std::pow(lp_power(p), 1.0 / p);
    if (std::abs(q - norm) > 1e-6 * std::max(std::abs(norm), 1e-300))
      throw std::invalid_argument("annotated L_" + std::to_string(p) + " norm does not match quadrature");
  }
}

double DeterministicFunction::operator()(double s) const {
  if (s < 0.0 || s > T_) return 0.0;
  if (kind_ == Kind::Callable) return fn_(s);
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), s);
  const auto k = static_cast<std::size_t>(it - breaks_.begin());
  return levels_[std::min(k, levels_.size()) - 1];
}

double DeterministicFunction::lp_power(double p) const {
  return time_integral([p](double v) { return std::pow(std::abs(v), p); });
}

double DeterministicFunction::integral() const {
  return time_integral([](double v) { return v; });
}

DeterministicFunction DeterministicFunction::scaled(double c) const {
  DeterministicFunction g = *this;
  if (kind_ == Kind::Step) {
    for (double& l : g.levels_) l *= c;
  } else {
    g.fn_ = [fn = fn_, c](double s) { return c * fn(s); };
    for (auto& [p, norm] : g.lp_norms_) norm *= std::abs(c);
  }
  return g;
}

double r_function(const LevyTriplet& triplet, double u) {
  if (u == 0.0) return 0.0;
  double r = triplet.diffusion_a * u * u;
  if (!triplet.levy_measure.is_zero()) r += truncated_quadratic(triplet, u);
  return r + std::abs(triplet.levy_measure.is_zero() ? triplet.drift_b * u : drift_functional(triplet, u));
}

RCriterion r_criterion(const LevyTriplet& triplet, const DeterministicFunction& f) {
  RCriterion out;
  if (f.kind() == DeterministicFunction::Kind::Step) {
    out.value = f.time_integral([&](double u) { return r_function(triplet, u); });
    return out;
  }
  DyadicOptions opt;
  opt.rel_tol = 1e-11;
  opt.min_levels = 3;
  DyadicResult r = dyadic_both([&](double s) { return r_function(triplet, f(s)); }, 0.0, f.T(), opt);
  out.trace = r.trace;
  if (r.divergent) {
    out.value = std::numeric_limits<double>::infinity();
    out.integrable = false;
    return out;
  }
  if (!r.converged) throw NumericalError("r-criterion quadrature did not converge", r.value, r.trace);
  out.value = r.value;
  return out;
}

double integrate_deterministic(const DeterministicFunction& f, const GridPath& Z) {
  Z.validate();
  const double slack = 1e-12 * std::max(1.0, f.T());
  if (Z.t0 < -slack || Z.t_end() > f.T() + slack)
    throw std::invalid_argument("path time span lies outside the integrand domain [0,T]");
  NeumaierSum s;
  for (std::size_t j = 0; j + 1 < Z.values.size(); ++j) s += f(Z.t(j)) * (Z.values[j + 1] - Z.values[j]);
  return s.value();
}

std::complex<double> levy_exponent(const LevyTriplet& triplet, double mu) {
  if (const SubordinatorSpec* sub = triplet.subordinator()) return {subordinated_exponent(*sub, mu), 0.0};
  return characteristic_exponent(triplet, mu);
}

double IntegralLawSpec::pushforward(const std::function<double(double)>& h) const {
  const auto& kind = triplet.levy_measure.kind();
  return f.time_integral([&](double u) -> double {
    if (u == 0.0) return 0.0;
    if (const auto* a = std::get_if<AtomsMeasure>(&kind)) {
      NeumaierSum s;
      for (const Atom& x : a->atoms) s += x.mass * h(u * x.location);
      return s.value();
    }
    auto both = [&](double x) {
      return h(u * x) * triplet.levy_measure.density(x) + h(-u * x) * triplet.levy_measure.density(-x);
    };
    return checked(half_line(both, 1.0, pi_opts()), "pushforward quadrature diverged");
  });
}

std::complex<double> IntegralLawSpec::log_cf(double lambda) const {
  if (lambda == 0.0) return {0.0, 0.0};
  return f.time_integral([&](double u) { return levy_exponent(triplet, lambda * u); });
}

IntegralLawSpec integral_law(const LevyTriplet& triplet, const DeterministicFunction& f) {
  const RCriterion rc = r_criterion(triplet, f);
  if (!rc.integrable) throw PreconditionError("z_integrable", "integrand is not Z-integrable");
  IntegralLawSpec law{0.0, 0.0, triplet, f};
  law.a_f = triplet.diffusion_a * f.lp_power(2.0);
  law.b_f = triplet.levy_measure.is_zero() ? triplet.drift_b * f.integral()
                                           : f.time_integral([&](double u) { return drift_functional(triplet, u); });
  return law;
}

double second_moment_general(const LevyTriplet& triplet, const DeterministicFunction& f) {
  double pi2 = 0.0;
  double mean = 0.0;
  if (!triplet.levy_measure.is_zero()) {
    const MomentResult m = pi_abs_moment(triplet, 2.0);
    if (!m.finite) throw PreconditionError("finite_second_moment", "int x^2 pi(dx) is infinite");
    pi2 = m.value;
    mean = large_jump_mean(triplet);
  }
  const double intf = f.integral();
  const double shift = triplet.drift_b + mean;
  return intf * intf * shift * shift + f.lp_power(2.0) * (triplet.diffusion_a + pi2);
}

double second_moment_exact(const LevyTriplet& triplet, const DeterministicFunction& f) {
  if (triplet.drift_b != 0.0 || !triplet.levy_measure.symmetric())
    throw PreconditionError("b0_symmetric", "exact second moment needs b = 0 and symmetric pi");
  return second_moment_general(triplet, f);
}

MomentBoundTerms moment_bound_rhs(const LevyTriplet& triplet, const DeterministicFunction& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("moment bound needs p >= 1");
  MomentBoundTerms t;
  t.p = p;
  if (!triplet.levy_measure.is_zero()) {
    const MomentResult m = pi_abs_moment(triplet, p);
    t.pi_moment = m.value;
    t.pi_moment_finite = m.finite;
    t.pi_moment_large_jumps = m.large_jumps;
    t.pi_moment_large_finite = m.large_finite;
  }
  const double fp = f.lp_power(p);
  t.lp_term = (fp == 0.0 || t.pi_moment == 0.0) ? 0.0 : fp * t.pi_moment;
  t.diffusion_term = std::pow(triplet.diffusion_a, 0.5 * p) * std::pow(f.lp_power(2.0), 0.5 * p);
  t.drift_term = std::pow(std::abs(triplet.drift_b), p) * std::pow(f.lp_power(1.0), p);

  const bool sym = triplet.levy_measure.symmetric();
  const bool a0 = triplet.diffusion_a == 0.0;
  const bool b0 = triplet.drift_b == 0.0;
  t.apr1 = p < 2.0 && a0 && b0 && sym && t.pi_moment_finite;
  t.apr2 = p >= 2.0 && b0 && sym && t.pi_moment_finite;
  t.with_drift = !b0 && sym && t.pi_moment_finite && (p >= 2.0 || a0);
  t.applicable = t.apr1 || t.apr2 || t.with_drift;
  t.total = t.applicable ? t.lp_term + t.diffusion_term + (t.with_drift ? t.drift_term : 0.0)
                         : std::numeric_limits<double>::infinity();
  return t;
}

MomentScalingReport verify_moment_scaling(const LevyTriplet& triplet, const DeterministicFunction& f, double p,
                                          std::size_t n_paths, std::uint64_t seed, const MomentScalingOptions& opt) {
  if (n_paths < 2) throw std::invalid_argument("moment scaling needs at least two paths");
  MomentScalingReport rep;
  rep.terms = moment_bound_rhs(triplet, f, p);
  if (!rep.terms.applicable) throw PreconditionError("moment_bound", "no moment bound applies to this triplet and p");
  rep.hypotheses = rep.terms.apr1 ? "apr1" : (rep.terms.apr2 ? "apr2" : "with_drift");
  if (!triplet.levy_measure.is_zero()) rep.heavy_tail_warning = !pi_abs_moment(triplet, 2.0 * p).finite;

  const Grid grid = Grid::over(0.0, f.T(), opt.steps);
  const auto sampler = make_driver_sampler(triplet, grid);
  const SeedSequence root(seed);
  std::vector<double> vals(n_paths);
  for (std::size_t ci = 0; ci < opt.scales.size(); ++ci) {
    const double c = opt.scales[ci];
    const DeterministicFunction fc = f.scaled(c);
    const SeedSequence seq(root.seed(ci, 3));
    parallel_for(n_paths, opt.threads, [&](std::size_t i) {
      vals[i] = std::pow(std::abs(integrate_deterministic(fc, sampler(seq.seed(i)))), p);
    });
    NeumaierSum s1;
    for (double v : vals) s1 += v;
    const double mean = s1.value() / static_cast<double>(n_paths);
    NeumaierSum s2;
    for (double v : vals) s2 += (v - mean) * (v - mean);
    const double var = s2.value() / static_cast<double>(n_paths - 1);

    MomentScalingPoint pt;
    pt.scale = c;
    pt.moment = mean;
    pt.stderr_ = std::sqrt(var / static_cast<double>(n_paths));
    pt.rhs = moment_bound_rhs(triplet, fc, p).total;
    pt.ratio = pt.moment / pt.rhs;
    pt.ratio_stderr = pt.stderr_ / pt.rhs;
    if (p == 2.0) {
      try {
        const double exact = second_moment_general(triplet, fc);
        pt.exact_ratio = pt.moment / exact;
        pt.exact_ratio_stderr = pt.stderr_ / exact;
      } catch (const PreconditionError&) {
      }
    }
    rep.ratio_curve.push_back(pt);
  }

  bool ok = true;
  for (std::size_t i = 0; i < rep.ratio_curve.size(); ++i) {
    const auto& a = rep.ratio_curve[i];
    if (!std::isfinite(a.ratio) || !(a.ratio > 0.0)) ok = false;
    for (std::size_t j = i + 1; j < rep.ratio_curve.size(); ++j) {
      const auto& b = rep.ratio_curve[j];
      const double se = std::hypot(a.ratio_stderr, b.ratio_stderr);
      if (std::abs(a.ratio - b.ratio) > opt.sigma * se) ok = false;
    }
  }
  rep.monotone_bounded = ok;
  return rep;
}

std::string MomentScalingReport::to_json() const {
  nlohmann::json j;
  j["hypotheses"] = {{"bound", hypotheses},       {"apr1", terms.apr1},
                     {"apr2", terms.apr2},        {"with_drift", terms.with_drift},
                     {"applicable", terms.applicable}, {"heavy_tail_warning", heavy_tail_warning}};
  j["terms"] = {{"p", terms.p},
                {"lp_term", terms.lp_term},
                {"diffusion_term", terms.diffusion_term},
                {"drift_term", terms.drift_term},
                {"pi_moment", terms.pi_moment_finite ? nlohmann::json(terms.pi_moment) : nlohmann::json("inf")},
                {"pi_moment_large_jumps", terms.pi_moment_large_finite ? nlohmann::json(terms.pi_moment_large_jumps)
                                                                       : nlohmann::json("inf")},
                {"total", terms.total}};
  nlohmann::json curve = nlohmann::json::array();
  nlohmann::json errs = nlohmann::json::array();
  for (const auto& pt : ratio_curve) {
    nlohmann::json e = {{"scale", pt.scale}, {"moment", pt.moment}, {"rhs", pt.rhs},
                        {"ratio", pt.ratio}, {"ratio_stderr", pt.ratio_stderr}};
    if (pt.exact_ratio) {
      e["exact_ratio"] = *pt.exact_ratio;
      e["exact_ratio_stderr"] = *pt.exact_ratio_stderr;
    }
    curve.push_back(e);
    errs.push_back(pt.stderr_);
  }
  j["empirical_moments"] = curve;
  j["standard_errors"] = errs;
  j["verdict"] = monotone_bounded ? "pass" : "fail";
  return j.dump(2);
}

}  // namespace fracvolt
