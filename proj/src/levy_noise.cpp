#include "fracvolt/levy_noise.hpp"

#include <sstream>
#include <stdexcept>

#include "fracvolt/numerics.hpp"

namespace fracvolt {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

DyadicOptions measure_opts() {
  DyadicOptions o;
  o.min_levels = 6;
  o.max_levels = 90;
  o.rel_tol = 1e-13;
  return o;
}

double stable_nu_constant(const StableFamily& s) { return s.c1 * s.alpha / std::tgamma(1.0 - s.alpha); }

template <class H>
DyadicResult nu_integral(const SubordinatorSpec& sub, H&& h, double scale = 1.0) {
  return half_line_peaked([&](double x) { return h(x) * sub.nu_density(x); }, scale, measure_opts());
}

[[noreturn]] void throw_divergent(const std::string& what, const DyadicResult& r) {
  throw NumericalError(what, r.value, r.trace);
}

}  // namespace

double JumpLaw::density(double x) const {
  if (x <= 0.0) return 0.0;
  return std::exp((shape - 1.0) * std::log(x) - x / scale - std::lgamma(shape) - shape * std::log(scale));
}

double JumpLaw::sample(std::mt19937_64& rng) const {
  std::gamma_distribution<double> d(shape, scale);
  return d(rng);
}

SubordinatorSpec SubordinatorSpec::gamma(double c, double rate, double drift) {
  SubordinatorSpec s{drift, GammaFamily{c, rate}};
  s.validate();
  return s;
}

SubordinatorSpec SubordinatorSpec::stable(double alpha, double c1, double drift) {
  SubordinatorSpec s{drift, StableFamily{alpha, c1}};
  s.validate();
  return s;
}

SubordinatorSpec SubordinatorSpec::compound_poisson(double rate, JumpLaw jumps, double drift) {
  SubordinatorSpec s{drift, CompoundPoissonFamily{rate, jumps}};
  s.validate();
  return s;
}

SubordinatorSpec SubordinatorSpec::custom(std::function<double(double)> density, double drift, std::string name) {
  SubordinatorSpec s{drift, CustomNuFamily{std::move(density), std::move(name)}};
  s.validate();
  return s;
}

SubordinatorSpec SubordinatorSpec::deterministic(double drift) {
  SubordinatorSpec s{drift, CompoundPoissonFamily{0.0, JumpLaw{}}};
  s.validate();
  return s;
}

double SubordinatorSpec::nu_density(double x) const {
  if (x <= 0.0) return 0.0;
  return std::visit(overloaded{
                        [x](const GammaFamily& g) { return g.c * std::exp(-g.rate * x) / x; },
                        [x](const StableFamily& s) { return stable_nu_constant(s) * std::pow(x, -1.0 - s.alpha); },
                        [x](const CompoundPoissonFamily& cp) { return cp.rate * cp.jumps.density(x); },
                        [x](const CustomNuFamily& c) { return c.density(x); },
                    },
                    family);
}

double SubordinatorSpec::total_mass() const {
  return std::visit(overloaded{
                        [](const GammaFamily&) { return std::numeric_limits<double>::infinity(); },
                        [](const StableFamily&) { return std::numeric_limits<double>::infinity(); },
                        [](const CompoundPoissonFamily& cp) { return cp.rate; },
                        [this](const CustomNuFamily&) {
                          DyadicResult r = nu_integral(*this, [](double) { return 1.0; });
                          return r.divergent ? std::numeric_limits<double>::infinity() : r.value;
                        },
                    },
                    family);
}

std::string SubordinatorSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&](const GammaFamily& g) { os << "gamma(c=" << g.c << ",rate=" << g.rate << ")"; },
                 [&](const StableFamily& s) { os << "stable(alpha=" << s.alpha << ",c1=" << s.c1 << ")"; },
                 [&](const CompoundPoissonFamily& cp) {
                   os << "compound_poisson(rate=" << cp.rate << ",jump_shape=" << cp.jumps.shape
                      << ",jump_scale=" << cp.jumps.scale << ")";
                 },
                 [&](const CustomNuFamily& c) { os << "custom(" << c.name << ")"; },
             },
             family);
  if (drift != 0.0) os << "+drift(" << drift << ")";
  return os.str();
}

void SubordinatorSpec::validate() const {
  if (!(drift >= 0.0)) throw std::invalid_argument("subordinator drift must be nonnegative");
  std::visit(overloaded{
                 [](const GammaFamily& g) {
                   if (!(g.c > 0.0) || !(g.rate > 0.0)) throw std::invalid_argument("gamma subordinator needs c, rate > 0");
                 },
                 [](const StableFamily& s) {
                   if (!(s.alpha > 0.0 && s.alpha < 1.0)) throw std::invalid_argument("stable index must lie in (0,1)");
                   if (!(s.c1 > 0.0)) throw std::invalid_argument("stable scale must be positive");
                 },
                 [](const CompoundPoissonFamily& cp) {
                   if (!(cp.rate >= 0.0)) throw std::invalid_argument("compound Poisson rate must be nonnegative");
                   if (!(cp.jumps.shape > 0.0) || !(cp.jumps.scale > 0.0))
                     throw std::invalid_argument("jump law needs positive shape and scale");
                 },
                 [this](const CustomNuFamily& c) {
                   if (!c.density) throw std::invalid_argument("custom subordinator needs a density");
                   DyadicResult r = nu_integral(*this, [](double x) { return std::min(x, 1.0); });
                   if (r.divergent) throw std::invalid_argument("custom nu: integral of min(x,1) diverges");
                 },
             },
             family);
}

LevyMeasureSpec::LevyMeasureSpec(Kind k) : kind_(std::move(k)), cache_(std::make_shared<Cache>()) {}

bool LevyMeasureSpec::is_zero() const {
  if (const auto* a = std::get_if<AtomsMeasure>(&kind_)) return a->atoms.empty();
  if (const auto* s = std::get_if<SubordinatedMeasure>(&kind_)) {
    const auto* cp = std::get_if<CompoundPoissonFamily>(&s->subordinator.family);
    return cp && cp->rate == 0.0;
  }
  return false;
}

bool LevyMeasureSpec::symmetric() const {
  return std::visit(overloaded{
                        [](const AtomsMeasure& a) {
                          for (const Atom& x : a.atoms) {
                            bool found = false;
                            for (const Atom& y : a.atoms) {
                              if (y.location == -x.location && y.mass == x.mass) found = true;
                            }
                            if (!found) return false;
                          }
                          return true;
                        },
                        [](const DensityMeasure& d) { return d.symmetric; },
                        [](const SubordinatedMeasure&) { return true; },
                    },
                    kind_);
}

double LevyMeasureSpec::density(double x) const {
  if (const auto* d = std::get_if<DensityMeasure>(&kind_)) return d->density(x);
  if (const auto* s = std::get_if<SubordinatedMeasure>(&kind_)) return induced_density(s->subordinator, x);
  throw std::logic_error("atomic Levy measure has no density");
}

MomentResult LevyMeasureSpec::moment(double p, const std::function<MomentResult(double)>& compute) const {
  {
    std::lock_guard lock(cache_->mu);
    auto it = cache_->moments.find(p);
    if (it != cache_->moments.end()) return it->second;
  }
  MomentResult r = compute(p);
  std::lock_guard lock(cache_->mu);
  return cache_->moments.emplace(p, std::move(r)).first->second;
}

LevyTriplet LevyTriplet::brownian(double a) {
  LevyTriplet t{a, 0.0, LevyMeasureSpec{}};
  t.validate();
  return t;
}

LevyTriplet LevyTriplet::atoms(std::vector<Atom> atoms, double a, double b) {
  LevyTriplet t{a, b, LevyMeasureSpec(AtomsMeasure{std::move(atoms)})};
  t.validate();
  return t;
}

LevyTriplet LevyTriplet::density(DensityMeasure m, double a, double b) {
  LevyTriplet t{a, b, LevyMeasureSpec(std::move(m))};
  t.validate();
  return t;
}

LevyTriplet LevyTriplet::subordinated(SubordinatorSpec sub) {
  const double a = sub.drift;
  LevyTriplet t{a, 0.0, LevyMeasureSpec(SubordinatedMeasure{std::move(sub)})};
  t.validate();
  return t;
}

const SubordinatorSpec* LevyTriplet::subordinator() const {
  if (const auto* s = std::get_if<SubordinatedMeasure>(&levy_measure.kind())) return &s->subordinator;
  return nullptr;
}

void LevyTriplet::validate() const {
  if (!(diffusion_a >= 0.0)) throw std::invalid_argument("diffusion coefficient must be nonnegative");
  std::visit(overloaded{
                 [](const AtomsMeasure& a) {
                   for (const Atom& x : a.atoms) {
                     if (!(x.mass > 0.0)) throw std::invalid_argument("atoms need positive mass");
                     if (x.location == 0.0 || !std::isfinite(x.location))
                       throw std::invalid_argument("atoms need finite nonzero locations");
                   }
                 },
                 [](const DensityMeasure& d) {
                   if (!d.density) throw std::invalid_argument("density measure needs a density");
                   auto both = [&](double x) { return std::min(x * x, 1.0) * (d.density(x) + d.density(-x)); };
                   DyadicResult r = half_line(both, 1.0, measure_opts());
                   if (r.divergent) throw std::invalid_argument("Levy density: integral of min(x^2,1) diverges");
                   if (d.symmetric) {
                     for (double x : {1e-3, 0.1, 0.5, 1.0, 1.3, 2.0, 10.0}) {
                       const double l = d.density(x), rr = d.density(-x);
                       if (std::abs(l - rr) > 1e-12 * std::max(std::abs(l), std::abs(rr)))
                         throw std::invalid_argument("density flagged symmetric is not symmetric");
                     }
                   }
                   if (d.jump_sampler && !std::isfinite(d.total_mass))
                     throw std::invalid_argument("a jump sampler needs a finite total mass");
                 },
                 [this](const SubordinatedMeasure& s) {
                   s.subordinator.validate();
                   if (diffusion_a != s.subordinator.drift)
                     throw std::invalid_argument("subordinated triplet: diffusion must equal the subordinator drift");
                   if (drift_b != 0.0) throw std::invalid_argument("subordinated triplet has zero drift");
                 },
             },
             levy_measure.kind());
}

std::string LevyTriplet::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "triplet(a=" << diffusion_a << ",b=" << drift_b << ",pi=";
  std::visit(overloaded{
                 [&](const AtomsMeasure& a) {
                   os << "atoms[";
                   for (std::size_t i = 0; i < a.atoms.size(); ++i)
                     os << (i ? ";" : "") << a.atoms[i].location << ":" << a.atoms[i].mass;
                   os << "]";
                 },
                 [&](const DensityMeasure&) { os << "density"; },
                 [&](const SubordinatedMeasure& s) { os << "subordinated:" << s.subordinator.describe(); },
             },
             levy_measure.kind());
  os << ")";
  return os.str();
}

double laplace_exponent(const SubordinatorSpec& sub, double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("Laplace exponent needs lambda >= 0");
  if (lambda == 0.0) return 0.0;
  const double jumps = std::visit(
      overloaded{
          [&](const GammaFamily& g) { return g.c * std::log1p(lambda / g.rate); },
          [&](const StableFamily& s) { return s.c1 * std::pow(lambda, s.alpha); },
          [&](const CompoundPoissonFamily& cp) { return cp.rate * (1.0 - cp.jumps.laplace(lambda)); },
          [&](const CustomNuFamily&) {
            DyadicResult r = nu_integral(sub, [lambda](double x) { return -std::expm1(-lambda * x); }, 1.0 / lambda);
            if (r.divergent) throw_divergent("Laplace exponent quadrature diverged", r);
            return r.value;
          },
      },
      sub.family);
  return sub.drift * lambda + jumps;
}

double subordinated_exponent(const SubordinatorSpec& sub, double mu) { return -laplace_exponent(sub, 0.5 * mu * mu); }

double induced_density(const SubordinatorSpec& sub, double x) {
  if (x == 0.0) throw std::domain_error("induced density is evaluated away from 0");
  const double x2 = x * x;
  const double norm = 1.0 / std::sqrt(2.0 * M_PI);
  auto integrand = [&](double s) { return norm * std::exp(-0.5 * x2 / s - 0.5 * std::log(s)) * sub.nu_density(s); };
  DyadicResult r = half_line_peaked(integrand, x2, measure_opts());
  if (r.divergent) throw_divergent("induced density integral diverged", r);
  return r.value;
}

std::complex<double> characteristic_exponent(const LevyTriplet& triplet, double mu) {
  if (mu == 0.0) return {0.0, 0.0};
  std::complex<double> psi{-0.5 * triplet.diffusion_a * mu * mu, triplet.drift_b * mu};
  const auto& kind = triplet.levy_measure.kind();
  if (const auto* a = std::get_if<AtomsMeasure>(&kind)) {
    for (const Atom& x : a->atoms) {
      const double h = 0.5 * mu * x.location;
      psi += x.mass * std::complex<double>(-2.0 * std::sin(h) * std::sin(h),
                                           std::sin(mu * x.location) - mu * truncate_jump(x.location));
    }
    return psi;
  }
  DyadicOptions opt = measure_opts();
  opt.frequency = std::abs(mu);
  const bool symmetric = triplet.levy_measure.symmetric();
  auto rho = [&](double x) { return triplet.levy_measure.density(x); };
  auto re = [&](double x) {
    const double h = std::sin(0.5 * mu * x);
    return -2.0 * h * h * (symmetric ? 2.0 * rho(x) : rho(x) + rho(-x));
  };
  DyadicResult rr = half_line(re, 1.0, opt);
  if (rr.divergent) throw_divergent("characteristic exponent quadrature diverged", rr);
  psi += rr.value;
  if (!symmetric) {
    auto im = [&](double x) {
      const double odd = std::sin(mu * x) - mu * truncate_jump(x);
      return odd * (rho(x) - rho(-x));
    };
    DyadicResult ri = half_line(im, 1.0, opt);
    if (ri.divergent) throw_divergent("characteristic exponent quadrature diverged", ri);
    psi += std::complex<double>(0.0, ri.value);
  }
  return psi;
}

MomentResult pi_abs_moment(const LevyTriplet& triplet, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("pi_abs_moment needs p >= 1");
  const auto& kind = triplet.levy_measure.kind();
  if (const auto* a = std::get_if<AtomsMeasure>(&kind)) {
    MomentResult m;
    for (const Atom& x : a->atoms) {
      const double v = x.mass * std::pow(std::abs(x.location), p);
      (std::abs(x.location) <= 1.0 ? m.small_jumps : m.large_jumps) += v;
    }
    m.value = m.small_jumps + m.large_jumps;
    return m;
  }
  return triplet.levy_measure.moment(p, [&](double q) {
    const bool symmetric = triplet.levy_measure.symmetric();
    auto both = [&](double x) {
      const double d = symmetric ? 2.0 * triplet.levy_measure.density(x)
                                 : triplet.levy_measure.density(x) + triplet.levy_measure.density(-x);
      return std::pow(x, q) * d;
    };
    DyadicOptions opt = measure_opts();
    opt.rel_tol = 1e-11;
    DyadicResult small = dyadic_left(both, 0.0, 1.0, opt);
    DyadicResult large = doubling_tail(both, 1.0, 1.0, opt);
    MomentResult m;
    m.small_finite = !small.divergent;
    m.large_finite = !large.divergent;
    m.small_jumps = m.small_finite ? small.value : std::numeric_limits<double>::infinity();
    m.large_jumps = m.large_finite ? large.value : std::numeric_limits<double>::infinity();
    m.finite = m.small_finite && m.large_finite;
    m.value = m.finite ? m.small_jumps + m.large_jumps : std::numeric_limits<double>::infinity();
    m.trace = !m.small_finite ? small.trace : large.trace;
    return m;
  });
}

double effective_drift(const LevyTriplet& triplet) {
  const auto& kind = triplet.levy_measure.kind();
  if (const auto* a = std::get_if<AtomsMeasure>(&kind)) {
    NeumaierSum s;
    for (const Atom& x : a->atoms) s += x.mass * truncate_jump(x.location);
    return triplet.drift_b - s.value();
  }
  if (triplet.levy_measure.symmetric()) return triplet.drift_b;
  const auto& d = std::get<DensityMeasure>(kind);
  auto odd = [&](double x) { return truncate_jump(x) * (d.density(x) - d.density(-x)); };
  DyadicResult r = half_line(odd, 1.0, measure_opts());
  if (r.divergent) throw_divergent("compensator integral of the Levy density diverged", r);
  return triplet.drift_b - r.value;
}

SubordinatorConditions check_conditions_C_D(const SubordinatorSpec& sub) {
  SubordinatorConditions out;
  DyadicOptions opt = measure_opts();
  DyadicResult c = doubling_tail([&](double x) { return std::sqrt(x) * sub.nu_density(x); }, 1.0, 1.0, opt);
  DyadicResult d = doubling_tail([&](double x) { return x * sub.nu_density(x); }, 1.0, 1.0, opt);
  out.C = !c.divergent;
  out.D = !d.divergent;
  if (out.D) {
    DyadicResult small = dyadic_left([&](double x) { return x * sub.nu_density(x); }, 0.0, 1.0, opt);
    out.EL1 = sub.drift + small.value + d.value;
  }
  return out;
}

}  // namespace fracvolt
