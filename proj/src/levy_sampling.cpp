#include <algorithm>
#include <stdexcept>

#include "fracvolt/levy_noise.hpp"
#include "fracvolt/numerics.hpp"

namespace fracvolt {
namespace {

constexpr double kCustomCutoff = 1e-4;

// Tabulated jump law of nu restricted to [kCustomCutoff, inf), sampled by inverting
// the cumulative mass on a log grid.
struct TabulatedJumps {
  std::vector<double> x;
  std::vector<double> cum;  // mass of [x_0, x_k]
  double small_mean = 0.0;  // int_0^cutoff x nu(dx)

  double mass() const { return cum.back(); }

  double sample(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> u(0.0, mass());
    const double target = u(rng);
    auto it = std::upper_bound(cum.begin(), cum.end(), target);
    std::size_t k = std::clamp<std::size_t>(static_cast<std::size_t>(it - cum.begin()), 1, cum.size() - 1);
    const double w = (target - cum[k - 1]) / std::max(cum[k] - cum[k - 1], 1e-300);
    return std::exp(std::log(x[k - 1]) + w * (std::log(x[k]) - std::log(x[k - 1])));
  }
};

TabulatedJumps tabulate(const SubordinatorSpec& sub) {
  TabulatedJumps t;
  const double ratio = std::pow(2.0, 0.125);
  t.x.push_back(kCustomCutoff);
  t.cum.push_back(0.0);
  double x = kCustomCutoff;
  NeumaierSum acc;
  for (int k = 0; k < 2000; ++k) {
    const double next = x * ratio;
    const double piece = gauss_panel([&](double y) { return sub.nu_density(y); }, x, next);
    acc += piece;
    t.x.push_back(next);
    t.cum.push_back(acc.value());
    x = next;
    if (x > 1.0 && piece <= 1e-15 * acc.value()) break;
  }
  if (!(acc.value() > 0.0) || !std::isfinite(acc.value()))
    throw NumericalError("custom nu has no usable mass above the sampling cutoff", acc.value(), {});
  DyadicResult small = dyadic_left([&](double y) { return y * sub.nu_density(y); }, 0.0, kCustomCutoff);
  if (small.divergent) throw NumericalError("custom nu: small-jump mean diverged", small.value, small.trace);
  t.small_mean = small.value;
  return t;
}

double stable_unit(double alpha, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, M_PI);
  std::exponential_distribution<double> ex(1.0);
  double u = uni(rng);
  while (u == 0.0) u = uni(rng);
  const double e = ex(rng);
  return std::sin(alpha * u) / std::pow(std::sin(u), 1.0 / alpha) *
         std::pow(std::sin((1.0 - alpha) * u) / e, (1.0 - alpha) / alpha);
}

std::vector<double> subordinator_increments(const SubordinatorSpec& sub, const Grid& grid, std::mt19937_64& rng,
                                            const TabulatedJumps* table) {
  const double dt = grid.dt;
  std::vector<double> inc(grid.n, 0.0);
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, GammaFamily>) {
          std::gamma_distribution<double> g(f.c * dt, 1.0 / f.rate);
          for (double& d : inc) d = g(rng);
        } else if constexpr (std::is_same_v<T, StableFamily>) {
          const double scale = std::pow(f.c1 * dt, 1.0 / f.alpha);
          for (double& d : inc) d = scale * stable_unit(f.alpha, rng);
        } else if constexpr (std::is_same_v<T, CompoundPoissonFamily>) {
          if (f.rate == 0.0) return;
          std::poisson_distribution<long> pois(f.rate * dt);
          for (double& d : inc) {
            const long k = pois(rng);
            for (long j = 0; j < k; ++j) d += f.jumps.sample(rng);
          }
        } else {
          std::poisson_distribution<long> pois(table->mass() * dt);
          for (double& d : inc) {
            d = table->small_mean * dt;
            const long k = pois(rng);
            for (long j = 0; j < k; ++j) d += table->sample(rng);
          }
        }
      },
      sub.family);
  return inc;
}

std::vector<double> cumulate(const Grid& grid, double drift, const std::vector<double>& inc) {
  std::vector<double> v(grid.n + 1, 0.0);
  NeumaierSum jumps;
  for (std::size_t i = 1; i <= grid.n; ++i) {
    jumps += inc[i - 1];
    v[i] = drift * (grid.t(i) - grid.t0) + jumps.value();
  }
  return v;
}

std::optional<TabulatedJumps> table_for(const SubordinatorSpec& sub) {
  if (std::holds_alternative<CustomNuFamily>(sub.family)) return tabulate(sub);
  return std::nullopt;
}

std::vector<double> subordinator_values(const SubordinatorSpec& sub, const Grid& grid, std::uint64_t seed,
                                        const TabulatedJumps* table) {
  std::mt19937_64 rng(seed);
  return cumulate(grid, sub.drift, subordinator_increments(sub, grid, rng, table));
}

GridPath driver_path(const LevyTriplet& triplet, const Grid& grid, std::uint64_t seed, const TabulatedJumps* table,
                     double drift) {
  const SeedSequence streams(seed);
  std::vector<double> v(grid.n + 1, 0.0);
  if (const SubordinatorSpec* sub = triplet.subordinator()) {
    const std::vector<double> L = subordinator_values(*sub, grid, seed, table);
    std::mt19937_64 wrng = streams.engine(0, 1);
    std::normal_distribution<double> z;
    NeumaierSum acc;
    for (std::size_t i = 1; i <= grid.n; ++i) {
      acc += std::sqrt(std::max(L[i] - L[i - 1], 0.0)) * z(wrng);
      v[i] = acc.value();
    }
    return GridPath(grid, std::move(v), "W(L)", seed);
  }

  const auto& kind = triplet.levy_measure.kind();
  double mass = 0.0;
  std::function<double(std::mt19937_64&)> jump;
  std::vector<double> cdf;
  if (const auto* a = std::get_if<AtomsMeasure>(&kind)) {
    NeumaierSum m;
    for (const Atom& x : a->atoms) {
      m += x.mass;
      cdf.push_back(m.value());
    }
    mass = m.value();
    jump = [&, a](std::mt19937_64& r) {
      std::uniform_real_distribution<double> u(0.0, mass);
      const auto k = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u(r)) - cdf.begin());
      return a->atoms[std::min(k, a->atoms.size() - 1)].location;
    };
  } else {
    const auto& d = std::get<DensityMeasure>(kind);
    if (!d.jump_sampler)
      throw std::invalid_argument("sampling an infinite-activity density needs a subordinated representation");
    mass = d.total_mass;
    jump = d.jump_sampler;
  }

  const double sd = std::sqrt(triplet.diffusion_a * grid.dt);
  std::mt19937_64 wrng = streams.engine(0, 1);
  std::mt19937_64 jrng = streams.engine(0, 2);
  std::normal_distribution<double> z;
  std::poisson_distribution<long> pois(mass * grid.dt);
  NeumaierSum noise;
  for (std::size_t i = 1; i <= grid.n; ++i) {
    double inc = sd > 0.0 ? sd * z(wrng) : 0.0;
    if (mass > 0.0) {
      const long k = pois(jrng);
      for (long j = 0; j < k; ++j) inc += jump(jrng);
    }
    noise += inc;
    v[i] = drift * (grid.t(i) - grid.t0) + noise.value();
  }
  return GridPath(grid, std::move(v), "levy", seed);
}

}  // namespace

GridPath sample_subordinator(const SubordinatorSpec& sub, const Grid& grid, std::uint64_t seed) {
  sub.validate();
  grid.validate();
  auto table = table_for(sub);
  return GridPath(grid, subordinator_values(sub, grid, seed, table ? &*table : nullptr), "L", seed);
}

std::function<GridPath(std::uint64_t)> make_driver_sampler(const LevyTriplet& triplet, const Grid& grid) {
  triplet.validate();
  grid.validate();
  std::shared_ptr<const TabulatedJumps> table;
  double drift = 0.0;
  if (const SubordinatorSpec* s = triplet.subordinator()) {
    if (auto t = table_for(*s)) table = std::make_shared<const TabulatedJumps>(std::move(*t));
  } else {
    drift = effective_drift(triplet);
  }
  return [triplet, grid, table, drift](std::uint64_t seed) {
    return driver_path(triplet, grid, seed, table.get(), drift);
  };
}

GridPath sample_driver(const LevyTriplet& triplet, const Grid& grid, std::uint64_t seed) {
  return make_driver_sampler(triplet, grid)(seed);
}

std::vector<GridPath> sample_subordinator_ensemble(const SubordinatorSpec& sub, const Grid& grid, std::size_t paths,
                                                   std::uint64_t master, unsigned threads) {
  sub.validate();
  grid.validate();
  auto table = table_for(sub);
  const SeedSequence seq(master);
  std::vector<GridPath> out(paths);
  parallel_for(paths, threads, [&](std::size_t i) {
    const std::uint64_t s = seq.seed(i);
    out[i] = GridPath(grid, subordinator_values(sub, grid, s, table ? &*table : nullptr), "L", s);
  });
  return out;
}

std::vector<GridPath> sample_driver_ensemble(const LevyTriplet& triplet, const Grid& grid, std::size_t paths,
                                             std::uint64_t master, unsigned threads) {
  const auto sampler = make_driver_sampler(triplet, grid);
  const SeedSequence seq(master);
  std::vector<GridPath> out(paths);
  parallel_for(paths, threads, [&](std::size_t i) { out[i] = sampler(seq.seed(i)); });
  return out;
}

}  // namespace fracvolt
