#include <doctest.h>

#include <cmath>
#include <vector>

#include "fracvolt/levy_noise.hpp"

using namespace fracvolt;

namespace {

struct MeanVar {
  double mean, var;
};
MeanVar stats(const std::vector<double>& x) {
  double m = 0;
  for (double v : x) m += v;
  m /= x.size();
  double s = 0;
  for (double v : x) s += (v - m) * (v - m);
  return {m, s / (x.size() - 1)};
}

std::vector<double> terminal(const std::vector<GridPath>& ps) {
  std::vector<double> out;
  for (const auto& p : ps) out.push_back(p.values.back());
  return out;
}

}  // namespace

TEST_CASE("triplet validation") {
  CHECK_THROWS(LevyTriplet::brownian(-1.0).validate());
  CHECK_THROWS(LevyTriplet::atoms({{0.5, -1.0}}).validate());
  CHECK_NOTHROW(LevyTriplet::atoms({{-0.5, 2.0}, {0.5, 2.0}}).validate());
  CHECK(LevyTriplet::atoms({{-0.5, 2.0}, {0.5, 2.0}}).levy_measure.symmetric());
  CHECK_FALSE(LevyTriplet::atoms({{0.5, 2.0}}).levy_measure.symmetric());
  CHECK(LevyTriplet::brownian(1.0).levy_measure.is_zero());
}

TEST_CASE("moments of atoms are sums") {
  const auto z = LevyTriplet::atoms({{-2.0, 1.0}, {0.5, 3.0}});
  CHECK(pi_abs_moment(z, 2.0).value == doctest::Approx(4.0 + 0.75));
  CHECK(pi_abs_moment(z, 1.0).value == doctest::Approx(2.0 + 1.5));
}

TEST_CASE("subordinated Wiener measure has second moment E L_1") {
  const double c = 2.0, rate = 3.0;
  const auto z = LevyTriplet::subordinated(SubordinatorSpec::gamma(c, rate));
  CHECK(z.levy_measure.symmetric());
  const auto m = pi_abs_moment(z, 2.0);
  CHECK(m.finite);
  CHECK(m.value == doctest::Approx(c / rate).epsilon(1e-6));
}

TEST_CASE("Laplace and characteristic exponents") {
  CHECK(laplace_exponent(SubordinatorSpec::gamma(2.0, 3.0), 1.5) == doctest::Approx(2.0 * std::log1p(0.5)));
  CHECK(laplace_exponent(SubordinatorSpec::stable(0.7, 1.3), 2.0) == doctest::Approx(1.3 * std::pow(2.0, 0.7)));
  CHECK(characteristic_exponent(LevyTriplet::brownian(2.0), 1.5).real() == doctest::Approx(-2.0 * 1.5 * 1.5 / 2));
  const auto sub = SubordinatorSpec::gamma(2.0, 3.0);
  CHECK(subordinated_exponent(sub, 1.2) == doctest::Approx(-laplace_exponent(sub, 0.72)));
}

TEST_CASE("gamma subordinator mean and variance") {
  const double c = 2.0, rate = 3.0, T = 1.5;
  const auto ps = sample_subordinator_ensemble(SubordinatorSpec::gamma(c, rate), Grid::over(0, T, 8), 20000, 11);
  const auto st = stats(terminal(ps));
  const double mean = c * T / rate, var = c * T / (rate * rate);
  CHECK(std::abs(st.mean - mean) < 4 * std::sqrt(var / 20000));
  CHECK(st.var == doctest::Approx(var).epsilon(0.05));
  for (const auto& p : ps) {
    for (std::size_t i = 1; i < p.values.size(); ++i) REQUIRE(p.values[i] >= p.values[i - 1]);
  }
}

TEST_CASE("compound Poisson subordinator mean") {
  const auto sub = SubordinatorSpec::compound_poisson(3.0, JumpLaw{2.0, 0.5});
  const auto st = stats(terminal(sample_subordinator_ensemble(sub, Grid::over(0, 1, 4), 20000, 12)));
  // rate * E jump = 3, Var = rate * E jump^2 = 3 * (shape (shape + 1) scale^2) = 4.5
  CHECK(std::abs(st.mean - 3.0) < 4 * std::sqrt(4.5 / 20000));
  CHECK(st.var == doctest::Approx(4.5).epsilon(0.05));
}

TEST_CASE("Brownian driver variance") {
  const auto st = stats(terminal(sample_driver_ensemble(LevyTriplet::brownian(2.0), Grid::over(0, 1, 16), 20000, 13)));
  CHECK(std::abs(st.mean) < 4 * std::sqrt(2.0 / 20000));
  CHECK(st.var == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("sampling is a function of the seed only") {
  const auto z = LevyTriplet::subordinated(SubordinatorSpec::compound_poisson(3.0, JumpLaw{2.0, 0.5}));
  const Grid g = Grid::over(0, 1, 32);
  CHECK(sample_driver(z, g, 99).values == sample_driver(z, g, 99).values);
  CHECK(sample_driver(z, g, 99).values != sample_driver(z, g, 100).values);
  const auto a = sample_driver_ensemble(z, g, 50, 7, 1);
  const auto b = sample_driver_ensemble(z, g, 50, 7, 3);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].values == b[i].values);
}
