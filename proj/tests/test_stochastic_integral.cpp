#include <doctest.h>

#include <cmath>

#include "fracvolt/stochastic_integral.hpp"

using namespace fracvolt;

namespace {
DeterministicFunction step_f() { return DeterministicFunction::step({0.0, 0.3, 0.7, 1.0}, {1.0, -0.5, 2.0}); }
// sum of length * level^2
constexpr double kNorm2 = 0.3 * 1.0 + 0.4 * 0.25 + 0.3 * 4.0;
}  // namespace

TEST_CASE("step function norms") {
  const auto f = step_f();
  CHECK(f.lp_power(2.0) == doctest::Approx(kNorm2));
  CHECK(f.integral() == doctest::Approx(0.3 - 0.2 + 0.6));
  CHECK(f(0.5) == -0.5);
  CHECK(f.scaled(2.0).lp_power(2.0) == doctest::Approx(4 * kNorm2));
  CHECK_THROWS(DeterministicFunction::step({0.0, 0.5}, {1.0, 2.0}));
}

TEST_CASE("left-point sum on a hand-made path") {
  const Grid g = Grid::over(0.0, 1.0, 10);
  std::vector<double> z(11);
  for (std::size_t i = 0; i <= 10; ++i) z[i] = static_cast<double>(i * i);
  // increments 2i+1 weighted by f(t_i)
  double want = 0;
  const auto f = step_f();
  for (std::size_t i = 0; i < 10; ++i) want += f(g.t(i)) * (2.0 * i + 1);
  CHECK(integrate_deterministic(f, GridPath(g, z)) == doctest::Approx(want));
}

TEST_CASE("Gaussian law of the integral") {
  const auto law = integral_law(LevyTriplet::brownian(1.5), step_f());
  for (double lam : {-2.0, 0.3, 1.0, 4.0}) {
    const auto cf = law.cf(lam);
    CHECK(cf.real() == doctest::Approx(std::exp(-1.5 * lam * lam * kNorm2 / 2)).epsilon(1e-10));
    CHECK(std::abs(cf.imag()) < 1e-12);
  }
}

TEST_CASE("symmetric atoms give a cosine exponent") {
  const auto z = LevyTriplet::atoms({{-0.5, 2.0}, {0.5, 2.0}});
  const auto f = step_f();
  const auto law = integral_law(z, f);
  for (double lam : {0.5, 2.0, 7.0}) {
    double want = 0.0;
    const double len[] = {0.3, 0.4, 0.3};
    for (int k = 0; k < 3; ++k) want += len[k] * 4.0 * (std::cos(lam * f.levels()[k] * 0.5) - 1.0);
    CHECK(law.log_cf(lam).real() == doctest::Approx(want).epsilon(1e-10));
    CHECK(std::abs(law.log_cf(lam).imag()) < 1e-10);
  }
}

TEST_CASE("exact second moment") {
  CHECK(second_moment_exact(LevyTriplet::brownian(2.0), step_f()) == doctest::Approx(2.0 * kNorm2));
  const auto z = LevyTriplet::atoms({{-0.5, 2.0}, {0.5, 2.0}}, 1.0);
  CHECK(second_moment_exact(z, step_f()) == doctest::Approx(kNorm2 * (1.0 + 1.0)));
  CHECK(second_moment_general(z, step_f()) == doctest::Approx(second_moment_exact(z, step_f())));
  CHECK_THROWS(second_moment_exact(LevyTriplet::atoms({{0.5, 1.0}}), step_f()));
}

TEST_CASE("second moment includes the squared mean for a drift") {
  // int f dZ with Z_t = t b: variance 0, mean b int f
  const auto z = LevyTriplet::atoms({}, 0.0, 3.0);
  const auto f = step_f();
  CHECK(second_moment_general(z, f) == doctest::Approx(std::pow(3.0 * f.integral(), 2)));
}
