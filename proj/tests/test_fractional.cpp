#include <doctest.h>

#include <cmath>

#include "fracvolt/errors.hpp"
#include "fracvolt/fractional.hpp"
#include "fracvolt/levy_noise.hpp"

using namespace fracvolt;

namespace {
const Grid kGrid = Grid::over(0.0, 1.0, 512);
GridPath sample(double (*f)(double)) { return sample_function(f, kGrid); }
}  // namespace

TEST_CASE("fractional integral is exact on linear functions") {
  for (double a : {0.2, 0.5, 0.9}) {
    const GridPath one = sample([](double) { return 1.0; });
    const GridPath x = sample([](double t) { return t; });
    const GridPath Il = frac_integral(one, {a, Side::Left});
    const GridPath Ir = frac_integral(one, {a, Side::Right});
    const GridPath Ix = frac_integral(x, {a, Side::Left});
    for (std::size_t i = 0; i <= kGrid.n; i += 37) {
      const double t = kGrid.t(i);
      CHECK(Il.values[i] == doctest::Approx(std::pow(t, a) / std::tgamma(1 + a)).epsilon(1e-12));
      CHECK(Ir.values[i] == doctest::Approx(std::pow(1 - t, a) / std::tgamma(1 + a)).epsilon(1e-12));
      CHECK(Ix.values[i] == doctest::Approx(std::pow(t, 1 + a) / std::tgamma(2 + a)).epsilon(1e-12));
    }
  }
}

TEST_CASE("right integral is the mirrored left integral") {
  const GridPath f = sample([](double t) { return std::exp(t) * std::cos(5 * t); });
  std::vector<double> rev(f.values.rbegin(), f.values.rend());
  const GridPath fr(kGrid, rev);
  const GridPath right = frac_integral(f, {0.35, Side::Right});
  const GridPath left = frac_integral(fr, {0.35, Side::Left});
  for (std::size_t i = 0; i <= kGrid.n; ++i) CHECK(right.values[i] == doctest::Approx(left.values[kGrid.n - i]).epsilon(1e-12));
}

TEST_CASE("Weyl derivative of a constant") {
  const GridPath one = sample([](double) { return 1.0; });
  for (double a : {0.3, 0.7}) {
    const GridPath d = frac_derivative(one, {a, Side::Left});
    CHECK(d.t0 == doctest::Approx(kGrid.dt));
    for (std::size_t i = 0; i <= d.steps(); i += 51) {
      const double t = d.t(i);
      CHECK(d.values[i] == doctest::Approx(std::pow(t, -a) / std::tgamma(1 - a)).epsilon(1e-12));
    }
  }
}

TEST_CASE("extrapolated derivative of x^2") {
  const GridPath f = sample_function([](double t) { return t * t; }, Grid::over(0, 1, 4096));
  for (double a : {0.3, 0.7}) {
    const GridPath d = frac_derivative_extrapolated(f, {a, Side::Left});
    const GridPath plain = frac_derivative(f, {a, Side::Left});
    const double c = 2.0 / std::tgamma(3 - a);
    double worst = 0, worst_plain = 0;
    for (std::size_t i = 0; i <= d.steps(); ++i) {
      if (d.t(i) < 0.25) continue;
      worst = std::max(worst, std::abs(d.values[i] / (c * std::pow(d.t(i), 2 - a)) - 1));
    }
    for (std::size_t i = 0; i <= plain.steps(); ++i) {
      if (plain.t(i) < 0.25) continue;
      worst_plain = std::max(worst_plain, std::abs(plain.values[i] / (c * std::pow(plain.t(i), 2 - a)) - 1));
    }
    CHECK(worst < 1e-6);
    CHECK(worst < worst_plain);
  }
  CHECK_THROWS(frac_derivative_extrapolated(sample_function([](double t) { return t; }, Grid::over(0, 1, 7)), {0.5, Side::Left}));
}

TEST_CASE("GLS of a constant integrand is the increment of g") {
  const GridPath five = sample([](double) { return 5.0; });
  const GridPath g = sample([](double t) { return std::sin(3 * t) + t * t; });
  const auto r = gls_integral(five, g, 0.4);
  CHECK(r.value == doctest::Approx(5.0 * (g.values.back() - g.values.front())).epsilon(1e-12));
  CHECK(r.boundary_term == doctest::Approx(r.value));
}

TEST_CASE("GLS smooth pair and the drop-recentering variant") {
  const GridPath f = sample([](double t) { return 1.0 + t; });
  const GridPath g = sample([](double t) { return t * t; });
  // int (1 + x) 2x dx = 1 + 2/3
  for (double a : {0.3, 0.6}) {
    CHECK(gls_integral(f, g, a).value == doctest::Approx(5.0 / 3.0).epsilon(1e-3));
  }
  // Without recentering the f(a) x^(-alpha) term loses its first cell: error ~ h^(1-alpha).
  GlsOptions o;
  o.drop_recentering = true;
  const double a = 0.6;
  auto err = [&](std::size_t n) {
    const Grid grid = Grid::over(0, 1, n);
    const GridPath fn = sample_function([](double t) { return 1.0 + t; }, grid);
    const GridPath gn = sample_function([](double t) { return t * t; }, grid);
    return std::abs(gls_integral(fn, gn, a, o).value - 5.0 / 3.0);
  };
  const double coarse = err(512), fine = err(8192);
  CHECK(coarse / fine == doctest::Approx(std::pow(16.0, 1 - a)).epsilon(0.15));
  CHECK_THROWS(gls_integral(f, g, 1.2));
}

TEST_CASE("non-finite samples raise DivergentDerivativeError") {
  GridPath f = sample([](double t) { return t; });
  f.values[100] = INFINITY;
  const GridPath g = sample([](double t) { return t; });
  CHECK_THROWS_AS(gls_integral(f, g, 0.5), DivergentDerivativeError);
}

TEST_CASE("Riemann-Stieltjes sums") {
  const GridPath f = sample([](double t) { return t; });
  const GridPath g = sample([](double t) { return t; });
  // midpoint is exact for int x dx
  CHECK(rs_integral(f, g, PartitionMode::Midpoint) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(rs_integral(f, g, PartitionMode::Left) == doctest::Approx(0.5 - 0.5 * kGrid.dt).epsilon(1e-12));
}

TEST_CASE("alpha-connectedness") {
  const GridPath x = sample([](double t) { return std::sin(2 * t); });
  const GridPath y = sample([](double t) { return t * t; });
  CHECK(alpha_connected_check(x, y, 1.0, 0.5, ConnectedMode::L1Sup).verdict);

  // Brownian pair: D^alpha X needs alpha < 1/2 and D^(1-alpha) Y needs alpha > 1/2
  const Grid fine = Grid::over(0, 1, 1 << 14);
  const GridPath bx = sample_driver(LevyTriplet::brownian(1.0), fine, 1);
  const GridPath by = sample_driver(LevyTriplet::brownian(1.0), fine, 2);
  CHECK_FALSE(alpha_connected_check(bx, by, 1.0, 0.7, ConnectedMode::L1Sup).verdict);
}
