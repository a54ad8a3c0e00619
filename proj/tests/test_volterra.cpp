#include <doctest.h>

#include <cmath>
#include <random>

#include "fracvolt/volterra.hpp"

using namespace fracvolt;

TEST_CASE("ExampleOne kernel with j = 1 against high-precision values") {
  struct Row {
    double H, t, s, want;
  };
  // mpmath, 30 digits, after x = (u-s)^(H-1/2)
  const Row rows[] = {{0.7, 1.0, 0.3, 1.0736357155302256},   {0.7, 0.5, 0.01, 1.2832942561407589},
                      {0.7, 2.0, 1.9, 0.69007997485368989},  {0.75, 0.4, 0.39, 0.3386826960569593},
                      {0.75, 3.0, 0.001, 5.332574149077601}, {0.9, 1.0, 0.2, 0.9733556698052992},
                      {0.6, 1.0, 0.2, 1.075482247203466},    {0.6, 0.4, 0.39, 0.6790706823834948},
                      {0.6, 3.0, 0.001, 1.616608503556031}};
  for (const auto& r : rows) {
    CAPTURE(r.H);
    CAPTURE(r.s);
    CHECK(eval_kernel(VolterraKernel::example_one_unit(r.H), r.t, r.s) == doctest::Approx(r.want).epsilon(1e-8));
    // same normalization: both produce standard fBm
    CHECK(eval_kernel(VolterraKernel::molchan_golosov(r.H), r.t, r.s) == doctest::Approx(r.want).epsilon(1e-8));
  }
}

TEST_CASE("H = 1/2 is the unit kernel") {
  const auto k = VolterraKernel::molchan_golosov(0.5);
  CHECK(k.is_unit());
  CHECK(k(1.0, 0.3) == doctest::Approx(1.0));
  CHECK(k(0.3, 1.0) == 0.0);
}

TEST_CASE("homogeneity g(lt, ls) = l^(H-1/2) g(t, s)") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (double H : {0.3, 0.7}) {
    const auto k = VolterraKernel::molchan_golosov(H);
    REQUIRE(k.is_homogeneous());
    for (int i = 0; i < 20; ++i) {
      const double t = 1.0, s = u(rng), l = 4.0 * u(rng);
      CHECK(k(l * t, l * s) == doctest::Approx(std::pow(l, H - 0.5) * k(t, s)).epsilon(1e-9));
    }
  }
}

TEST_CASE("fast evaluator tracks direct evaluation") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& k : {VolterraKernel::molchan_golosov(0.3), VolterraKernel::molchan_golosov(0.8),
                        VolterraKernel::example_one_unit(0.6)}) {
    const auto fast = fast_evaluator(k);
    double worst = 0.0;
    for (int i = 0; i < 2000; ++i) {
      const double t = 0.05 + 2.0 * u(rng);
      const double s = t * std::pow(u(rng), 3.0);
      worst = std::max(worst, std::abs(fast(t, s) / k(t, s) - 1.0));
    }
    CHECK(worst < 1e-7);
  }
}

TEST_CASE("KernelMatrix apply is the midpoint convolution") {
  const auto k = VolterraKernel::molchan_golosov(0.7);
  const Grid g = Grid::over(0.0, 1.0, 40);
  std::vector<double> z(41);
  for (std::size_t i = 0; i <= 40; ++i) z[i] = std::sin(static_cast<double>(i));
  const GridPath Z(g, z);
  const GridPath Y = KernelMatrix(k, g).apply(Z);
  CHECK(Y.values[0] == 0.0);
  for (std::size_t i : {1u, 17u, 40u}) {
    double want = 0.0;
    for (std::size_t j = 0; j < i; ++j) want += k(g.t(i), g.t(j) + 0.5 * g.dt) * (z[j + 1] - z[j]);
    CHECK(Y.values[i] == doctest::Approx(want).epsilon(1e-7));
  }
}

TEST_CASE("increment decomposition adds up") {
  const auto k = VolterraKernel::molchan_golosov(0.7);
  const GridPath Z = sample_driver(LevyTriplet::brownian(1.0), Grid::over(0, 1, 64), 3);
  const GridPath Y = build_path(k, Z).path;
  const auto d = increment_decomposition(k, Z, 20, 50);
  CHECK(d.boundary_term + d.history_term == doctest::Approx(Y.values[50] - Y.values[20]).epsilon(1e-9));
}

TEST_CASE("fBm variance and Hölder slope from a small ensemble") {
  const double H = 0.7;
  const auto e = build_ensemble(VolterraKernel::molchan_golosov(H), LevyTriplet::brownian(1.0), Grid::over(0, 1, 256),
                                2000, 17);
  std::vector<GridPath> paths;
  double m2 = 0.0;
  for (const auto& p : e.paths) {
    paths.push_back(p.path);
    m2 += p.path.values.back() * p.path.values.back();
  }
  m2 /= paths.size();
  // Var Y_1 = 1, Var of the estimate ~ 2 / N
  CHECK(std::abs(m2 - 1.0) < 4 * std::sqrt(2.0 / 2000));
  CHECK(holder_exponent_estimate(paths, dyadic_lags(256)).exponent == doctest::Approx(H).epsilon(0.05 / H));
}

TEST_CASE("Brownian kernel H = 1/2 reproduces the driver") {
  const GridPath Z = sample_driver(LevyTriplet::brownian(1.0), Grid::over(0, 1, 32), 8);
  const GridPath Y = build_path(VolterraKernel::molchan_golosov(0.5), Z).path;
  for (std::size_t i = 0; i <= 32; ++i) CHECK(Y.values[i] == doctest::Approx(Z.values[i] - Z.values[0]));
}

TEST_CASE("ensemble is thread independent") {
  const auto k = VolterraKernel::molchan_golosov(0.7);
  const auto z = LevyTriplet::atoms({{-1.0, 2.0}, {1.0, 2.0}});
  const auto a = build_ensemble(k, z, Grid::over(0, 1, 64), 30, 4, 1);
  const auto b = build_ensemble(k, z, Grid::over(0, 1, 64), 30, 4, 3);
  CHECK(a.sidecar_json() == b.sidecar_json());
  for (std::size_t i = 0; i < 30; ++i) CHECK(a.paths[i].path.values == b.paths[i].path.values);
}
