#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "fracvolt/numerics.hpp"
#include "fracvolt/special.hpp"

using namespace fracvolt;

TEST_CASE("compensated sum keeps the small terms") {
  std::vector<double> xs = {1e16, 1.0, -1e16, 1.0};
  CHECK(compensated_sum(xs) == doctest::Approx(2.0));
}

TEST_CASE("gauss panel is exact for degree 19") {
  auto f = [](double x) { return std::pow(x, 19) - 3 * x * x; };
  const double exact = std::pow(2.0, 20) / 20 - 8.0;
  CHECK(gauss_panel(f, 0.0, 2.0) == doctest::Approx(exact).epsilon(1e-13));
}

TEST_CASE("geometric dyadic series") {
  DyadicOptions opt;
  auto r = sum_dyadic_series([](int k) { return std::pow(0.5, k); }, opt);
  CHECK_FALSE(r.divergent);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));

  auto flat = sum_dyadic_series([](int) { return 1.0; }, opt);
  CHECK(flat.divergent);
}

TEST_CASE("dyadic_left integrates and rejects power singularities") {
  // int_0^1 x^(-1/2) = 2
  auto ok = dyadic_left([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, {});
  CHECK_FALSE(ok.divergent);
  CHECK(ok.value == doctest::Approx(2.0).epsilon(1e-9));
  auto bad = dyadic_left([](double x) { return std::pow(x, -1.1); }, 0.0, 1.0, {});
  CHECK(bad.divergent);
  auto log_div = dyadic_left([](double x) { return 1.0 / x; }, 0.0, 1.0, {});
  CHECK(log_div.divergent);
}

TEST_CASE("half line with both tails") {
  // int_0^inf x^(-1/2) / (1 + x) = pi
  auto r = half_line([](double x) { return 1.0 / (std::sqrt(x) * (1.0 + x)); }, 1.0, {});
  CHECK(r.value == doctest::Approx(M_PI).epsilon(1e-8));
}

TEST_CASE("hyp2f1 against high-precision values") {
  struct Row {
    double a, b, c, z, want;
  };
  // mpmath, 30 digits
  const Row rows[] = {{0.5, 1.2, 2.3, 0.3, 1.0927708534843637},
                      {0.2, -0.4, 1.7, -0.9, 1.0383249224592861},
                      {0.3, 0.8, 1.5, 0.97, 1.4323332958641809},
                      {0.5, 0.5, 1.2, -1e6, 0.006323185770136962},
                      {1.3, 0.2, 2.1, -3.0, 0.8207691645499977}};
  for (const auto& r : rows) {
    CAPTURE(r.z);
    CHECK(hyp2f1(r.a, r.b, r.c, r.z) == doctest::Approx(r.want).epsilon(1e-9));
  }
}

TEST_CASE("hyp2f1 elementary closed forms") {
  for (double z : {-5.0, -0.7, 0.1, 0.6, 0.95}) {
    CAPTURE(z);
    // 2F1(1,1;2;z) = -log(1-z)/z
    CHECK(hyp2f1(1, 1, 2, z) == doctest::Approx(-std::log1p(-z) / z).epsilon(1e-9));
    // 2F1(a,b;b;z) = (1-z)^(-a)
    CHECK(hyp2f1(0.3, 1.7, 1.7, z) == doctest::Approx(std::pow(1 - z, -0.3)).epsilon(1e-9));
  }
}

TEST_CASE("rgamma") {
  CHECK(rgamma(-2.0) == 0.0);
  CHECK(rgamma(0.5) == doctest::Approx(1.0 / std::sqrt(M_PI)));
}

TEST_CASE("parallel_for writes every index once") {
  std::vector<int> hit(1000, 0);
  parallel_for(hit.size(), 4, [&](std::size_t i) { hit[i] += 1; });
  CHECK(std::accumulate(hit.begin(), hit.end(), 0) == 1000);
  CHECK(*std::min_element(hit.begin(), hit.end()) == 1);
}
