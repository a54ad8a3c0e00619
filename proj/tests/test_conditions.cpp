#include <doctest.h>

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "fracvolt/conditions.hpp"
#include "fracvolt/errors.hpp"

using namespace fracvolt;

namespace {

IntegratorHypotheses unit_kernel(double alpha, std::size_t n = std::size_t{1} << 11) {
  IntegratorHypotheses h;
  h.alpha = alpha;
  h.kernel = VolterraKernel::molchan_golosov(0.5);
  h.E = EProfile::linear(1.0);
  h.noise = LevyTriplet::brownian(1.0);
  h.resolution = n;
  return h;
}

IntegratorHypotheses example_one(double H, double alpha, std::size_t n = std::size_t{1} << 11) {
  IntegratorHypotheses h = unit_kernel(alpha, n);
  h.kernel = VolterraKernel::example_one_unit(H);
  return h;
}

std::string flag_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const PreconditionError& e) {
    return e.flag();
  }
  return "";
}

}  // namespace

TEST_CASE("E profiles") {
  const auto lin = EProfile::linear(2.0);
  CHECK(lin(0.5) == doctest::Approx(1.0));
  CHECK(lin.density(0.3) == doctest::Approx(2.0));
  const auto pw = EProfile::piecewise({0.0, 1.0, 2.0}, {0.0, 1.0, 4.0});
  CHECK(pw(1.5) == doctest::Approx(2.5));
  CHECK(pw.density(1.5) == doctest::Approx(3.0));
  CHECK(pw.density_bound() == doctest::Approx(3.0));
  std::istringstream csv("t,E\n0,0\n0.5,1\n1,1.5\n");
  const auto fromcsv = EProfile::from_csv(csv);
  CHECK(fromcsv(0.25) == doctest::Approx(0.5));
  CHECK_THROWS(EProfile::piecewise({0.0, 1.0}, {0.0, -1.0}));
}

TEST_CASE("(D_p) p = 1 with the unit kernel matches closed forms") {
  IntegratorHypotheses h = unit_kernel(0.5);
  h.p = 1.0;
  h.noise = LevyTriplet::atoms({{-0.5, 2.0}, {0.5, 2.0}});
  const auto r = check_Dp(h);
  CHECK(r.verdict);
  // int w^(-1/2) w dw and int (1 - s)^(1/2) / (1/2) ds
  CHECK(r.entry("Dp1").value == doctest::Approx(2.0 / 3.0).epsilon(1e-5));
  CHECK(r.entry("Dp3").value == doctest::Approx(4.0 / 3.0).epsilon(1e-4));
  CHECK(r.entry("Dp2").value == 0.0);
  CHECK(r.entry("Dp4").value == 0.0);
}

TEST_CASE("(D_p) control kernel (t-s)^(-0.4)") {
  IntegratorHypotheses h = unit_kernel(0.9);
  h.p = 2.0;
  CustomKernel k;
  k.g = [](double t, double s) { return std::pow(t - s, -0.4); };
  k.name = "power";
  h.kernel = VolterraKernel::custom(k);
  const auto r = check_Dp(h);
  CHECK(r.entry("Dp1").finite);
  CHECK(r.entry("Dp1").value == doctest::Approx(5.0).epsilon(1e-4));
  CHECK_FALSE(r.entry("Dp3").finite);
  CHECK_FALSE(r.verdict);
  CHECK(r.class_label == "not established");
}

TEST_CASE("(D_2) unit kernel closed forms") {
  const auto r = check_D2(unit_kernel(0.6));
  CHECK(r.verdict);
  // 1/(2 alpha)
  CHECK(r.entry("D2_1").value == doctest::Approx(1.0 / 1.2).epsilon(1e-6));
  // (1/(2a-1) - 2/a + 1) / (2a (1-a)^2)
  const double a = 0.6;
  CHECK(r.entry("D2_3").value == doctest::Approx((1 / (2 * a - 1) - 2 / a + 1) / (2 * a * (1 - a) * (1 - a))).epsilon(1e-2));
  CHECK(r.entry("D2_2").value == 0.0);
  // Item 3 squares (v-s)^(alpha-1): finite only for alpha > 1/2.
  CHECK_FALSE(check_D2(unit_kernel(0.3)).entry("D2_3").finite);
}

TEST_CASE("(D_2) ExampleOne verdicts") {
  for (double a : {0.4, 0.6}) {
    CAPTURE(a);
    CHECK(check_D2(example_one(0.7, a)).verdict);
  }
  const auto low = check_D2(example_one(0.6, 0.2));
  CHECK_FALSE(low.verdict);
}

TEST_CASE("(D_2) verdicts do not depend on the resolution") {
  for (auto [H, a] : {std::pair{0.7, 0.6}, std::pair{0.6, 0.3}}) {
    const auto coarse = check_D2(example_one(H, a, 1 << 9));
    const auto fine = check_D2(example_one(H, a, 1 << 11));
    for (std::size_t i = 0; i < coarse.entries.size(); ++i) CHECK(coarse.entries[i].finite == fine.entries[i].finite);
  }
}

TEST_CASE("(D_p) is monotone in alpha for ExampleOne") {
  for (double a : {0.85, 0.95}) {
    CAPTURE(a);
    CHECK(check_Dp(example_one(0.7, a, 1 << 9)).verdict);
  }
}

TEST_CASE("(D_inf) unit kernel") {
  IntegratorHypotheses h = unit_kernel(0.9);
  h.continuous_martingale = true;
  const auto fast = check_Dinf(h, {0.45, 4.0, true});
  CHECK(fast.fast_path);
  CHECK(fast.verdict);
  const auto quad = check_Dinf(h, {0.45, 4.0, false});
  CHECK_FALSE(quad.fast_path);
  CHECK(quad.verdict);
  // 2/g - 2/(g+1), g = rho/2 - beta rho
  const double g = 2.0 - 1.8;
  CHECK(quad.entry("Dinf_1").value == doctest::Approx(2 / g - 2 / (g + 1)).epsilon(1e-3));
  CHECK_FALSE(check_Dinf(h, {0.6, 4.0, false}).verdict);
}

TEST_CASE("precondition flags") {
  IntegratorHypotheses h = unit_kernel(0.5);
  h.p = 1.5;
  CHECK(flag_of([&] { check_Dp(h); }) == "a=b=0");
  h.p = 2.0;
  h.noise = LevyTriplet::atoms({{0.5, 1.0}});
  CHECK(flag_of([&] { check_Dp(h); }) == "symmetric");
  h.noise = LevyTriplet::atoms({{-0.5, 1.0}, {0.5, 1.0}}, 0.0, 1.0);
  CHECK(flag_of([&] { check_Dp(h); }) == "b=0");
  h.noise.reset();
  CHECK(flag_of([&] { check_Dp(h); }) == "levy_noise");

  IntegratorHypotheses d = unit_kernel(0.9);
  d.continuous_martingale = true;
  CHECK(flag_of([&] { check_Dinf(d, {0.3, 4.0, false}); }) == "beta");
  d.continuous_martingale = false;
  d.noise = LevyTriplet::atoms({{-0.5, 1.0}, {0.5, 1.0}});
  CHECK(flag_of([&] { check_Dinf(d, {0.45, 4.0, false}); }) == "continuous_martingale");
}

TEST_CASE("report JSON layout") {
  const auto r = check_D2(unit_kernel(0.6, 1 << 9));
  const auto j = nlohmann::json::parse(r.to_json());
  CHECK(j["condition"].is_string());
  CHECK(j["verdict"] == "finite");
  CHECK(j["entries"].size() == 4);
  CHECK(j["entries"][0]["name"] == "D2_1");
  CHECK(j["entries"][0]["trace"].size() > 0);
  CHECK(r.to_json() == check_D2(unit_kernel(0.6, 1 << 9)).to_json());
}

TEST_CASE("identity constant and J1 + J2 scaling") {
  const auto id = frac_integral_identity(0.7, {{0.5, 1.0}, {0.2, 1.0}, {1.0, 3.0}});
  CHECK(id.max_rel_spread < 1e-6);
  // B(2 - 2H, H - 1/2) at H = 0.7
  CHECK(id.probes[0].constant == doctest::Approx(std::tgamma(0.6) * std::tgamma(0.2) / std::tgamma(0.8)).epsilon(1e-8));

  const auto red = j12_reduction(0.7, 0.5, {0.5, 1.0}, 1 << 9);
  CHECK(red.max_rel_spread < 1e-6);
  CHECK(red.j12[1] / red.j12[0] == doctest::Approx(std::pow(2.0, 2 * 0.7 + 2 * 0.5 - 1)).epsilon(1e-6));
}

TEST_CASE("GRR diagnostic") {
  // deterministic ramp: finite xi, slope 1
  std::vector<GridPath> ramp(4, sample_function([](double t) { return t; }, Grid::over(0, 1, 256)));
  const auto d = grr_holder_diagnostic(ramp, 0.45, 4.0);
  CHECK(d.xi_finite);
  CHECK(d.holder_slope == doctest::Approx(1.0).epsilon(0.01));
  CHECK(d.pass);

  std::vector<GridPath> bm;
  for (std::uint64_t i = 0; i < 200; ++i) bm.push_back(sample_driver(LevyTriplet::brownian(1.0), Grid::over(0, 1, 256), i));
  const auto b = grr_holder_diagnostic(bm, 0.45, 4.0);
  CHECK(b.holder_floor == doctest::Approx(0.2));
  CHECK(b.holder_slope == doctest::Approx(0.5).epsilon(0.1));
  CHECK(b.pass);
}
