#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "commands.hpp"
#include "config.hpp"

using namespace fracvolt;
using namespace fracvolt::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fracvolt_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::function<int(std::ostream&)>& cmd, std::string* out_text = nullptr) {
  std::ostringstream out, err;
  const int code = guarded([&] { return cmd(out); }, err);
  if (out_text) *out_text = out.str();
  return code;
}

int shell(const std::string& args) {
  const char* bin = std::getenv("FRACVOLT_BIN");
  if (!bin) return -1;
  const int st = std::system((std::string(bin) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

TEST_CASE("config schema") {
  CHECK_THROWS_AS(parse_config("sed: 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("simulate:\n  driver: {type: brownian, sigma: 1}\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("output: {format: xml}\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("check: {condition: D3}\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("simulate: [1, 2\n"), ConfigError);
  const auto cfg = parse_config(
      "seed: 42\n"
      "simulate:\n"
      "  driver: {type: atoms, atoms: [[-0.5, 2], [0.5, 2]]}\n"
      "  kernel: {type: mg, H: 0.7}\n"
      "  n: 64\n"
      "  paths: 3\n");
  CHECK(cfg.seed == 42);
  CHECK(cfg.simulate.driver.atoms.size() == 2);
  CHECK(cfg.simulate.driver.a == 0.0);
  CHECK(cfg.simulate.kernel.H == doctest::Approx(0.7));
  CHECK(cfg.simulate.n == 64);
}

TEST_CASE("function sources") {
  const Grid g = Grid::over(0.0, 2.0, 4);
  CHECK(function_source("poly:3x^2-x+1", g).values.back() == doctest::Approx(11.0));
  CHECK(function_source("poly: 0.5*x + x^3", g).values.back() == doctest::Approx(9.0));
  CHECK(function_source("const:5", g).values[2] == 5.0);
  CHECK_THROWS_AS(function_source("poly:y", g), ConfigError);
  CHECK_THROWS_AS(function_source("const:five", g), ConfigError);
  CHECK_THROWS_AS(function_source("/nonexistent/path.csv", g), ConfigError);
}

TEST_CASE("integrate smooth pair") {
  ExperimentConfig cfg;
  cfg.integrate.f = "poly:x";
  cfg.integrate.g = "poly:x^2";
  cfg.integrate.rs_check = true;
  std::string text;
  REQUIRE(run([&](std::ostream& o) { return cmd_integrate(cfg, o); }, &text) == kOk);
  const auto j = nlohmann::json::parse(text);
  CHECK(j["value"].get<double>() == doctest::Approx(2.0 / 3.0).epsilon(1e-3));
  CHECK(j.contains("rs"));
}

TEST_CASE("integrate constant against a path file") {
  const auto dir = scratch("integrate");
  const GridPath g = sample_function([](double t) { return std::cos(4 * t) + t; }, Grid::over(0, 1, 128));
  {
    std::ofstream os(dir / "g.csv");
    write_path_csv(os, g);
  }
  ExperimentConfig cfg;
  cfg.integrate.f = "const:5";
  cfg.integrate.g = (dir / "g.csv").string();
  std::string text;
  REQUIRE(run([&](std::ostream& o) { return cmd_integrate(cfg, o); }, &text) == kOk);
  const double want = 5.0 * (g.values.back() - g.values.front());
  CHECK(nlohmann::json::parse(text)["value"].get<double>() == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("check exit codes") {
  ExperimentConfig cfg;
  cfg.check.condition = "D2";
  cfg.check.kernel = {"example_one", 0.7};
  cfg.check.alpha = 0.6;
  cfg.check.E_type = "linear";
  cfg.check.resolution = 1 << 9;
  CHECK(run([&](std::ostream& o) { return cmd_check(cfg, o); }) == kOk);

  ExperimentConfig dinf;
  dinf.check.condition = "Dinf";
  dinf.check.kernel = {"unit", 0.5};
  dinf.check.alpha = 0.9;
  dinf.check.beta = 0.6;
  dinf.check.E_type = "linear";
  dinf.check.continuous_martingale = true;
  dinf.check.resolution = 1 << 9;
  CHECK(run([&](std::ostream& o) { return cmd_check(dinf, o); }) == kDivergentCondition);

  ExperimentConfig pre;
  pre.check.condition = "Dp";
  pre.check.p = 1.5;
  pre.check.kernel = {"unit", 0.5};
  pre.check.noise = DriverConfig{};
  pre.check.resolution = 1 << 9;
  CHECK(run([&](std::ostream& o) { return cmd_check(pre, o); }) == kConfigError);
}

TEST_CASE("verify exit codes") {
  std::ostringstream err;
  ExperimentConfig cfg;
  cfg.verify.suite = "no-such-suite";
  CHECK(run([&](std::ostream& o) { return cmd_verify(cfg, o, err); }) == kConfigError);
  cfg.verify.suite = "frac-units";
  std::string text;
  CHECK(run([&](std::ostream& o) { return cmd_verify(cfg, o, err); }, &text) == kOk);
  CHECK(nlohmann::json::parse(text)["pass"] == true);
}

TEST_CASE("simulate is deterministic and honours kernel none") {
  ExperimentConfig cfg;
  cfg.seed = 5;
  cfg.simulate.kernel = {"mg", 0.7};
  cfg.simulate.n = 32;
  cfg.simulate.paths = 4;
  cfg.output.dir = scratch("sim_a").string();
  REQUIRE(run([&](std::ostream& o) { return cmd_simulate(cfg, o); }) == kOk);
  const std::string first = slurp(fs::path(cfg.output.dir) / "paths.csv");
  cfg.output.dir = scratch("sim_b").string();
  cfg.threads = 3;
  REQUIRE(run([&](std::ostream& o) { return cmd_simulate(cfg, o); }) == kOk);
  CHECK(slurp(fs::path(cfg.output.dir) / "paths.csv") == first);
  CHECK(slurp(fs::path(cfg.output.dir) / "paths.meta.json").find("master_seed") != std::string::npos);

  cfg.simulate.kernel = {"none", 0.5};
  cfg.simulate.driver.type = "gamma_subordinated";
  cfg.simulate.driver.a = 0.0;
  cfg.output.dir = scratch("sim_c").string();
  REQUIRE(run([&](std::ostream& o) { return cmd_simulate(cfg, o); }) == kOk);
  std::istringstream rows(slurp(fs::path(cfg.output.dir) / "driver.csv"));
  std::string line;
  int count = 0;
  while (std::getline(rows, line)) ++count;
  CHECK(count == 5);
}

TEST_CASE("binary exit codes") {
  if (!std::getenv("FRACVOLT_BIN")) return;
  CHECK(shell("verify no-such-suite") == 2);
  CHECK(shell("integrate --f poly:x --g poly:x^2") == 0);
  CHECK(shell("frobnicate") == 2);
  const auto dir = scratch("bin");
  {
    std::ofstream os(dir / "bad.yaml");
    os << "integrate: {f: 'poly:x', g: 'poly:x', unknown: 1}\n";
  }
  CHECK(shell("integrate --config " + (dir / "bad.yaml").string()) == 2);
  {
    std::ofstream os(dir / "inf.csv");
    os << "t,value\n0,0\n0.25,inf\n0.5,1\n0.75,1\n1,2\n";
  }
  CHECK(shell("integrate --f " + (dir / "inf.csv").string() + " --g poly:x") == 4);
}
