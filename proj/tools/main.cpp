#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"

using namespace fracvolt::cli;

int main(int argc, char** argv) {
  CLI::App app{"Volterra processes driven by Levy noise: simulation, pathwise integrals, condition checks"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir, format;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  app.add_option("--config", config_path, "YAML experiment config")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--threads", threads, "Worker cap")->check(CLI::PositiveNumber);
  app.add_option("--format", format, "Table format")->check(CLI::IsMember({"csv", "json"}));

  auto* sim = app.add_subcommand("simulate", "Sample a driver or Volterra ensemble");
  std::size_t paths = 0, n = 0;
  sim->add_option("--paths", paths);
  sim->add_option("--n", n, "Grid steps");

  auto* integ = app.add_subcommand("integrate", "Generalized Lebesgue-Stieltjes integral of f against g");
  std::string f, g;
  double alpha = -1.0;
  bool rs_check = false;
  integ->add_option("--f", f, "poly:..., const:... or path CSV");
  integ->add_option("--g", g, "poly:..., const:... or path CSV");
  integ->add_option("--alpha", alpha);
  integ->add_flag("--rs-check", rs_check, "Append a Riemann-Stieltjes comparison");

  auto* check = app.add_subcommand("check", "Evaluate a condition suite (Dp, D2, Dinf)");
  std::string condition;
  check->add_option("--condition", condition)->check(CLI::IsMember({"Dp", "D2", "Dinf"}));

  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  std::string suite;
  std::size_t N = 0;
  verify->add_option("suite", suite, "Suite name");
  verify->add_option("--N", N, "Monte Carlo sample size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  return guarded(
      [&] {
        ExperimentConfig cfg = config_path.empty() ? parse_config("") : load_config_file(config_path);
        if (!out_dir.empty()) cfg.output.dir = out_dir;
        if (!format.empty()) cfg.output.format = format;
        if (app.count("--seed")) cfg.seed = seed;
        if (threads > 0) cfg.threads = threads;
        if (*sim) {
          if (paths > 0) cfg.simulate.paths = paths;
          if (n > 0) cfg.simulate.n = n;
          return cmd_simulate(cfg, std::cout);
        }
        if (*integ) {
          if (!f.empty()) cfg.integrate.f = f;
          if (!g.empty()) cfg.integrate.g = g;
          if (alpha >= 0.0) cfg.integrate.alpha = alpha;
          if (rs_check) cfg.integrate.rs_check = true;
          return cmd_integrate(cfg, std::cout);
        }
        if (*check) {
          if (!condition.empty()) cfg.check.condition = condition;
          return cmd_check(cfg, std::cout);
        }
        if (!suite.empty()) cfg.verify.suite = suite;
        if (N > 0) cfg.verify.N = N;
        return cmd_verify(cfg, std::cout, std::cerr);
      },
      std::cerr);
}
