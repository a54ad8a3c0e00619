#include "commands.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <json.hpp>

#include "fracvolt/conditions.hpp"
#include "fracvolt/errors.hpp"
#include "fracvolt/fractional.hpp"
#include "fracvolt/levy_noise.hpp"
#include "fracvolt/verify.hpp"
#include "fracvolt/volterra.hpp"

namespace fracvolt::cli {

namespace {

using nlohmann::json;

// Coefficients by power.
std::map<int, double> parse_poly(const std::string& text) {
  std::string s;
  for (char c : text) {
    if (c != ' ') s += c;
  }
  if (s.empty()) throw ConfigError("empty polynomial");
  std::map<int, double> coef;
  std::size_t i = 0;
  while (i < s.size()) {
    double sign = 1.0;
    if (s[i] == '+' || s[i] == '-') sign = s[i++] == '-' ? -1.0 : 1.0;
    double c = 1.0;
    bool have_c = false;
    if (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) {
      const auto [ptr, ec] = std::from_chars(s.data() + i, s.data() + s.size(), c);
      if (ec != std::errc{}) throw ConfigError("bad coefficient in polynomial '" + text + "'");
      i = static_cast<std::size_t>(ptr - s.data());
      have_c = true;
      if (i < s.size() && s[i] == '*') ++i;
    }
    int power = 0;
    if (i < s.size() && s[i] == 'x') {
      ++i;
      power = 1;
      if (i < s.size() && s[i] == '^') {
        ++i;
        const auto [ptr, ec] = std::from_chars(s.data() + i, s.data() + s.size(), power);
        if (ec != std::errc{} || power < 0) throw ConfigError("bad exponent in polynomial '" + text + "'");
        i = static_cast<std::size_t>(ptr - s.data());
      }
    } else if (!have_c) {
      throw ConfigError("cannot parse polynomial '" + text + "'");
    }
    coef[power] += sign * c;
    if (i < s.size() && s[i] != '+' && s[i] != '-') throw ConfigError("cannot parse polynomial '" + text + "'");
  }
  return coef;
}

GridPath read_path_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read path file " + path);
  return read_path_csv(in);
}

json parse(const std::string& s) { return json::parse(s); }

void write_table(const std::filesystem::path& file, std::span<const GridPath> paths, const std::string& format) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + file.string());
  if (format == "csv") {
    write_ensemble_csv(os, paths);
    return;
  }
  json j;
  j["t"] = json::array();
  for (std::size_t i = 0; i <= paths.front().steps(); ++i) j["t"].push_back(paths.front().t(i));
  j["paths"] = json::array();
  for (const auto& p : paths) j["paths"].push_back(p.values);
  os << j.dump() << '\n';
}

}  // namespace

bool is_function_source(const std::string& spec) { return spec.rfind("poly:", 0) == 0 || spec.rfind("const:", 0) == 0; }

GridPath function_source(const std::string& spec, const Grid& grid) {
  if (spec.rfind("const:", 0) == 0) {
    double c = 0.0;
    const std::string v = spec.substr(6);
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), c);
    if (ec != std::errc{} || ptr != v.data() + v.size()) throw ConfigError("bad constant '" + spec + "'");
    return sample_function([c](double) { return c; }, grid, spec);
  }
  if (spec.rfind("poly:", 0) == 0) {
    const auto coef = parse_poly(spec.substr(5));
    return sample_function(
        [&coef](double x) {
          double s = 0.0;
          for (const auto& [k, c] : coef) s += c * std::pow(x, k);
          return s;
        },
        grid, spec);
  }
  return read_path_file(spec);
}

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& out) {
  const auto& s = cfg.simulate;
  const Grid grid = Grid::over(0.0, s.T, s.n);
  const LevyTriplet driver = s.driver.build();
  const auto kernel = s.kernel.build();
  std::filesystem::create_directories(cfg.output.dir);
  const std::filesystem::path dir(cfg.output.dir);
  const std::string ext = cfg.output.format == "csv" ? ".csv" : ".json";
  std::string sidecar;
  if (kernel) {
    const VolterraEnsemble e = build_ensemble(*kernel, driver, grid, s.paths, cfg.seed, cfg.threads);
    std::vector<GridPath> paths;
    paths.reserve(e.paths.size());
    for (const auto& p : e.paths) paths.push_back(p.path);
    write_table(dir / ("paths" + ext), paths, cfg.output.format);
    sidecar = e.sidecar_json();
  } else {
    const auto paths = sample_driver_ensemble(driver, grid, s.paths, cfg.seed, cfg.threads);
    write_table(dir / ("driver" + ext), paths, cfg.output.format);
    json j;
    j["driver"] = driver.describe();
    j["grid"] = {{"dt", grid.dt}, {"n", grid.n}, {"t0", grid.t0}};
    j["kernel"] = "none";
    j["master_seed"] = cfg.seed;
    j["paths"] = paths.size();
    std::vector<std::uint64_t> seeds;
    for (const auto& p : paths) seeds.push_back(p.seed);
    j["seeds"] = seeds;
    sidecar = j.dump(2);
  }
  std::ofstream meta(dir / (std::string(kernel ? "paths" : "driver") + ".meta.json"), std::ios::binary);
  meta << sidecar << '\n';
  out << sidecar << '\n';
  return kOk;
}

int cmd_integrate(const ExperimentConfig& cfg, std::ostream& out) {
  const auto& c = cfg.integrate;
  if (c.f.empty() || c.g.empty()) throw ConfigError("integrate needs both f and g");
  Grid grid = Grid::over(0.0, c.T, c.n);
  std::optional<GridPath> fp, gp;
  if (!is_function_source(c.f)) fp = read_path_file(c.f), grid = fp->grid();
  if (!is_function_source(c.g)) gp = read_path_file(c.g), grid = fp ? grid : gp->grid();
  if (!fp) fp = function_source(c.f, grid);
  if (!gp) gp = function_source(c.g, grid);
  const GlsResult r = gls_integral(*fp, *gp, c.alpha);
  json j;
  j["alpha"] = c.alpha;
  j["value"] = r.value;
  j["diagnostics"] = parse(r.to_json());
  if (c.rs_check) {
    const double left = rs_integral(*fp, *gp, PartitionMode::Left);
    const double mid = rs_integral(*fp, *gp, PartitionMode::Midpoint);
    j["rs"] = {{"left", left}, {"midpoint", mid}, {"rel_diff_midpoint", std::abs(r.value - mid) / std::abs(mid)}};
  }
  out << j.dump(2) << '\n';
  return kOk;
}

int cmd_check(const ExperimentConfig& cfg, std::ostream& out) {
  const auto& c = cfg.check;
  IntegratorHypotheses h;
  h.p = c.p;
  h.alpha = c.alpha;
  h.kernel = *c.kernel.build();
  if (c.noise) h.noise = c.noise->build();
  if (c.E_type == "linear") h.E = EProfile::linear(c.sigma2);
  if (c.E_type == "csv") {
    std::ifstream in(c.E_path);
    if (!in) throw ConfigError("cannot read E profile " + c.E_path);
    h.E = EProfile::from_csv(in);
  }
  h.continuous_martingale = c.continuous_martingale;
  h.T = c.T;
  h.resolution = c.resolution;
  h.inner_tol = c.inner_tol;
  ConditionReport r;
  if (c.condition == "Dp") r = check_Dp(h);
  else if (c.condition == "D2") r = check_D2(h);
  else r = check_Dinf(h, {c.beta, c.rho, c.fast_path});
  out << r.to_json() << '\n';
  return r.verdict ? kOk : kDivergentCondition;
}

int cmd_verify(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  VerifyOptions opt;
  opt.N = cfg.verify.N;
  opt.seed = cfg.seed;
  opt.threads = cfg.threads;
  opt.resolution = cfg.verify.resolution;
  if (cfg.verify.suite.empty()) throw ConfigError("verify needs a suite: one of cf-match, second-moment, "
                                                  "subordinator-moments, fbm-cov, frac-units, gls-vs-rs, conditions-matrix");
  suite_criteria(cfg.verify.suite);
  const SuiteResult r = run_suite(cfg.verify.suite, opt);
  out << r.to_json() << '\n';
  for (const auto& c : r.checks) {
    if (!c.pass) err << "FAIL criterion " << c.criterion << " " << c.name << ": " << c.detail << '\n';
  }
  return r.pass() ? kOk : kVerifyFailed;
}

int guarded(const std::function<int()>& fn, std::ostream& err) {
  auto report = [&err](json j) { err << j.dump() << '\n'; };
  try {
    return fn();
  } catch (const ConfigError& e) {
    report({{"error", "config"}, {"message", e.what()}});
    return kConfigError;
  } catch (const PreconditionError& e) {
    report({{"error", "precondition"}, {"flag", e.flag()}, {"message", e.what()}});
    return kConfigError;
  } catch (const DivergentDerivativeError& e) {
    report({{"error", "divergent_derivative"}, {"factor", e.factor()}, {"norm", e.norm()}, {"message", e.what()}});
    return kDivergentDerivative;
  } catch (const NumericalError& e) {
    json trace = json::array();
    for (const auto& [k, v] : e.trace()) trace.push_back({k, v});
    report({{"error", "numerical"}, {"message", e.what()}, {"partial", e.partial()}, {"trace", trace}});
    return kNumericalError;
  } catch (const std::invalid_argument& e) {
    report({{"error", "config"}, {"message", e.what()}});
    return kConfigError;
  } catch (const std::exception& e) {
    report({{"error", "numerical"}, {"message", e.what()}});
    return kNumericalError;
  }
}

}  // namespace fracvolt::cli
