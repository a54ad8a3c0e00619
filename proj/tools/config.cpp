#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace fracvolt::cli {

namespace {

void only_keys(const YAML::Node& node, const std::set<std::string>& allowed, const std::string& where) {
  if (!node.IsMap()) throw ConfigError(where + ": expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <class T>
void read(const YAML::Node& node, const char* key, T& out, const std::string& where) {
  const YAML::Node v = node[key];
  if (!v) return;
  try {
    out = v.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where + "." + key + ": wrong value type");
  }
}

void positive(double x, const std::string& what) {
  if (!(x > 0.0)) throw ConfigError(what + " must be positive");
}

DriverConfig driver(const YAML::Node& node, const std::string& where) {
  only_keys(node, {"type", "a", "b", "atoms", "c", "rate", "stable_alpha", "c1", "jump_shape", "jump_scale"}, where);
  DriverConfig d;
  read(node, "type", d.type, where);
  static const std::set<std::string> types = {"brownian", "atoms", "gamma_subordinated", "stable_subordinated",
                                              "cp_subordinated"};
  if (!types.count(d.type)) throw ConfigError(where + ".type: unknown driver '" + d.type + "'");
  if (d.type != "brownian") d.a = 0.0;
  const std::pair<const char*, double*> fields[] = {
      {"a", &d.a},   {"b", &d.b},   {"c", &d.c},
      {"rate", &d.rate}, {"stable_alpha", &d.stable_alpha}, {"c1", &d.c1},
      {"jump_shape", &d.jump_shape}, {"jump_scale", &d.jump_scale}};
  for (const auto& [key, slot] : fields) read(node, key, *slot, where);
  if (const YAML::Node atoms = node["atoms"]) {
    if (!atoms.IsSequence()) throw ConfigError(where + ".atoms: expected a list of [location, mass]");
    for (const auto& a : atoms) {
      if (!a.IsSequence() || a.size() != 2) throw ConfigError(where + ".atoms: expected [location, mass]");
      d.atoms.push_back({a[0].as<double>(), a[1].as<double>()});
    }
  }
  if (d.type == "atoms" && d.atoms.empty()) throw ConfigError(where + ".atoms: required for type atoms");
  return d;
}

KernelConfig kernel(const YAML::Node& node, const std::string& where) {
  only_keys(node, {"type", "H"}, where);
  KernelConfig k;
  read(node, "type", k.type, where);
  read(node, "H", k.H, where);
  static const std::set<std::string> types = {"none", "unit", "mg", "example_one"};
  if (!types.count(k.type)) throw ConfigError(where + ".type: unknown kernel '" + k.type + "'");
  if (!(k.H > 0.0 && k.H < 1.0)) throw ConfigError(where + ".H must lie in (0,1)");
  if (k.type == "example_one" && !(k.H > 0.5)) throw ConfigError(where + ".H must exceed 1/2 for example_one");
  return k;
}

}  // namespace

LevyTriplet DriverConfig::build() const {
  if (type == "brownian") return LevyTriplet::brownian(a);
  if (type == "atoms") return LevyTriplet::atoms(atoms, a, b);
  if (type == "gamma_subordinated") return LevyTriplet::subordinated(SubordinatorSpec::gamma(c, rate));
  if (type == "stable_subordinated") return LevyTriplet::subordinated(SubordinatorSpec::stable(stable_alpha, c1));
  return LevyTriplet::subordinated(SubordinatorSpec::compound_poisson(rate, JumpLaw{jump_shape, jump_scale}));
}

std::optional<VolterraKernel> KernelConfig::build() const {
  if (type == "none") return std::nullopt;
  if (type == "unit") return VolterraKernel::molchan_golosov(0.5);
  if (type == "mg") return VolterraKernel::molchan_golosov(H);
  return VolterraKernel::example_one_unit(H);
}

ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
  ExperimentConfig cfg;
  if (root.IsNull()) return cfg;
  only_keys(root, {"seed", "threads", "simulate", "integrate", "check", "verify", "output"}, "config");
  read(root, "seed", cfg.seed, "config");
  read(root, "threads", cfg.threads, "config");

  if (const YAML::Node s = root["simulate"]) {
    only_keys(s, {"driver", "kernel", "T", "n", "paths"}, "simulate");
    if (s["driver"]) cfg.simulate.driver = driver(s["driver"], "simulate.driver");
    if (s["kernel"]) cfg.simulate.kernel = kernel(s["kernel"], "simulate.kernel");
    read(s, "T", cfg.simulate.T, "simulate");
    read(s, "n", cfg.simulate.n, "simulate");
    read(s, "paths", cfg.simulate.paths, "simulate");
    positive(cfg.simulate.T, "simulate.T");
    if (cfg.simulate.n == 0 || cfg.simulate.paths == 0) throw ConfigError("simulate.n and simulate.paths must be >= 1");
  }
  if (const YAML::Node s = root["integrate"]) {
    only_keys(s, {"f", "g", "alpha", "T", "n", "rs_check"}, "integrate");
    read(s, "f", cfg.integrate.f, "integrate");
    read(s, "g", cfg.integrate.g, "integrate");
    read(s, "alpha", cfg.integrate.alpha, "integrate");
    read(s, "T", cfg.integrate.T, "integrate");
    read(s, "n", cfg.integrate.n, "integrate");
    read(s, "rs_check", cfg.integrate.rs_check, "integrate");
  }
  if (const YAML::Node s = root["check"]) {
    only_keys(s, {"condition", "p", "alpha", "kernel", "noise", "E", "continuous_martingale", "beta", "rho",
                  "fast_path", "resolution", "T", "inner_tol"},
              "check");
    auto& c = cfg.check;
    read(s, "condition", c.condition, "check");
    if (c.condition != "Dp" && c.condition != "D2" && c.condition != "Dinf") {
      throw ConfigError("check.condition: expected Dp, D2 or Dinf");
    }
    if (s["kernel"]) c.kernel = kernel(s["kernel"], "check.kernel");
    if (s["noise"]) c.noise = driver(s["noise"], "check.noise");
    if (const YAML::Node e = s["E"]) {
      only_keys(e, {"type", "sigma2", "path"}, "check.E");
      std::string type = "linear";
      read(e, "type", type, "check.E");
      if (type != "linear" && type != "csv") throw ConfigError("check.E.type: expected linear or csv");
      c.E_type = type;
      read(e, "sigma2", c.sigma2, "check.E");
      read(e, "path", c.E_path, "check.E");
      if (type == "csv" && c.E_path.empty()) throw ConfigError("check.E.path: required for type csv");
    }
    read(s, "p", c.p, "check");
    read(s, "alpha", c.alpha, "check");
    read(s, "continuous_martingale", c.continuous_martingale, "check");
    read(s, "beta", c.beta, "check");
    read(s, "rho", c.rho, "check");
    read(s, "fast_path", c.fast_path, "check");
    read(s, "resolution", c.resolution, "check");
    read(s, "T", c.T, "check");
    read(s, "inner_tol", c.inner_tol, "check");
    if (c.kernel.type == "none") throw ConfigError("check.kernel: a kernel is required");
  }
  if (const YAML::Node s = root["verify"]) {
    only_keys(s, {"suite", "N", "resolution"}, "verify");
    read(s, "suite", cfg.verify.suite, "verify");
    read(s, "N", cfg.verify.N, "verify");
    read(s, "resolution", cfg.verify.resolution, "verify");
  }
  if (const YAML::Node s = root["output"]) {
    only_keys(s, {"dir", "format"}, "output");
    read(s, "dir", cfg.output.dir, "output");
    read(s, "format", cfg.output.format, "output");
  }
  if (cfg.output.format != "csv" && cfg.output.format != "json") throw ConfigError("output.format: expected csv or json");
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace fracvolt::cli
