#include "otto/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace otto {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  KeyValueConfig cfg;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("malformed config line: " + t);
    cfg.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return cfg;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) { kv_[key] = value; }

bool KeyValueConfig::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string KeyValueConfig::get_string(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) throw ConfigError("missing config key: " + key);
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key, std::string fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key) const {
  try {
    return std::stod(get_string(key));
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    throw ConfigError("invalid numeric value for key: " + key);
  }
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::int64_t KeyValueConfig::get_int(const std::string& key) const {
  try {
    return std::stoll(get_string(key));
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    throw ConfigError("invalid integer value for key: " + key);
  }
}

std::int64_t KeyValueConfig::get_int(const std::string& key, std::int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

GridDensity ExperimentConfig::initial_density() const {
  if (const auto* g = std::get_if<GaussianInit>(&init)) {
    return gaussian_density(grid, g->mean, g->var);
  }
  return std::get<GridInit>(init).density;
}

ExperimentConfig build_experiment(const KeyValueConfig& cfg) {
  ExperimentConfig exp;

  std::string kind = cfg.get_string("potential.kind");
  if (kind == "zero") {
    exp.pot = Potential::zero();
  } else if (kind == "quadratic") {
    exp.pot = Potential::quadratic(cfg.get_double("potential.theta", 0.25),
                                   cfg.get_double("potential.c", 0.0));
  } else if (kind == "double_well") {
    exp.pot = Potential::double_well(cfg.get_double("potential.alpha", 1.0));
  } else {
    throw ConfigError("unknown potential.kind: " + kind + " (zero|quadratic|double_well)");
  }

  exp.grid.x_min = cfg.get_double("grid.x_min", -10.0);
  exp.grid.x_max = cfg.get_double("grid.x_max", 10.0);
  std::int64_t n = cfg.get_int("grid.n", 2048);
  if (exp.grid.x_min >= exp.grid.x_max) throw ConfigError("grid.x_min must be below grid.x_max");
  if (n < 16) throw ConfigError("grid.n too small (>= 16 required)");
  exp.grid.n = static_cast<std::size_t>(n);

  std::string init_kind = cfg.get_string("init.kind", "gaussian");
  if (init_kind == "gaussian") {
    double var = cfg.get_double("init.var", 2.0);
    if (var <= 0.0) throw ConfigError("init.var must be > 0");
    exp.init = GaussianInit{cfg.get_double("init.mean", 1.0), var};
  } else if (init_kind == "grid") {
    exp.init = GridInit{read_density_csv(cfg.get_string("init.file"))};
  } else {
    throw ConfigError("unknown init.kind: " + init_kind + " (gaussian|grid)");
  }

  exp.t0 = cfg.get_double("t0", 0.0);
  exp.horizon = cfg.get_double("horizon", 1.0);
  if (exp.horizon <= exp.t0) throw ConfigError("horizon must exceed t0");
  exp.dt_pde = cfg.get_double("dt_pde", 1e-4);
  if (exp.dt_pde <= 0.0) throw ConfigError("dt_pde must be > 0");
  exp.dt_sde = cfg.get_double("dt_sde", 1e-3);
  if (exp.dt_sde <= 0.0 || exp.dt_sde > 1e-2)
    throw ConfigError("dt_sde must lie in (0, 1e-2]");

  std::int64_t m = cfg.get_int("m_paths", 100000);
  if (m < 100) throw ConfigError("m_paths too small (>= 100 required)");
  exp.m_paths = static_cast<std::size_t>(m);
  exp.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));

  std::int64_t sp = cfg.get_int("save_stride_pde", 10);
  std::int64_t ss = cfg.get_int("save_stride_sde", 5);
  if (sp < 1 || ss < 1) throw ConfigError("save strides must be >= 1");
  exp.save_stride_pde = static_cast<std::size_t>(sp);
  exp.save_stride_sde = static_cast<std::size_t>(ss);

  if (cfg.has("perturbation.amplitude")) {
    double amp = cfg.get_double("perturbation.amplitude");
    double center = cfg.get_double("perturbation.center", 0.0);
    double radius = cfg.get_double("perturbation.radius", 1.0);
    if (radius <= 0.0) throw ConfigError("perturbation.radius must be > 0");
    if (amp != 0.0) exp.pert = Perturbation(center, radius, amp);
  }

  exp.out_dir = cfg.get_string("out", "out");
  return exp;
}

}  // namespace otto
