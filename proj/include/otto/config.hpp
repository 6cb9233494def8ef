#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "otto/grid_density.hpp"
#include "otto/potential.hpp"
#include "otto/sde.hpp"

namespace otto {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key=value store: file lines plus --key value overrides.
class KeyValueConfig {
 public:
  static KeyValueConfig from_file(const std::string& path);
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get_string(const std::string& key) const;           // ConfigError if missing
  std::string get_string(const std::string& key, std::string fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

// Fully resolved experiment: validated potential, grid, laws, horizons, seeds.
struct ExperimentConfig {
  Potential pot = Potential::quadratic(0.25);
  std::optional<Perturbation> pert;
  Grid grid;
  InitLaw init = GaussianInit{1.0, 2.0};
  double t0 = 0.0;
  double horizon = 1.0;
  double dt_pde = 1e-4;
  double dt_sde = 1e-3;
  std::size_t m_paths = 100000;
  std::uint64_t seed = 1;
  std::size_t save_stride_pde = 10;
  std::size_t save_stride_sde = 5;
  std::string out_dir = "out";

  GridDensity initial_density() const;
  std::string describe_potential() const { return pot.describe(); }
};

// Builds and validates; throws ConfigError naming the offending key.
ExperimentConfig build_experiment(const KeyValueConfig& cfg);

}  // namespace otto
