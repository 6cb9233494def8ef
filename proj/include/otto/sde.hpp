#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "otto/pde.hpp"
#include "otto/potential.hpp"

namespace otto {

enum class PathOrientation { Forward, Reversed };

// Simulated diffusion paths on a shared time grid, thinned to save_stride steps.
// Identical (seed, parameters) reproduce the states bitwise, independent of the
// number of workers: path i draws from its own substream keyed by (seed, i).
struct PathEnsemble {
  std::vector<double> times;  // saved times; descending for reversed runs
  std::size_t m_paths = 0;
  PathOrientation orientation = PathOrientation::Forward;
  std::uint64_t seed = 0;
  double dt = 0.0;
  std::size_t save_stride = 1;
  std::vector<double> states;  // m_paths x times.size(), row-major

  double at(std::size_t path, std::size_t k) const { return states[path * times.size() + k]; }
  std::size_t nearest_index(double t) const;
};

struct GaussianInit {
  double mean = 0.0;
  double var = 1.0;
};
struct GridInit {
  GridDensity density;  // sampled by inverse CDF
};
using InitLaw = std::variant<GaussianInit, GridInit>;

// Euler-Maruyama for dX = -(Psi' + beta)(X) dt + dW.
PathEnsemble simulate_forward(const Potential& pot, const InitLaw& init, double t0, double T,
                              double dt, std::size_t save_stride, std::size_t m_paths,
                              std::uint64_t seed,
                              const std::optional<Perturbation>& pert = std::nullopt);
// Reference implementation without OpenMP; must match simulate_forward bitwise.
PathEnsemble simulate_forward_serial(const Potential& pot, const InitLaw& init, double t0,
                                     double T, double dt, std::size_t save_stride,
                                     std::size_t m_paths, std::uint64_t seed,
                                     const std::optional<Perturbation>& pert = std::nullopt);

// Drift of the time-reversed diffusion: d/dx log p(t,x) + Psi'(x).
double reversed_drift(const FlowInterpolant& p_interp, const Potential& pot, double t, double x);

// Euler-Maruyama in reversed time s from draws of p(T, .):
// X(s+ds) = X(s) + (d/dx log p + Psi')(T-s, X(s)) ds + sqrt(ds) Z.
PathEnsemble simulate_reversed(const FlowSnapshotSeries& flow, const Potential& pot, double dt,
                               std::size_t save_stride, std::size_t m_paths, std::uint64_t seed);
PathEnsemble simulate_reversed_serial(const FlowSnapshotSeries& flow, const Potential& pot,
                                      double dt, std::size_t save_stride, std::size_t m_paths,
                                      std::uint64_t seed);

// Empirical moment over paths at saved index k (fixed-order summation).
double ensemble_mean(const PathEnsemble& e, std::size_t k);
double ensemble_var(const PathEnsemble& e, std::size_t k);

void write_ensemble_csv(const std::string& path, const PathEnsemble& e,
                        const std::string& potential_desc);

}  // namespace otto
