#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "otto/functionals.hpp"
#include "otto/grid_density.hpp"
#include "otto/pchip.hpp"
#include "otto/potential.hpp"

namespace otto {

struct DiscretizationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Saved states of the Fokker-Planck flow dp/dt = ((Psi'+beta) p)' + 1/2 p''.
struct FlowSnapshotSeries {
  Grid grid;
  Potential pot;
  std::optional<Perturbation> pert;
  std::vector<double> times;
  std::vector<std::vector<double>> states;

  double t0() const { return times.front(); }
  double t_end() const { return times.back(); }
  GridDensity density(std::size_t k) const { return {grid, states[k]}; }
  std::size_t nearest_index(double t) const;
};

// Exponentially fitted finite-volume discretization of the flux -(Psi'+beta) p - 1/2 p',
// advanced by implicit Euler with zero-flux boundaries. The fitting uses potential
// differences across each cell face, so the discrete Gibbs density is stationary to
// machine precision.
FlowSnapshotSeries solve_forward(const Potential& pot, const GridDensity& init, double t0,
                                 double t_end, double dt, std::size_t save_stride,
                                 const std::optional<Perturbation>& pert = std::nullopt);

// ell = p/q = p e^{2 Psi} at the nodes (floor-protected in the far tails).
std::vector<double> likelihood_ratio(const GridDensity& d, const Potential& pot);

struct GridFunctionSeries {
  Grid grid;
  std::vector<double> times;
  std::vector<std::vector<double>> states;
};

// d ell/dt = 1/2 ell'' - Psi' ell'                                        (unperturbed)
// d ell/dt = 1/2 ell'' + (beta - Psi') ell' + ell (div beta - 2 beta Psi') (perturbed)
// Implicit Euler, central differences; one-sided stencils at the domain ends.
GridFunctionSeries solve_backward_kolmogorov(const Potential& pot, const Grid& g,
                                             std::vector<double> ell0, double t0, double t_end,
                                             double dt, std::size_t save_stride,
                                             const std::optional<Perturbation>& pert = std::nullopt);

// Pointwise ratio Y(t,x) = p_pert(t,x)/p(t,x) with floor-protected denominator, plus
// sup_{central window} |Y-1|/(t-t0) per saved time after t0 (the linear-deviation rate).
struct PerturbationRatioSeries {
  GridFunctionSeries ratio;
  std::vector<double> sup_deviation_rate;
};
PerturbationRatioSeries perturbation_ratio(const FlowSnapshotSeries& flow,
                                           const FlowSnapshotSeries& pflow);

// Space-time interpolant of log p: monotone cubic in x per snapshot, linear in t
// between snapshots; quadratic log-density tails outside the clip region (affine score).
class FlowInterpolant {
 public:
  explicit FlowInterpolant(const FlowSnapshotSeries& flow, double floor_rel = 1e-14);

  double log_p(double t, double x) const;
  double score_p(double t, double x) const;  // d/dx log p
  double t_min() const { return times_.front(); }
  double t_max() const { return times_.back(); }

 private:
  struct Slice {
    Pchip logp;          // over the clip window
    double x_lo, x_hi;   // window bounds
    double val_lo, val_hi;
    double sc_lo, sc_hi;     // score at the window edges
    double scp_lo, scp_hi;   // score slope at the edges (affine tails)
    double logp_at(double x) const;
    double score_at(double x) const;
  };
  std::size_t bracket(double t, double& lambda) const;
  std::vector<double> times_;
  std::vector<Slice> slices_;
};

FlowDiagnostics compute_flow_diagnostics(const FlowSnapshotSeries& flow);

void write_flow_csv(const std::string& dir, const FlowSnapshotSeries& flow);

}  // namespace otto
