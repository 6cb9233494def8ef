#pragma once

#include <cstddef>
#include <vector>

#include "otto/functionals.hpp"
#include "otto/grid_density.hpp"
#include "otto/pde.hpp"
#include "otto/potential.hpp"

namespace otto {

// Quantile function F^{-1}(u) sampled on a uniform u-grid clipped to
// [u_clip, 1-u_clip]; the optimal 1-D coupling is the quantile coupling.
struct QuantileRep {
  std::size_t n_q = 4096;
  double u_clip = 1e-6;
  std::vector<double> u;       // midpoints of the clipped range
  std::vector<double> values;  // F^{-1}(u), non-decreasing
};
QuantileRep quantile_rep(const GridDensity& d, std::size_t n_q = 4096, double u_clip = 1e-6);

// W2 = sqrt( int_0^1 (F1^{-1} - F2^{-1})^2 du ), midpoint rule on the u-grid.
double wasserstein2(const GridDensity& d1, const GridDensity& d2, std::size_t n_q = 4096);

// T = F1^{-1} o F0 at the nodes of d0; gamma = T - id.
struct BrenierMap {
  Grid grid;
  std::vector<double> T;
  std::vector<double> gamma;
};
BrenierMap brenier_map(const GridDensity& d0, const GridDensity& d1);

// Density of (id + t gamma)_# P0, resampled to the x-grid through monotone cubic
// interpolation of the transported CDF.
GridDensity displacement_interpolation(const GridDensity& d0, const GridDensity& d1, double t);

// d/dt H(P_t|Q) at t=0 along the displacement interpolation:
// int (score(p0) + 2 Psi') gamma p0 dx.
double geodesic_entropy_slope(const GridDensity& d0, const GridDensity& d1, const Potential& pot);

// W2(p(t0+h), p(t0-h)) / 2h, one-sided at the flow ends; h must be resolvable
// by the snapshot spacing.
double metric_derivative(const FlowSnapshotSeries& flow, double t0, double h);

// Fills the W2-rate column of the diagnostics at every interior snapshot.
void fill_transport_diagnostics(FlowDiagnostics& diag, const FlowSnapshotSeries& flow);

}  // namespace otto
