#pragma once

#include <string>
#include <vector>

#include "otto/grid_density.hpp"
#include "otto/potential.hpp"

namespace otto {

// H(P|Q) = int p log(p/q) dx, q = e^{-2 Psi}; integrand is 0 where p is below the floor.
double relative_entropy(const GridDensity& d, const Potential& pot);

// I(P|Q) = int |d/dx log p + 2 Psi'|^2 p dx.
double relative_fisher_information(const GridDensity& d, const Potential& pot);

// F = int Psi p dx + 1/2 int p log p dx; equals H/2.
double free_energy(const GridDensity& d, const Potential& pot);

// v = -(1/2 d/dx log p + Psi') at the nodes; int |v|^2 p dx = I/4.
std::vector<double> velocity_field(const GridDensity& d, const Potential& pot);
double velocity_energy(const GridDensity& d, const Potential& pot);

// H(P|Q) = H(P|Qref) - int x^2 dP - log int e^{-x^2 - 2 Psi} dx, where Qref has
// density e^{-x^2} q / Z with respect to Lebesgue measure.
struct SigmaFiniteDecomposition {
  double h_vs_reference;
  double quad_moment;
  double log_partition;
  double reconstructed_h;
};
SigmaFiniteDecomposition sigma_finite_decomposition(const GridDensity& d, const Potential& pot);

// Per saved time: entropy, Fisher information, free energy, FD entropy slope,
// and (once filled by the transport module) Wasserstein rate columns.
struct FlowDiagnostics {
  std::vector<double> t;
  std::vector<double> H;
  std::vector<double> I;
  std::vector<double> F;
  std::vector<double> dHdt_fd;      // centered; one-sided at the ends
  std::vector<double> w2_rate;      // metric derivative, NaN until filled
  std::vector<double> half_sqrt_i;  // 0.5 sqrt(I)
  bool has_transport = false;
};

void write_diagnostics_csv(const std::string& path, const FlowDiagnostics& diag);

}  // namespace otto
