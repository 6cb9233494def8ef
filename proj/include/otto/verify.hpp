#pragma once

#include <string>
#include <vector>

#include "otto/pde.hpp"
#include "otto/sde.hpp"
#include "otto/transport.hpp"

namespace otto {

struct VerificationRecord {
  std::string name;
  double context = 0.0;  // t0 or check time
  double lhs = 0.0;
  double rhs = 0.0;
  double tolerance = 0.0;
  bool relative = true;  // tolerance interpreted relative to |rhs| (plus a small floor)
  bool pass = false;
  std::string note;
};

VerificationRecord make_record(std::string name, double context, double lhs, double rhs,
                               double tol, bool relative, std::string note = "");

// dH/dt vs -I/2 (finite differences on the snapshot grid, one-sided Richardson at the
// flow start) and the integral form H(t) - H(t0) vs -1/2 int I du.
std::vector<VerificationRecord> verify_de_bruijn(const FlowSnapshotSeries& flow,
                                                 const std::vector<double>& t_checks,
                                                 double rel_tol = 0.02);

// Metric derivative vs (1/2) sqrt(I); also the entropy-per-Wasserstein slope vs -sqrt(I).
std::vector<VerificationRecord> verify_wasserstein_slope(const FlowSnapshotSeries& flow,
                                                         const std::vector<double>& t_checks,
                                                         double rel_tol = 0.01);

// Right-sided rates of the perturbed flow at t0 against the inner-product formulas
// (a = score of ell at t0, b = beta): entropy rate -1/2 <a, a+2b>, W2 rate 1/2 |a+2b|,
// slope difference |a| - <a,(a+2b)>/|a+2b| >= 0, and the integration-by-parts identity
// int (div beta - 2 beta Psi') p dx = -<a,b>.
std::vector<VerificationRecord> verify_steepest_descent(const FlowSnapshotSeries& flow,
                                                        const FlowSnapshotSeries& pflow,
                                                        const Perturbation& pert, double t0,
                                                        double rel_tol = 0.03,
                                                        double identity_tol = 1e-5);

// H(P0|Q) - H(P1|Q) <= -<score_ell0, gamma>_P0 - (kappa/2) W2^2 <= W2 sqrt(I0) - (kappa/2) W2^2,
// plus the finite-difference cross-check of the geodesic entropy slope.
std::vector<VerificationRecord> verify_hwi(const GridDensity& d0, const GridDensity& d1,
                                           const Potential& pot);

// W2^2 <= (2/kappa) H and H <= I/(2 kappa) against the normalized Gibbs law.
std::vector<VerificationRecord> verify_talagrand_lsi(const GridDensity& d, const Potential& pot);

// H(t) <= H(t0) e^{-kappa (t-t0)} at every snapshot; fitted decay exponent in the note.
VerificationRecord verify_exponential_decay(const FlowSnapshotSeries& flow, double kappa);

// Reversed-ensemble marginals against the forward snapshots: L1 distance of the KDE
// and first/second moment discrepancies at each checkpoint.
std::vector<VerificationRecord> verify_time_reversal(const FlowSnapshotSeries& flow,
                                                     const PathEnsemble& reversed,
                                                     const std::vector<double>& t_checks,
                                                     double l1_tol = 0.05, double mean_tol = 0.02,
                                                     double var_tol = 0.05);

void write_records_csv(const std::string& path, const std::vector<VerificationRecord>& records);
bool all_pass(const std::vector<VerificationRecord>& records);

}  // namespace otto
