#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "otto/pde.hpp"
#include "otto/sde.hpp"

namespace otto {

// Row of a statistical report: one (test, s1, s2, phi) combination.
struct ReportRow {
  std::string test;
  double s1 = 0.0, s2 = 0.0;
  std::string phi;
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = true;
};
void write_report_csv(const std::string& path, const std::vector<ReportRow>& rows);
bool all_rows_pass(const std::vector<ReportRow>& rows);

// Processes along reversed paths, tabulated on the saved path grid:
//   log_ell(T-s) = log ell(T-s, X(T-s))
//   fisher(T-s)  = int_0^s [ scale/2 |d/dx log ell|^2 + sign (2 beta Psi' - div beta) ] du
//   qv_ref(T-s)  = int_0^s |d/dx log ell|^2 du   (expected quadratic variation of M)
// with left-endpoint quadrature in reversed time. The backward entropy martingale is
//   M(T-s) = (log_ell(T-s) - log_ell(T)) - fisher(T-s),
// an identity of the stored arrays. scale != 1 or sign != +1 build negative controls.
struct TrajectorialProcesses {
  double T = 0.0, t0 = 0.0;
  std::size_t m_paths = 0;
  std::vector<double> s_grid;  // ascending, s=0 at T
  std::vector<double> t_grid;  // forward times T-s
  std::vector<double> x;       // m x S
  std::vector<double> log_ell;
  std::vector<double> fisher;
  std::vector<double> qv_ref;
  bool perturbed = false;

  std::size_t n_s() const { return s_grid.size(); }
  double value(const std::vector<double>& a, std::size_t i, std::size_t k) const {
    return a[i * n_s() + k];
  }
  double martingale(std::size_t i, std::size_t k) const {
    return (value(log_ell, i, k) - value(log_ell, i, 0)) - value(fisher, i, k);
  }
  std::size_t index_of_t(double t) const;  // nearest node of t_grid
};

TrajectorialProcesses build_processes(const PathEnsemble& paths, const FlowSnapshotSeries& flow,
                                      const Potential& pot,
                                      const std::optional<Perturbation>& pert = std::nullopt,
                                      double fisher_scale = 1.0, double correction_sign = 1.0);
TrajectorialProcesses build_processes_serial(const PathEnsemble& paths,
                                             const FlowSnapshotSeries& flow, const Potential& pot,
                                             const std::optional<Perturbation>& pert = std::nullopt,
                                             double fisher_scale = 1.0,
                                             double correction_sign = 1.0);

// E[ (M(T-s2) - M(T-s1)) phi(X(T-s1)) ] = 0 for s2 > s1; |Z| < z_max per combination.
// Default test functions {1, x, x^2, exp(-x^2)}; default pairs: quartiles of [0, S-0.05].
std::vector<ReportRow> martingale_zero_drift_test(
    const TrajectorialProcesses& tp, std::vector<std::pair<double, double>> s_pairs = {},
    double z_max = 4.0);

// Realized quadratic variation of M vs accumulated |d/dx log ell|^2, aggregated over
// forward times in [t0 + t_skip, T]; pass if the ratio lies in [lo, hi].
struct QvResult {
  double ratio = 0.0;
  double realized = 0.0;
  double expected = 0.0;
  bool pass = false;
};
QvResult quadratic_variation_test(const TrajectorialProcesses& tp, double t_skip = 0.05,
                                  double lo = 0.95, double hi = 1.05);

// E_P[F(t0)] vs (1/2) int I dt from the snapshot series.
struct FisherExpectationResult {
  double mc = 0.0;
  double grid = 0.0;
  double rel_err = 0.0;
  bool pass = false;
};
FisherExpectationResult fisher_expectation_test(const TrajectorialProcesses& tp,
                                                const FlowSnapshotSeries& flow,
                                                double rel_tol = 0.02);

// Fontbona-Jourdain: under the stationary measure (paths started from the normalized
// Gibbs law), ell(T-s, X(T-s)) is a backward martingale and ell log ell a backward
// submartingale. flow supplies ell for a non-stationary initial law.
struct FontbonaJourdainResult {
  std::vector<ReportRow> drift_rows;           // zero-drift Z statistics
  double regression_sup_discrepancy = 0.0;     // sup |NW regression - ell(t2,.)| / (1+ell)
  std::vector<double> ell_log_ell_means;       // along ascending s
  std::vector<double> ell_log_ell_ses;
  bool submartingale_pass = true;
  bool pass = false;
};
FontbonaJourdainResult fontbona_jourdain_test(const Potential& pot, const FlowSnapshotSeries& flow,
                                              std::size_t m_paths, std::uint64_t seed, double dt,
                                              std::size_t save_stride);

// E[2 dt(log ell)] = 0 at the check times: Monte Carlo |Z| < z_max and, unperturbed,
// the grid quadrature |int 2 dt(log p) p dx| < quad_tol. The perturbed variant tests
// E[ lap ell / ell - (d/dx log ell) 2 Psi' ] = 0 under the perturbed law.
std::vector<ReportRow> forward_identity_test(const PathEnsemble& paths,
                                             const FlowSnapshotSeries& flow, const Potential& pot,
                                             const std::optional<Perturbation>& pert,
                                             const std::vector<double>& t_checks,
                                             double z_max = 4.0, double quad_tol = 1e-4);

// Conditional dissipation rate: regression of (log ell(t0) - log ell(t0+h))/h on
// X(t0+h) vs 1/2 |d/dx log ell(t0,.)|^2, L^2(P)-weighted relative error below tol.
struct RateResult {
  double weighted_rel_err = 0.0;
  bool pass = false;
};
RateResult trajectorial_rate_test(const TrajectorialProcesses& tp, const FlowInterpolant& interp,
                                  const Potential& pot, double t0, double h, double tol = 0.10);

// Perturbed-ratio rate: regression of (log ell_beta - log ell)(t0+h)/h on X(t0+h) vs
// div beta + beta d/dx log p(t0,.), weighted over the support of beta.
RateResult perturbed_rate_test(const TrajectorialProcesses& tp_beta,
                               const TrajectorialProcesses& tp_base, const FlowInterpolant& interp,
                               const Perturbation& pert, double t0, double h, double tol = 0.15);

// Nadaraya-Watson regression with fixed accumulation order; bandwidth <= 0 selects
// the Silverman rule. Sharp deterministic targets need an explicit small bandwidth.
std::vector<double> nadaraya_watson(const std::vector<double>& xs, const std::vector<double>& ys,
                                    const std::vector<double>& eval_at, double bandwidth = 0.0);

// Local-linear kernel regression: first-order fit per evaluation point removes the
// design-density gradient bias of Nadaraya-Watson, so noisy smooth targets can use
// a wider kernel. bandwidth <= 0 selects twice the Silverman width.
std::vector<double> local_linear_regression(const std::vector<double>& xs,
                                            const std::vector<double>& ys,
                                            const std::vector<double>& eval_at,
                                            double bandwidth = 0.0);

}  // namespace otto
