// Acceptance suite: one binary, one criterion per invocation (1..11), printing a
// pass/fail line per criterion. Exit code is the number of failed criteria.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "otto/functionals.hpp"
#include "otto/oracle.hpp"
#include "otto/parallel.hpp"
#include "otto/pde.hpp"
#include "otto/sde.hpp"
#include "otto/stochastic_analysis.hpp"
#include "otto/transport.hpp"
#include "otto/verify.hpp"

using namespace otto;

namespace {

const Grid kGrid{-10.0, 10.0, 2048};
const Potential kQuad = Potential::quadratic(0.25);
const Potential kQuadNorm = Potential::quadratic(0.25, 0.25 * std::log(2.0 * M_PI));

GridDensity gibbs_of(const Potential& pot, const Grid& g = kGrid) {
  std::vector<double> q(g.n);
  for (std::size_t i = 0; i < g.n; ++i) q[i] = pot.gibbs_density(g.node(i));
  return normalize(g, std::move(q));
}

struct Checker {
  bool ok = true;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      std::printf("    failed: %s\n", what.c_str());
    }
  }
  void require_close(double value, double target, double tol, const std::string& what) {
    require(std::fabs(value - target) <= tol,
            what + " (value " + std::to_string(value) + ", target " + std::to_string(target) +
                ", tol " + std::to_string(tol) + ")");
  }
  void require_records(const std::vector<VerificationRecord>& recs, const std::string& what) {
    for (const auto& r : recs)
      require(r.pass, what + ": " + r.name + " lhs=" + std::to_string(r.lhs) +
                          " rhs=" + std::to_string(r.rhs));
  }
  void require_rows(const std::vector<ReportRow>& rows, const std::string& what) {
    for (const auto& r : rows)
      require(r.pass, what + ": " + r.test + "/" + r.phi + " stat=" + std::to_string(r.statistic));
  }
};

std::vector<double> ladder(double from, double to, int count) {
  std::vector<double> ts;
  for (int j = 0; j < count; ++j)
    ts.push_back(from + (to - from) * static_cast<double>(j + 1) / count);
  return ts;
}

// 1. Generalized de Bruijn identity: dH/dt = -I/2 along the OU flow.
bool criterion_1() {
  Checker c;
  FlowSnapshotSeries flow =
      solve_forward(kQuad, gaussian_density(kGrid, 1.0, 2.0), 0.0, 1.0, 1e-4, 10);
  std::vector<double> checks = ladder(0.0, 1.0, 10);
  checks.insert(checks.begin(), 0.0);
  auto recs = verify_de_bruijn(flow, checks, 0.02);
  c.require_records(recs, "de_bruijn");
  for (const auto& r : recs)
    if (r.name == "de_bruijn_slope" && r.context == 0.0)
      c.require_close(r.lhs, -0.75, 0.015, "slope at t0=0 vs oracle");
  return c.ok;
}

// 2. Local behavior of the Wasserstein distance: |p'|(t) = sqrt(I)/2.
bool criterion_2() {
  Checker c;
  FlowSnapshotSeries flow =
      solve_forward(kQuad, gaussian_density(kGrid, 1.0, 2.0), 0.0, 1.0, 1e-4, 10);
  std::vector<double> checks = ladder(0.0, 1.0, 9);
  checks.insert(checks.begin(), 0.0);
  auto recs = verify_wasserstein_slope(flow, checks, 0.01);
  c.require_records(recs, "wasserstein_slope");
  for (const auto& r : recs)
    if (r.name == "wasserstein_rate" && r.context == 0.0)
      c.require_close(r.lhs, 0.61237, 0.0061237, "metric derivative at t0=0 vs oracle");
  return c.ok;
}

// 3. Steepest descent under perturbations: four records of the slope analysis.
bool criterion_3() {
  Checker c;
  GridDensity init = gaussian_density(kGrid, 1.0, 2.0);
  Perturbation bump(0.0, 1.0, 0.2);
  FlowSnapshotSeries flow = solve_forward(kQuad, init, 0.0, 0.05, 1e-4, 10);
  FlowSnapshotSeries pflow = solve_forward(kQuad, init, 0.0, 0.05, 1e-4, 10, bump);
  auto recs = verify_steepest_descent(flow, pflow, bump, 0.0, 0.03, 1e-5);
  c.require_records(recs, "steepest_descent");
  for (const auto& r : recs) {
    if (r.name == "slope_difference") {
      c.require(r.rhs > 0.0, "slope difference strictly positive (quadrature)");
      c.require(r.lhs > 0.0, "slope difference strictly positive (finite differences)");
    }
  }
  return c.ok;
}

// 4. Trajectorial martingale with its negative control.
bool criterion_4() {
  Checker c;
  FlowSnapshotSeries flow =
      solve_forward(kQuad, gaussian_density(kGrid, 1.0, 2.0), 0.0, 1.0, 1e-4, 10);
  PathEnsemble paths =
      simulate_forward(kQuad, GaussianInit{1.0, 2.0}, 0.0, 1.0, 1e-3, 5, 100000, 441);
  TrajectorialProcesses tp = build_processes(paths, flow, kQuad);

  c.require_rows(martingale_zero_drift_test(tp), "zero drift");
  FisherExpectationResult fe = fisher_expectation_test(tp, flow, 0.02);
  c.require(fe.pass, "E[F(0)] vs (1/2) int I dt within 2% (rel err " +
                         std::to_string(fe.rel_err) + ")");
  QvResult qv = quadratic_variation_test(tp, 0.05, 0.95, 1.05);
  c.require(qv.pass, "QV ratio in [0.95, 1.05] (ratio " + std::to_string(qv.ratio) + ")");

  TrajectorialProcesses corrupted = build_processes(paths, flow, kQuad, std::nullopt, 1.5);
  c.require(!all_rows_pass(martingale_zero_drift_test(corrupted)),
            "scaled-Fisher negative control must fail");
  return c.ok;
}

// 5. Perturbed trajectorial martingale with the signed Fisher correction.
bool criterion_5() {
  Checker c;
  Perturbation bump(0.0, 1.0, 0.2);
  FlowSnapshotSeries pflow =
      solve_forward(kQuad, gaussian_density(kGrid, 1.0, 2.0), 0.0, 1.0, 1e-4, 10, bump);
  PathEnsemble ppaths =
      simulate_forward(kQuad, GaussianInit{1.0, 2.0}, 0.0, 1.0, 1e-3, 5, 100000, 552, bump);
  TrajectorialProcesses tpb = build_processes(ppaths, pflow, kQuad, bump);
  c.require_rows(martingale_zero_drift_test(tpb), "perturbed zero drift");
  return c.ok;
}

// 6. Fontbona-Jourdain martingale and its submartingale corollary.
bool criterion_6() {
  Checker c;
  FlowSnapshotSeries flow =
      solve_forward(kQuadNorm, gaussian_density(kGrid, 1.0, 2.0), 0.0, 0.5, 1e-4, 25);
  FontbonaJourdainResult fj = fontbona_jourdain_test(kQuadNorm, flow, 100000, 663, 1e-3, 25);
  c.require_rows(fj.drift_rows, "backward zero drift under Q");
  c.require(fj.submartingale_pass, "ell log ell non-decreasing in reversed time");
  c.require(fj.regression_sup_discrepancy < 0.10,
            "regression discrepancy (" + std::to_string(fj.regression_sup_discrepancy) + ")");
  return c.ok;
}

// 7. Time reversal recovers the forward marginals; stationary case symmetric.
bool criterion_7() {
  Checker c;
  FlowSnapshotSeries flow =
      solve_forward(kQuad, gaussian_density(kGrid, 1.0, 2.0), 0.0, 1.0, 1e-3, 1);
  PathEnsemble rev = simulate_reversed(flow, kQuad, 1e-3, 50, 100000, 774);
  c.require_records(verify_time_reversal(flow, rev, {0.25, 0.5, 0.75}, 0.05, 0.02, 0.05),
                    "OU reversal");

  FlowSnapshotSeries stat = solve_forward(kQuad, gibbs_of(kQuad), 0.0, 1.0, 1e-3, 1);
  PathEnsemble rev_s = simulate_reversed(stat, kQuad, 1e-3, 50, 100000, 775);
  c.require_records(verify_time_reversal(stat, rev_s, {0.25, 0.5, 0.75}, 0.05, 0.02, 0.05),
                    "stationary reversal");
  return c.ok;
}

// 8. HWI chain with the sharpened bound and the geodesic slope.
bool criterion_8() {
  Checker c;
  GridDensity d0 = gaussian_density(kGrid, 1.0, 2.0);
  GridDensity d1 = gibbs_of(kQuadNorm);
  auto recs = verify_hwi(d0, d1, kQuadNorm);
  c.require_records(recs, "hwi");
  for (const auto& r : recs) {
    if (r.name == "hwi_sharpened_bound") {
      c.require_close(r.lhs, 0.65343, 5e-3, "lhs H(P0|Q) - H(P1|Q)");
      c.require_close(r.rhs, 1.0, 5e-3, "sharpened rhs");
    }
    if (r.name == "hwi_chain_order") c.require_close(r.rhs, 1.03277, 5e-3, "standard rhs");
  }
  double slope = geodesic_entropy_slope(d0, d1, kQuadNorm);
  c.require_close(slope, 1.0 / std::sqrt(2.0) - 2.0, 5e-3, "geodesic entropy slope");
  return c.ok;
}

// 9. Talagrand + log-Sobolev at every snapshot over [0,4], plus the decay envelope.
bool criterion_9() {
  Checker c;
  FlowSnapshotSeries flow =
      solve_forward(kQuadNorm, gaussian_density(kGrid, 1.0, 2.0), 0.0, 4.0, 2e-4, 100);
  for (std::size_t k = 0; k < flow.times.size(); k += 2) {
    auto recs = verify_talagrand_lsi(flow.density(k), kQuadNorm);
    for (const auto& r : recs)
      c.require(r.pass, "t=" + std::to_string(flow.times[k]) + " " + r.name);
  }
  auto recs0 = verify_talagrand_lsi(flow.density(0), kQuadNorm);
  for (const auto& r : recs0) {
    if (r.name == "talagrand") {
      c.require_close(r.lhs, 1.17157, 2e-3, "W2^2 at t=0");
      c.require_close(r.rhs, 2.61371, 3e-3, "4H at t=0");
    }
    if (r.name == "log_sobolev") {
      c.require_close(r.lhs, 0.65343, 2e-3, "H at t=0");
      c.require_close(r.rhs, 1.5, 3e-3, "I at t=0");
    }
  }
  VerificationRecord decay = verify_exponential_decay(flow, kQuadNorm.curvature_bound());
  c.require(decay.pass, "exponential dissipation envelope");
  return c.ok;
}

// 10. Forward expectation identities: Monte Carlo and quadrature versions.
bool criterion_10() {
  Checker c;
  FlowSnapshotSeries flow =
      solve_forward(kQuad, gaussian_density(kGrid, 1.0, 2.0), 0.0, 1.0, 1e-4, 10);
  PathEnsemble paths =
      simulate_forward(kQuad, GaussianInit{1.0, 2.0}, 0.0, 1.0, 1e-3, 10, 100000, 885);
  auto rows = forward_identity_test(paths, flow, kQuad, std::nullopt, {0.3, 0.6}, 4.0, 1e-4);
  c.require_rows(rows, "unperturbed");

  Perturbation bump(0.0, 1.0, 0.2);
  FlowSnapshotSeries pflow =
      solve_forward(kQuad, gaussian_density(kGrid, 1.0, 2.0), 0.0, 1.0, 1e-4, 10, bump);
  PathEnsemble ppaths =
      simulate_forward(kQuad, GaussianInit{1.0, 2.0}, 0.0, 1.0, 1e-3, 10, 100000, 886, bump);
  c.require_rows(forward_identity_test(ppaths, pflow, kQuad, bump, {0.3, 0.6}, 4.0, 1e-4),
                 "perturbed");
  return c.ok;
}

// 11. Double-well property suite: structural checks, no oracle.
bool criterion_11() {
  Checker c;
  Potential dw = Potential::double_well(1.0);
  Grid g{-4.0, 4.0, 2048};
  GridDensity init = gaussian_density(g, 0.0, 0.25);
  FlowSnapshotSeries flow = solve_forward(dw, init, 0.0, 1.0, 1e-4, 10);

  double prev_h = 1e300;
  for (std::size_t k = 0; k < flow.times.size(); ++k) {
    double mass = trapezoid(g, flow.states[k]);
    if (std::fabs(mass - 1.0) >= 1e-9) {
      c.require(false, "mass conservation at t=" + std::to_string(flow.times[k]));
      break;
    }
    for (double v : flow.states[k])
      if (v < 0.0) {
        c.require(false, "positivity");
        break;
      }
    double h = relative_entropy(flow.density(k), dw);
    c.require(h <= prev_h + 1e-8 * std::fabs(prev_h),
              "entropy decrease at t=" + std::to_string(flow.times[k]));
    prev_h = h;
  }

  c.require_records(verify_de_bruijn(flow, ladder(0.0, 1.0, 8), 0.05), "double-well de Bruijn");

  PathEnsemble paths =
      simulate_forward(dw, GaussianInit{0.0, 0.25}, 0.0, 1.0, 1e-3, 5, 100000, 997);
  TrajectorialProcesses tp = build_processes(paths, flow, dw);
  QvResult qv = quadratic_variation_test(tp, 0.05, 0.90, 1.10);
  c.require(qv.pass, "QV ratio in [0.9, 1.1] (ratio " + std::to_string(qv.ratio) + ")");

  Grid g2{-4.0, 4.0, 4096};
  FlowSnapshotSeries fine =
      solve_forward(dw, gaussian_density(g2, 0.0, 0.25), 0.0, 1.0, 5e-5, 20000);
  double h_base = relative_entropy(flow.density(flow.times.size() - 1), dw);
  double h_fine = relative_entropy(fine.density(fine.times.size() - 1), dw);
  c.require(std::fabs(h_base - h_fine) < 1e-3,
            "self-convergence of H(t_end) (delta " + std::to_string(h_base - h_fine) + ")");
  return c.ok;
}

struct Entry {
  int id;
  const char* label;
  bool (*run)();
};

const Entry kCriteria[] = {
    {1, "generalized de Bruijn identity", criterion_1},
    {2, "Wasserstein slope", criterion_2},
    {3, "steepest descent under perturbations", criterion_3},
    {4, "trajectorial martingale", criterion_4},
    {5, "perturbed trajectorial martingale", criterion_5},
    {6, "Fontbona-Jourdain", criterion_6},
    {7, "time reversal", criterion_7},
    {8, "HWI chain", criterion_8},
    {9, "Talagrand, log-Sobolev, exponential decay", criterion_9},
    {10, "forward identities", criterion_10},
    {11, "double-well property suite", criterion_11},
};

}  // namespace

int main(int argc, char** argv) {
  configure_threads_from_env();
  int only = 0;
  if (argc > 1 && std::strcmp(argv[1], "all") != 0) only = std::atoi(argv[1]);

  int failures = 0;
  for (const Entry& e : kCriteria) {
    if (only != 0 && e.id != only) continue;
    bool ok = false;
    try {
      ok = e.run();
    } catch (const std::exception& ex) {
      std::printf("    exception: %s\n", ex.what());
    }
    std::printf("%s criterion_%d %s\n", ok ? "PASS" : "FAIL", e.id, e.label);
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  return failures;
}
