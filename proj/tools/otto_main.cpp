// Batch experiment runner: flow, simulate and verify subcommands emitting CSV reports.

#include <cmath>
#include <cstring>
#include <iostream>
#include <string>
#include <vector>

#include "otto/config.hpp"
#include "otto/csv.hpp"
#include "otto/functionals.hpp"
#include "otto/oracle.hpp"
#include "otto/parallel.hpp"
#include "otto/pde.hpp"
#include "otto/sde.hpp"
#include "otto/stochastic_analysis.hpp"
#include "otto/transport.hpp"
#include "otto/verify.hpp"

namespace {

using namespace otto;

const std::vector<std::string> kVerifyNames = {
    "de_bruijn",    "wasserstein_slope", "steepest_descent", "hwi",
    "talagrand_lsi", "exp_decay",        "time_reversal",    "martingale",
    "fontbona_jourdain", "forward_identity", "trajectorial_rate"};

struct CliOptions {
  std::string command;
  KeyValueConfig cfg;
  std::string which = "all";
  bool negative_control = false;
  bool reversed = false;
};

CliOptions parse_cli(int argc, char** argv) {
  if (argc < 2) throw ConfigError("usage: otto <flow|simulate|verify> [--config PATH] [--out DIR] [--seed N] [--which NAME] [--negative-control] [--key value ...]");
  CliOptions opt;
  opt.command = argv[1];
  for (int i = 2; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--negative-control") {
      opt.negative_control = true;
      continue;
    }
    if (arg == "--reversed") {
      opt.reversed = true;
      continue;
    }
    if (arg.rfind("--", 0) != 0) throw ConfigError("unexpected argument: " + arg);
    if (i + 1 >= argc) throw ConfigError("flag needs a value: " + arg);
    std::string key = arg.substr(2);
    std::string value = argv[++i];
    if (key == "config") {
      KeyValueConfig file_cfg = KeyValueConfig::from_file(value);
      for (const auto& [k, v] : file_cfg.entries())
        if (!opt.cfg.has(k)) opt.cfg.set(k, v);
    } else if (key == "which") {
      opt.which = value;
    } else {
      opt.cfg.set(key, value);
    }
  }
  return opt;
}

Potential normalized_version(const Potential& pot, const Grid& g) {
  if (pot.kind() != PotentialKind::Quadratic)
    throw ConfigError("this verification needs a normalizable quadratic potential");
  Potential base = Potential::quadratic(pot.theta(), 0.0);
  double c = 0.5 * std::log(base.gibbs_mass(g));
  if (c < 0.0) throw ConfigError("cannot normalize: additive constant would be negative");
  return Potential::quadratic(pot.theta(), c);
}

std::vector<double> interior_times(double t0, double T, std::size_t count) {
  std::vector<double> ts;
  for (std::size_t j = 1; j <= count; ++j)
    ts.push_back(t0 + (T - t0) * static_cast<double>(j) / static_cast<double>(count));
  return ts;
}

// merged key=value state; reading it back reproduces the run exactly
void write_resolved_config(const KeyValueConfig& cfg, const std::string& out_dir) {
  CsvFile out(out_dir + "/config_used.cfg");
  for (const auto& [k, v] : cfg.entries()) out.line(k + " = " + v);
  out.close();
}

VerificationRecord row_to_record(const ReportRow& row) {
  VerificationRecord rec;
  rec.name = row.test + "/" + row.phi;
  rec.context = row.s1;
  rec.lhs = row.statistic;
  rec.rhs = 0.0;
  rec.tolerance = row.threshold;
  rec.relative = false;
  rec.pass = row.pass;
  return rec;
}

int cmd_flow(const CliOptions& opt) {
  ExperimentConfig exp = build_experiment(opt.cfg);
  write_resolved_config(opt.cfg, exp.out_dir);
  FlowSnapshotSeries flow = solve_forward(exp.pot, exp.initial_density(), exp.t0, exp.horizon,
                                          exp.dt_pde, exp.save_stride_pde, exp.pert);
  FlowDiagnostics diag = compute_flow_diagnostics(flow);
  fill_transport_diagnostics(diag, flow);
  write_diagnostics_csv(exp.out_dir + "/flow_diagnostics.csv", diag);
  write_flow_csv(exp.out_dir + "/snapshots", flow);
  std::cout << "flow: " << flow.times.size() << " snapshots -> " << exp.out_dir << "\n";
  return 0;
}

int cmd_simulate(const CliOptions& opt) {
  ExperimentConfig exp = build_experiment(opt.cfg);
  write_resolved_config(opt.cfg, exp.out_dir);
  PathEnsemble paths = simulate_forward(exp.pot, exp.init, exp.t0, exp.horizon, exp.dt_sde,
                                        exp.save_stride_sde, exp.m_paths, exp.seed, exp.pert);
  write_ensemble_csv(exp.out_dir + "/ensemble.csv", paths, exp.describe_potential());

  FlowSnapshotSeries flow = solve_forward(exp.pot, exp.initial_density(), exp.t0, exp.horizon,
                                          exp.dt_pde, exp.save_stride_pde, exp.pert);
  {
    CsvFile out(exp.out_dir + "/marginal_comparison.csv");
    out.line("t,l1_kde_vs_pde,mean_mc,mean_pde,var_mc,var_pde");
    for (double t : interior_times(exp.t0, exp.horizon, 4)) {
      std::size_t kp = paths.nearest_index(t);
      std::size_t kf = flow.nearest_index(paths.times[kp]);
      std::vector<double> xs(paths.m_paths);
      for (std::size_t i = 0; i < paths.m_paths; ++i) xs[i] = paths.at(i, kp);
      GridDensity kde = from_samples(xs, exp.grid);
      GridDensity ref = flow.density(kf);
      double mu = moment(ref, 1);
      out.row({paths.times[kp], l1_distance(kde, ref), ensemble_mean(paths, kp), mu,
               ensemble_var(paths, kp), moment(ref, 2) - mu * mu});
    }
    out.close();
  }

  if (opt.reversed) {
    PathEnsemble rev = simulate_reversed(flow, exp.pot, exp.dt_sde, exp.save_stride_sde,
                                         exp.m_paths, exp.seed + 1);
    auto recs = verify_time_reversal(flow, rev, interior_times(exp.t0, exp.horizon, 3));
    write_records_csv(exp.out_dir + "/reversal_report.csv", recs);
    std::cout << "simulate: reversal report " << (all_pass(recs) ? "pass" : "FAIL") << "\n";
    return all_pass(recs) ? 0 : 1;
  }
  std::cout << "simulate: " << exp.m_paths << " paths -> " << exp.out_dir << "\n";
  return 0;
}

void run_one_verification(const std::string& name, const ExperimentConfig& exp,
                          bool negative_control, std::vector<VerificationRecord>& records) {
  const double t0 = exp.t0, T = exp.horizon;
  auto make_flow = [&](const Potential& pot, std::optional<Perturbation> pert, double from,
                       double to, const GridDensity& init) {
    return solve_forward(pot, init, from, to, exp.dt_pde, exp.save_stride_pde, pert);
  };
  Perturbation pert = exp.pert ? *exp.pert : Perturbation(0.0, 1.0, 0.2);

  if (name == "de_bruijn") {
    FlowSnapshotSeries flow = make_flow(exp.pot, std::nullopt, t0, T, exp.initial_density());
    auto recs = verify_de_bruijn(flow, interior_times(t0, T, 10));
    records.insert(records.end(), recs.begin(), recs.end());
  } else if (name == "wasserstein_slope") {
    FlowSnapshotSeries flow = make_flow(exp.pot, std::nullopt, t0, T, exp.initial_density());
    std::vector<double> ts = interior_times(t0, T, 9);
    ts.push_back(t0);
    auto recs = verify_wasserstein_slope(flow, ts);
    records.insert(records.end(), recs.begin(), recs.end());
  } else if (name == "steepest_descent") {
    FlowSnapshotSeries flow = make_flow(exp.pot, std::nullopt, t0, T, exp.initial_density());
    double pT = t0 + 4.0 * exp.dt_pde * static_cast<double>(exp.save_stride_pde);
    FlowSnapshotSeries pflow = make_flow(exp.pot, pert, t0, pT, exp.initial_density());
    auto recs = verify_steepest_descent(flow, pflow, pert, t0);
    records.insert(records.end(), recs.begin(), recs.end());
  } else if (name == "hwi") {
    Potential pot = normalized_version(exp.pot, exp.grid);
    std::vector<double> q(exp.grid.n);
    for (std::size_t i = 0; i < exp.grid.n; ++i) q[i] = pot.gibbs_density(exp.grid.node(i));
    GridDensity gibbs = normalize(exp.grid, std::move(q));
    auto recs = verify_hwi(exp.initial_density(), gibbs, pot);
    records.insert(records.end(), recs.begin(), recs.end());
  } else if (name == "talagrand_lsi") {
    Potential pot = normalized_version(exp.pot, exp.grid);
    auto recs = verify_talagrand_lsi(exp.initial_density(), pot);
    records.insert(records.end(), recs.begin(), recs.end());
  } else if (name == "exp_decay") {
    Potential pot = normalized_version(exp.pot, exp.grid);
    FlowSnapshotSeries flow = make_flow(pot, std::nullopt, t0, T, exp.initial_density());
    records.push_back(verify_exponential_decay(flow, pot.curvature_bound()));
  } else if (name == "time_reversal") {
    FlowSnapshotSeries flow = make_flow(exp.pot, std::nullopt, t0, T, exp.initial_density());
    PathEnsemble rev =
        simulate_reversed(flow, exp.pot, exp.dt_sde, exp.save_stride_sde, exp.m_paths, exp.seed);
    std::vector<double> checks = {t0 + 0.25 * (T - t0), t0 + 0.5 * (T - t0), t0 + 0.75 * (T - t0)};
    auto recs = verify_time_reversal(flow, rev, checks);
    records.insert(records.end(), recs.begin(), recs.end());
  } else if (name == "martingale") {
    FlowSnapshotSeries flow = make_flow(exp.pot, std::nullopt, t0, T, exp.initial_density());
    PathEnsemble paths = simulate_forward(exp.pot, exp.init, t0, T, exp.dt_sde,
                                          exp.save_stride_sde, exp.m_paths, exp.seed);
    double scale = negative_control ? 1.5 : 1.0;
    TrajectorialProcesses tp = build_processes(paths, flow, exp.pot, std::nullopt, scale);
    for (const auto& row : martingale_zero_drift_test(tp)) records.push_back(row_to_record(row));
    QvResult qv = quadratic_variation_test(tp);
    records.push_back(make_record("martingale_qv_ratio", t0, qv.ratio, 1.0, 0.05, false));
    FisherExpectationResult fe = fisher_expectation_test(tp, flow);
    records.push_back(make_record("fisher_expectation", t0, fe.mc, fe.grid, 0.02, true));
    if (exp.pert) {
      // perturbed law: zero drift including the signed correction, QV against the
      // Fisher clock of the perturbed score
      FlowSnapshotSeries pflow = make_flow(exp.pot, exp.pert, t0, T, exp.initial_density());
      PathEnsemble ppaths =
          simulate_forward(exp.pot, exp.init, t0, T, exp.dt_sde, exp.save_stride_sde, exp.m_paths,
                           exp.seed + 1, exp.pert);
      TrajectorialProcesses tpb = build_processes(ppaths, pflow, exp.pot, exp.pert, scale);
      for (auto row : martingale_zero_drift_test(tpb)) {
        row.test = "perturbed_" + row.test;
        records.push_back(row_to_record(row));
      }
      QvResult pqv = quadratic_variation_test(tpb);
      records.push_back(make_record("perturbed_martingale_qv_ratio", t0, pqv.ratio, 1.0, 0.05,
                                    false));
    }
  } else if (name == "fontbona_jourdain") {
    Potential pot = normalized_version(exp.pot, exp.grid);
    FlowSnapshotSeries flow = make_flow(pot, std::nullopt, t0, T, exp.initial_density());
    FontbonaJourdainResult fj = fontbona_jourdain_test(pot, flow, exp.m_paths, exp.seed,
                                                       exp.dt_sde, exp.save_stride_sde);
    for (const auto& row : fj.drift_rows) records.push_back(row_to_record(row));
    records.push_back(make_record("fj_regression_sup", t0, fj.regression_sup_discrepancy, 0.0,
                                  0.10, false));
    VerificationRecord sub;
    sub.name = "fj_submartingale";
    sub.context = t0;
    sub.pass = fj.submartingale_pass;
    records.push_back(sub);
  } else if (name == "forward_identity") {
    std::vector<double> checks = {t0 + 0.3 * (T - t0), t0 + 0.6 * (T - t0)};
    FlowSnapshotSeries flow = make_flow(exp.pot, std::nullopt, t0, T, exp.initial_density());
    PathEnsemble paths = simulate_forward(exp.pot, exp.init, t0, T, exp.dt_sde,
                                          exp.save_stride_sde, exp.m_paths, exp.seed);
    for (const auto& row : forward_identity_test(paths, flow, exp.pot, std::nullopt, checks))
      records.push_back(row_to_record(row));
    if (exp.pert) {
      FlowSnapshotSeries pflow = make_flow(exp.pot, exp.pert, t0, T, exp.initial_density());
      PathEnsemble ppaths =
          simulate_forward(exp.pot, exp.init, t0, T, exp.dt_sde, exp.save_stride_sde, exp.m_paths,
                           exp.seed + 1, exp.pert);
      for (const auto& row : forward_identity_test(ppaths, pflow, exp.pot, exp.pert, checks))
        records.push_back(row_to_record(row));
    }
  } else if (name == "trajectorial_rate") {
    FlowSnapshotSeries flow = make_flow(exp.pot, std::nullopt, t0, T, exp.initial_density());
    PathEnsemble paths = simulate_forward(exp.pot, exp.init, t0, T, exp.dt_sde,
                                          exp.save_stride_sde, exp.m_paths, exp.seed);
    TrajectorialProcesses tp = build_processes(paths, flow, exp.pot);
    FlowInterpolant interp(flow);
    double tc = t0 + 0.2 * (T - t0);
    double h = 30.0 * exp.dt_sde;
    RateResult rr = trajectorial_rate_test(tp, interp, exp.pot, tc, h);
    records.push_back(make_record("trajectorial_rate", tc, rr.weighted_rel_err, 0.0, 0.10, false));
    if (exp.pert) {
      // the bump-localized limit needs finer steps than the main run: the target has
      // sharp features that diffusion smears within a few milliseconds of flow time
      double dt_fine_pde = std::min(exp.dt_pde, 2e-5);
      double dt_fine_sde = 1e-4;
      double h_fine = 5.0 * dt_fine_sde;
      GridDensity init = exp.initial_density();
      FlowSnapshotSeries flow_fine = solve_forward(exp.pot, init, t0, t0 + 0.02, dt_fine_pde, 10);
      FlowSnapshotSeries pflow_fine =
          solve_forward(exp.pot, init, t0, t0 + 0.02, dt_fine_pde, 10, exp.pert);
      PathEnsemble ppaths = simulate_forward(exp.pot, exp.init, t0, t0 + 2.0 * h_fine, dt_fine_sde,
                                             1, exp.m_paths, exp.seed, exp.pert);
      TrajectorialProcesses tpb = build_processes(ppaths, pflow_fine, exp.pot, exp.pert);
      TrajectorialProcesses tpu = build_processes(ppaths, flow_fine, exp.pot);
      FlowInterpolant interp_fine(flow_fine);
      RateResult pr = perturbed_rate_test(tpb, tpu, interp_fine, *exp.pert, t0, h_fine);
      records.push_back(make_record("perturbed_rate", t0, pr.weighted_rel_err, 0.0, 0.15, false));
    }
  } else {
    std::string names;
    for (const auto& n : kVerifyNames) names += (names.empty() ? "" : ", ") + n;
    throw ConfigError("unknown verification '" + name + "'; available: " + names);
  }
}

int cmd_verify(const CliOptions& opt) {
  ExperimentConfig exp = build_experiment(opt.cfg);
  write_resolved_config(opt.cfg, exp.out_dir);
  std::vector<std::string> selected;
  if (opt.which == "all")
    selected = kVerifyNames;
  else
    selected.push_back(opt.which);

  std::vector<VerificationRecord> records;
  for (const auto& name : selected)
    run_one_verification(name, exp, opt.negative_control, records);

  write_records_csv(exp.out_dir + "/verification_report.csv", records);
  bool ok = all_pass(records);
  for (const auto& r : records)
    std::cout << (r.pass ? "pass " : "FAIL ") << r.name << " lhs=" << fmt17(r.lhs)
              << " rhs=" << fmt17(r.rhs) << "\n";
  std::cout << (ok ? "verify: all records pass" : "verify: failures present") << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  otto::configure_threads_from_env();
  try {
    CliOptions opt = parse_cli(argc, argv);
    if (opt.command == "flow") return cmd_flow(opt);
    if (opt.command == "simulate") return cmd_simulate(opt);
    if (opt.command == "verify") return cmd_verify(opt);
    throw otto::ConfigError("unknown command: " + opt.command + " (flow|simulate|verify)");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
