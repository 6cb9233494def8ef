#include "otto/pde.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "otto/csv.hpp"

namespace otto {

namespace {

// Bernoulli function z/(e^z - 1), the Scharfetter-Gummel flux weight.
double bernoulli(double z) {
  if (std::fabs(z) < 1e-8) return 1.0 - 0.5 * z + z * z / 12.0;
  if (z > 700.0) return 0.0;
  if (z < -700.0) return -z;
  return z / std::expm1(z);
}

// Thomas solve of a tridiagonal system; overwrites rhs with the solution.
void solve_tridiagonal(const std::vector<double>& lower, std::vector<double> diag,
                       const std::vector<double>& upper, std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

std::size_t step_count(double t0, double t_end, double dt) {
  if (!(t_end > t0) || !(dt > 0.0)) throw std::invalid_argument("solver needs t_end > t0, dt > 0");
  auto k = static_cast<std::size_t>(std::llround((t_end - t0) / dt));
  return std::max<std::size_t>(k, 1);
}

}  // namespace

std::size_t FlowSnapshotSeries::nearest_index(double t) const {
  auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.end()) return times.size() - 1;
  if (it == times.begin()) return 0;
  std::size_t i = static_cast<std::size_t>(it - times.begin());
  return (t - times[i - 1] < times[i] - t) ? i - 1 : i;
}

FlowSnapshotSeries solve_forward(const Potential& pot, const GridDensity& init, double t0,
                                 double t_end, double dt, std::size_t save_stride,
                                 const std::optional<Perturbation>& pert) {
  const Grid& g = init.grid;
  const std::size_t n = g.n;
  const std::size_t steps = step_count(t0, t_end, dt);
  const double dt_eff = (t_end - t0) / static_cast<double>(steps);
  if (save_stride == 0) save_stride = 1;

  auto total = [&](double x) { return pot.value(x) + (pert ? pert->B(x) : 0.0); };

  // face weights w_i = -2 (V_{i+1} - V_i); flux_i = (D/h) [B(-w_i) p_i - B(w_i) p_{i+1}];
  // zero flux when p_{i+1}/p_i = e^{w_i} = q_{i+1}/q_i, so the discrete Gibbs state is exact
  const double D = 0.5;
  const double h = g.h();
  std::vector<double> bm(n - 1), bp(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double w = -2.0 * (total(g.node(i + 1)) - total(g.node(i)));
    bm[i] = bernoulli(-w);
    bp[i] = bernoulli(w);
  }

  const double r = dt_eff * D / (h * h);
  std::vector<double> lower(n, 0.0), diag(n, 0.0), upper(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double out = 0.0;
    if (i > 0) {
      out += bp[i - 1];
      lower[i] = -r * bm[i - 1];
    }
    if (i + 1 < n) {
      out += bm[i];
      upper[i] = -r * bp[i];
    }
    diag[i] = 1.0 + r * out;
  }

  FlowSnapshotSeries flow{g, pot, pert, {}, {}};
  std::vector<double> p = init.values;
  flow.times.push_back(t0);
  flow.states.push_back(p);

  for (std::size_t k = 1; k <= steps; ++k) {
    solve_tridiagonal(lower, diag, upper, p);
    for (double& v : p) {
      if (v < -1e-12) throw DiscretizationError("solve_forward: negative density node");
      if (v < 0.0) v = 0.0;
    }
    if (k % save_stride == 0 || k == steps) {
      flow.times.push_back(t0 + dt_eff * static_cast<double>(k));
      flow.states.push_back(p);
    }
  }
  return flow;
}

std::vector<double> likelihood_ratio(const GridDensity& d, const Potential& pot) {
  const double clip = density_clip(d, 1e-14);
  std::vector<double> ell(d.grid.n);
  for (std::size_t i = 0; i < d.grid.n; ++i) {
    double x = d.grid.node(i);
    ell[i] = std::exp(std::log(std::max(d.values[i], clip)) + 2.0 * pot.value(x));
  }
  return ell;
}

GridFunctionSeries solve_backward_kolmogorov(const Potential& pot, const Grid& g,
                                             std::vector<double> ell0, double t0, double t_end,
                                             double dt, std::size_t save_stride,
                                             const std::optional<Perturbation>& pert) {
  const std::size_t n = g.n;
  if (ell0.size() != n) throw std::invalid_argument("solve_backward_kolmogorov: size mismatch");
  const std::size_t steps = step_count(t0, t_end, dt);
  const double dt_eff = (t_end - t0) / static_cast<double>(steps);
  if (save_stride == 0) save_stride = 1;
  const double h = g.h();

  // A ell = 1/2 ell'' + c ell' + r0 ell with c = beta - Psi', r0 = div beta - 2 beta Psi'
  std::vector<double> lower(n, 0.0), diag(n, 0.0), upper(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double x = g.node(i);
    double c = -pot.grad(x) + (pert ? pert->beta(x) : 0.0);
    double r0 = pert ? (pert->div_beta(x) - 2.0 * pert->beta(x) * pot.grad(x)) : 0.0;
    double dl = 0.0, dd = 0.0, du = 0.0;
    if (i == 0) {
      // mirror ghost for the diffusion, one-sided advection
      dd = -1.0 / (h * h) - c / h;
      du = 1.0 / (h * h) + c / h;
    } else if (i + 1 == n) {
      dl = 1.0 / (h * h) - c / h;
      dd = -1.0 / (h * h) + c / h;
    } else {
      dl = 0.5 / (h * h) - c / (2.0 * h);
      dd = -1.0 / (h * h);
      du = 0.5 / (h * h) + c / (2.0 * h);
    }
    dd += r0;
    lower[i] = -dt_eff * dl;
    diag[i] = 1.0 - dt_eff * dd;
    upper[i] = -dt_eff * du;
  }

  GridFunctionSeries series{g, {}, {}};
  std::vector<double> ell = std::move(ell0);
  series.times.push_back(t0);
  series.states.push_back(ell);
  for (std::size_t k = 1; k <= steps; ++k) {
    solve_tridiagonal(lower, diag, upper, ell);
    if (k % save_stride == 0 || k == steps) {
      series.times.push_back(t0 + dt_eff * static_cast<double>(k));
      series.states.push_back(ell);
    }
  }
  return series;
}

PerturbationRatioSeries perturbation_ratio(const FlowSnapshotSeries& flow,
                                           const FlowSnapshotSeries& pflow) {
  if (!(flow.grid == pflow.grid) || flow.times.size() != pflow.times.size())
    throw std::invalid_argument("perturbation_ratio: flows must share grid and times");
  for (std::size_t k = 0; k < flow.times.size(); ++k)
    if (std::fabs(flow.times[k] - pflow.times[k]) > 1e-12)
      throw std::invalid_argument("perturbation_ratio: time grids differ");

  const Grid& g = flow.grid;
  auto [wlo, whi] = central_window(flow.density(0), 0.95);
  const double t0 = flow.t0();

  PerturbationRatioSeries out;
  out.ratio.grid = g;
  out.ratio.times = flow.times;
  out.sup_deviation_rate.assign(flow.times.size(), 0.0);
  for (std::size_t k = 0; k < flow.times.size(); ++k) {
    const double clip = density_clip(flow.density(k), 1e-14);
    std::vector<double> y(g.n);
    double sup = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) {
      y[i] = pflow.states[k][i] / std::max(flow.states[k][i], clip);
      double x = g.node(i);
      if (x >= wlo && x <= whi) sup = std::max(sup, std::fabs(y[i] - 1.0));
    }
    out.ratio.states.push_back(std::move(y));
    double span = flow.times[k] - t0;
    out.sup_deviation_rate[k] = (span > 0.0) ? sup / span : 0.0;
  }
  return out;
}

double FlowInterpolant::Slice::logp_at(double x) const {
  if (x < x_lo) {
    double d = x - x_lo;
    return val_lo + sc_lo * d + 0.5 * scp_lo * d * d;
  }
  if (x > x_hi) {
    double d = x - x_hi;
    return val_hi + sc_hi * d + 0.5 * scp_hi * d * d;
  }
  return logp.eval(x);
}

double FlowInterpolant::Slice::score_at(double x) const {
  if (x < x_lo) return sc_lo + scp_lo * (x - x_lo);
  if (x > x_hi) return sc_hi + scp_hi * (x - x_hi);
  return logp.deriv(x);
}

FlowInterpolant::FlowInterpolant(const FlowSnapshotSeries& flow, double floor_rel)
    : times_(flow.times) {
  const Grid& g = flow.grid;
  slices_.reserve(flow.states.size());
  for (const auto& state : flow.states) {
    GridDensity d{g, state};
    const double clip = density_clip(d, floor_rel);
    std::size_t i0 = 0, i1 = g.n - 1;
    while (i0 + 1 < g.n && state[i0] <= clip) ++i0;
    while (i1 > 0 && state[i1] <= clip) --i1;
    if (i1 <= i0 + 8) {
      i0 = 0;
      i1 = g.n - 1;
    }
    std::vector<double> logp(i1 - i0 + 1);
    for (std::size_t i = i0; i <= i1; ++i) logp[i - i0] = std::log(std::max(state[i], clip));
    Pchip interp(g.node(i0), g.h(), std::move(logp));
    Slice s{std::move(interp), g.node(i0), g.node(i1), 0, 0, 0, 0, 0, 0};
    s.val_lo = s.logp.eval(s.x_lo);
    s.val_hi = s.logp.eval(s.x_hi);
    s.sc_lo = s.logp.slope_at(0);
    s.sc_hi = s.logp.slope_at(i1 - i0);
    std::size_t off = std::min<std::size_t>(4, i1 - i0);
    s.scp_lo = (s.logp.slope_at(off) - s.sc_lo) / (g.h() * static_cast<double>(off));
    s.scp_hi = (s.sc_hi - s.logp.slope_at(i1 - i0 - off)) / (g.h() * static_cast<double>(off));
    slices_.push_back(std::move(s));
  }
}

std::size_t FlowInterpolant::bracket(double t, double& lambda) const {
  const double eps = 1e-9 * std::max(1.0, std::fabs(times_.back()));
  if (t < times_.front() - eps || t > times_.back() + eps)
    throw std::invalid_argument("FlowInterpolant: t outside the stored range");
  lambda = 0.0;
  if (times_.size() < 2) return 0;
  t = std::clamp(t, times_.front(), times_.back());
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t k = (it == times_.begin()) ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
  if (k + 1 >= times_.size()) k = times_.size() - 2;
  double span = times_[k + 1] - times_[k];
  lambda = (span > 0.0) ? (t - times_[k]) / span : 0.0;
  return k;
}

double FlowInterpolant::log_p(double t, double x) const {
  double lam;
  std::size_t k = bracket(t, lam);
  std::size_t k1 = std::min(k + 1, slices_.size() - 1);
  return (1.0 - lam) * slices_[k].logp_at(x) + lam * slices_[k1].logp_at(x);
}

double FlowInterpolant::score_p(double t, double x) const {
  double lam;
  std::size_t k = bracket(t, lam);
  std::size_t k1 = std::min(k + 1, slices_.size() - 1);
  return (1.0 - lam) * slices_[k].score_at(x) + lam * slices_[k1].score_at(x);
}

FlowDiagnostics compute_flow_diagnostics(const FlowSnapshotSeries& flow) {
  const std::size_t m = flow.times.size();
  FlowDiagnostics diag;
  diag.t = flow.times;
  diag.H.resize(m);
  diag.I.resize(m);
  diag.F.resize(m);
  diag.dHdt_fd.assign(m, 0.0);
  diag.w2_rate.assign(m, std::nan(""));
  diag.half_sqrt_i.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    GridDensity d = flow.density(k);
    diag.H[k] = relative_entropy(d, flow.pot);
    diag.I[k] = relative_fisher_information(d, flow.pot);
    diag.F[k] = free_energy(d, flow.pot);
    diag.half_sqrt_i[k] = 0.5 * std::sqrt(std::max(diag.I[k], 0.0));
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (k == 0)
      diag.dHdt_fd[k] = (diag.H[1] - diag.H[0]) / (flow.times[1] - flow.times[0]);
    else if (k + 1 == m)
      diag.dHdt_fd[k] = (diag.H[k] - diag.H[k - 1]) / (flow.times[k] - flow.times[k - 1]);
    else
      diag.dHdt_fd[k] = (diag.H[k + 1] - diag.H[k - 1]) / (flow.times[k + 1] - flow.times[k - 1]);
  }
  return diag;
}

void write_flow_csv(const std::string& dir, const FlowSnapshotSeries& flow) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  CsvFile index(dir + "/index.csv");
  index.line("k,t,file");
  for (std::size_t k = 0; k < flow.times.size(); ++k) {
    char name[64];
    std::snprintf(name, sizeof name, "snapshot_%06zu.csv", k);
    write_density_csv(dir + "/" + name, flow.density(k));
    index.line(std::to_string(k) + "," + fmt17(flow.times[k]) + "," + name);
  }
  index.close();
}

}  // namespace otto
