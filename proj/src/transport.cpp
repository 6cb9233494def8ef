#include "otto/transport.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "otto/pchip.hpp"

namespace otto {

QuantileRep quantile_rep(const GridDensity& d, std::size_t n_q, double u_clip) {
  GridCdf cdf(d);
  QuantileRep rep;
  rep.n_q = n_q;
  rep.u_clip = u_clip;
  rep.u.resize(n_q);
  rep.values.resize(n_q);
  const double span = 1.0 - 2.0 * u_clip;
  for (std::size_t k = 0; k < n_q; ++k) {
    double u = u_clip + span * (static_cast<double>(k) + 0.5) / static_cast<double>(n_q);
    rep.u[k] = u;
    rep.values[k] = cdf.quantile(u);
  }
  return rep;
}

double wasserstein2(const GridDensity& d1, const GridDensity& d2, std::size_t n_q) {
  QuantileRep a = quantile_rep(d1, n_q);
  QuantileRep b = quantile_rep(d2, n_q);
  double acc = 0.0;
  for (std::size_t k = 0; k < n_q; ++k) {
    double diff = a.values[k] - b.values[k];
    acc += diff * diff;
  }
  const double du = (1.0 - 2.0 * a.u_clip) / static_cast<double>(n_q);
  return std::sqrt(acc * du);
}

BrenierMap brenier_map(const GridDensity& d0, const GridDensity& d1) {
  GridCdf c0(d0);
  GridCdf c1(d1);
  BrenierMap map;
  map.grid = d0.grid;
  map.T.resize(d0.grid.n);
  map.gamma.resize(d0.grid.n);
  for (std::size_t i = 0; i < d0.grid.n; ++i) {
    double x = d0.grid.node(i);
    double t = c1.quantile(c0.cdf(x));
    map.T[i] = t;
    map.gamma[i] = t - x;
  }
  // T must be monotone non-decreasing (quantile composition in 1-D)
  for (std::size_t i = 1; i < map.T.size(); ++i)
    if (map.T[i] + 1e-9 < map.T[i - 1])
      throw std::runtime_error("brenier_map: non-monotone transport map");
  return map;
}

GridDensity displacement_interpolation(const GridDensity& d0, const GridDensity& d1, double t) {
  if (t < 0.0 || t > 1.0) throw std::invalid_argument("displacement_interpolation: t in [0,1]");
  const Grid& g = d0.grid;
  GridCdf c0(d0);
  GridCdf c1(d1);

  // transported quantile function: u -> (1-t) F0^{-1}(u) + t F1^{-1}(u), monotone
  auto map_at = [&](double u) { return (1.0 - t) * c0.quantile(u) + t * c1.quantile(u); };

  // transported CDF on the x-grid by bisection in u
  std::vector<double> cdf(g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    double x = g.node(i);
    if (x <= map_at(0.0)) {
      cdf[i] = 0.0;
      continue;
    }
    if (x >= map_at(1.0)) {
      cdf[i] = 1.0;
      continue;
    }
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
      double mid = 0.5 * (lo + hi);
      (map_at(mid) < x ? lo : hi) = mid;
    }
    cdf[i] = 0.5 * (lo + hi);
  }
  for (std::size_t i = 1; i < g.n; ++i)
    if (cdf[i] + 1e-12 < cdf[i - 1])
      throw std::runtime_error("displacement_interpolation: non-monotone transported CDF");

  // monotone cubic CDF interpolation; node slopes are the resampled density
  Pchip interp(g.x_min, g.h(), cdf);
  std::vector<double> dens(g.n);
  for (std::size_t i = 0; i < g.n; ++i) dens[i] = std::max(interp.slope_at(i), 0.0);
  return normalize(g, std::move(dens));
}

double geodesic_entropy_slope(const GridDensity& d0, const GridDensity& d1, const Potential& pot) {
  BrenierMap map = brenier_map(d0, d1);
  ScoreField s = score(d0);
  const double clip = density_clip(d0, 1e-14);
  std::vector<double> f(d0.grid.n, 0.0);
  for (std::size_t i = 0; i < d0.grid.n; ++i) {
    double p = d0.values[i];
    if (p <= clip) continue;
    double score_ell = s.values[i] + 2.0 * pot.grad(d0.grid.node(i));
    f[i] = score_ell * map.gamma[i] * p;
  }
  return trapezoid(d0.grid, f);
}

double metric_derivative(const FlowSnapshotSeries& flow, double t0, double h) {
  if (h <= 0.0) throw std::invalid_argument("metric_derivative: h > 0 required");
  double spacing = flow.times.size() > 1 ? flow.times[1] - flow.times[0] : 0.0;
  if (h + 1e-15 < spacing)
    throw std::invalid_argument("metric_derivative: h below the snapshot spacing");

  auto state_at = [&](double t) {
    std::size_t k = flow.nearest_index(t);
    if (std::fabs(flow.times[k] - t) > 0.25 * h)
      throw std::invalid_argument("metric_derivative: time not on the snapshot grid");
    return flow.density(k);
  };

  const double lo = flow.t0(), hi = flow.t_end();
  if (t0 - h >= lo - 1e-15 && t0 + h <= hi + 1e-15) {
    return wasserstein2(state_at(t0 + h), state_at(t0 - h)) / (2.0 * h);
  }
  if (t0 + h <= hi + 1e-15) {  // right-sided quotient at the left end
    return wasserstein2(state_at(t0 + h), state_at(t0)) / h;
  }
  return wasserstein2(state_at(t0), state_at(t0 - h)) / h;
}

void fill_transport_diagnostics(FlowDiagnostics& diag, const FlowSnapshotSeries& flow) {
  const std::size_t m = flow.times.size();
  for (std::size_t k = 0; k < m; ++k) {
    std::size_t a = (k == 0) ? 0 : k - 1;
    std::size_t b = (k + 1 == m) ? k : k + 1;
    if (a == b) continue;
    double span = flow.times[b] - flow.times[a];
    diag.w2_rate[k] = wasserstein2(flow.density(b), flow.density(a)) / span;
  }
  diag.has_transport = true;
}

}  // namespace otto
