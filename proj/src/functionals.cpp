#include "otto/functionals.hpp"

#include <cmath>

#include "otto/csv.hpp"

namespace otto {

namespace {
constexpr double kFloorRel = 1e-14;
}

double relative_entropy(const GridDensity& d, const Potential& pot) {
  const Grid& g = d.grid;
  const double clip = density_clip(d, kFloorRel);
  std::vector<double> f(g.n, 0.0);
  for (std::size_t i = 0; i < g.n; ++i) {
    double p = d.values[i];
    if (p <= clip) continue;  // 0 log 0 = 0 convention
    f[i] = p * (std::log(p) + 2.0 * pot.value(g.node(i)));
  }
  return trapezoid(g, f);
}

double relative_fisher_information(const GridDensity& d, const Potential& pot) {
  const Grid& g = d.grid;
  const double clip = density_clip(d, kFloorRel);
  ScoreField s = score(d, kFloorRel);
  std::vector<double> f(g.n, 0.0);
  for (std::size_t i = 0; i < g.n; ++i) {
    double p = d.values[i];
    if (p <= clip) continue;
    double u = s.values[i] + 2.0 * pot.grad(g.node(i));
    f[i] = u * u * p;
  }
  return trapezoid(g, f);
}

double free_energy(const GridDensity& d, const Potential& pot) {
  const Grid& g = d.grid;
  const double clip = density_clip(d, kFloorRel);
  std::vector<double> f(g.n, 0.0);
  for (std::size_t i = 0; i < g.n; ++i) {
    double p = d.values[i];
    if (p <= clip) continue;
    f[i] = pot.value(g.node(i)) * p + 0.5 * p * std::log(p);
  }
  return trapezoid(g, f);
}

std::vector<double> velocity_field(const GridDensity& d, const Potential& pot) {
  ScoreField s = score(d, kFloorRel);
  std::vector<double> v(d.grid.n);
  for (std::size_t i = 0; i < d.grid.n; ++i)
    v[i] = -(0.5 * s.values[i] + pot.grad(d.grid.node(i)));
  return v;
}

double velocity_energy(const GridDensity& d, const Potential& pot) {
  std::vector<double> v = velocity_field(d, pot);
  const double clip = density_clip(d, kFloorRel);
  std::vector<double> f(d.grid.n, 0.0);
  for (std::size_t i = 0; i < d.grid.n; ++i) {
    if (d.values[i] <= clip) continue;
    f[i] = v[i] * v[i] * d.values[i];
  }
  return trapezoid(d.grid, f);
}

SigmaFiniteDecomposition sigma_finite_decomposition(const GridDensity& d, const Potential& pot) {
  const Grid& g = d.grid;
  const double clip = density_clip(d, kFloorRel);

  std::vector<double> zf(g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    double x = g.node(i);
    zf[i] = std::exp(-x * x - 2.0 * pot.value(x));
  }
  double log_partition = std::log(trapezoid(g, zf));

  // reference density: e^{-x^2} q(x) / Z
  std::vector<double> f(g.n, 0.0);
  for (std::size_t i = 0; i < g.n; ++i) {
    double p = d.values[i];
    if (p <= clip) continue;
    double x = g.node(i);
    double log_ref = -x * x - 2.0 * pot.value(x) - log_partition;
    f[i] = p * (std::log(p) - log_ref);
  }
  double h_ref = trapezoid(g, f);
  double quad = moment(d, 2);
  return {h_ref, quad, log_partition, h_ref - quad - log_partition};
}

void write_diagnostics_csv(const std::string& path, const FlowDiagnostics& diag) {
  CsvFile out(path);
  out.line("t,H,I,F,dHdt_fd,W2_rate,half_sqrtI");
  for (std::size_t k = 0; k < diag.t.size(); ++k) {
    out.row({diag.t[k], diag.H[k], diag.I[k], diag.F[k], diag.dHdt_fd[k],
             diag.has_transport ? diag.w2_rate[k] : std::nan(""), diag.half_sqrt_i[k]});
  }
  out.close();
}

}  // namespace otto
