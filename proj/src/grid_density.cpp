#include "otto/grid_density.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "otto/csv.hpp"

namespace otto {

double trapezoid(const Grid& g, const std::vector<double>& v) {
  if (v.size() != g.n) throw std::invalid_argument("trapezoid: size mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < g.n; ++i) sum += (i == 0 || i + 1 == g.n) ? 0.5 * v[i] : v[i];
  return sum * g.h();
}

GridDensity normalize(const Grid& g, std::vector<double> raw) {
  if (raw.size() != g.n) throw std::invalid_argument("normalize: size mismatch");
  for (double v : raw)
    if (v < 0.0 || !std::isfinite(v)) throw std::invalid_argument("normalize: negative or non-finite value");
  double mass = trapezoid(g, raw);
  if (mass <= 0.0) throw std::invalid_argument("normalize: zero mass");
  for (double& v : raw) v /= mass;
  return {g, std::move(raw)};
}

GridDensity gaussian_density(const Grid& g, double mean, double var) {
  if (var <= 0.0) throw std::invalid_argument("gaussian_density: var > 0 required");
  std::vector<double> v(g.n);
  double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * var);
  for (std::size_t i = 0; i < g.n; ++i) {
    double d = g.node(i) - mean;
    v[i] = norm * std::exp(-d * d / (2.0 * var));
  }
  return normalize(g, std::move(v));
}

double moment(const GridDensity& d, int k) {
  if (k < 0 || k > 4) throw std::invalid_argument("moment: k in {0,...,4}");
  std::vector<double> f(d.grid.n);
  for (std::size_t i = 0; i < d.grid.n; ++i) f[i] = std::pow(d.grid.node(i), k) * d.values[i];
  return trapezoid(d.grid, f);
}

double l1_distance(const GridDensity& a, const GridDensity& b) {
  if (!(a.grid == b.grid)) throw std::invalid_argument("l1_distance: grid mismatch");
  std::vector<double> f(a.grid.n);
  for (std::size_t i = 0; i < a.grid.n; ++i) f[i] = std::fabs(a.values[i] - b.values[i]);
  return trapezoid(a.grid, f);
}

double density_clip(const GridDensity& d, double floor_rel) {
  double mx = *std::max_element(d.values.begin(), d.values.end());
  return std::max(1e-300, floor_rel * mx);
}

ScoreField score(const GridDensity& d, double floor_rel) {
  if (floor_rel <= 0.0) throw std::invalid_argument("score: floor must be > 0");
  const Grid& g = d.grid;
  const double h = g.h();
  const double clip = density_clip(d, floor_rel);

  std::vector<double> logp(g.n);
  for (std::size_t i = 0; i < g.n; ++i) logp[i] = std::log(std::max(d.values[i], clip));

  std::vector<double> s(g.n, 0.0);
  for (std::size_t i = 0; i < g.n; ++i) {
    if (i == 0)
      s[i] = (logp[1] - logp[0]) / h;
    else if (i + 1 == g.n)
      s[i] = (logp[i] - logp[i - 1]) / h;
    else
      s[i] = (logp[i + 1] - logp[i - 1]) / (2.0 * h);
  }

  // valid region: both central-difference neighbors above the clip
  std::size_t lo = 0, hi = g.n - 1;
  while (lo + 1 < g.n && d.values[lo] <= clip) ++lo;
  while (hi > 0 && d.values[hi] <= clip) --hi;
  std::size_t i0 = std::min(lo + 1, g.n - 1);
  std::size_t i1 = (hi > 0) ? hi - 1 : 0;
  if (i0 + 8 < i1) {
    double slope_lo = (s[i0 + 4] - s[i0]) / (4.0 * h);
    double slope_hi = (s[i1] - s[i1 - 4]) / (4.0 * h);
    for (std::size_t i = 0; i < i0; ++i) s[i] = s[i0] + slope_lo * (g.node(i) - g.node(i0));
    for (std::size_t i = i1 + 1; i < g.n; ++i) s[i] = s[i1] + slope_hi * (g.node(i) - g.node(i1));
  }
  return {g, std::move(s)};
}

GridDensity from_samples(const std::vector<double>& xs, const Grid& g) {
  const std::size_t m = xs.size();
  if (m < 100) throw std::invalid_argument("from_samples: need at least 100 samples");
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(m);
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(m - 1);
  if (var <= 0.0) throw std::invalid_argument("from_samples: degenerate samples");

  const double bw = 1.06 * std::sqrt(var) * std::pow(static_cast<double>(m), -0.2);
  const double cutoff = 8.0 * bw;
  std::vector<double> sorted(xs);
  std::sort(sorted.begin(), sorted.end());

  std::vector<double> v(g.n, 0.0);
  const double norm = 1.0 / (static_cast<double>(m) * bw * std::sqrt(2.0 * std::numbers::pi));
// per-node accumulation in sorted sample order keeps the sum independent of scheduling
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(g.n); ++ii) {
    const double x = g.node(static_cast<std::size_t>(ii));
    auto first = std::lower_bound(sorted.begin(), sorted.end(), x - cutoff);
    auto last = std::upper_bound(sorted.begin(), sorted.end(), x + cutoff);
    double acc = 0.0;
    for (auto it = first; it != last; ++it) {
      double u = (x - *it) / bw;
      acc += std::exp(-0.5 * u * u);
    }
    v[static_cast<std::size_t>(ii)] = acc * norm;
  }
  return normalize(g, std::move(v));
}

std::pair<double, double> central_window(const GridDensity& d, double mass) {
  GridCdf cdf(d);
  double tail = (1.0 - mass) / 2.0;
  return {cdf.quantile(tail), cdf.quantile(1.0 - tail)};
}

GridCdf::GridCdf(const GridDensity& d) : grid_(d.grid), cum_(d.grid.n, 0.0) {
  const double h = grid_.h();
  for (std::size_t i = 1; i < grid_.n; ++i)
    cum_[i] = cum_[i - 1] + 0.5 * h * (d.values[i - 1] + d.values[i]);
  double total = cum_.back();
  if (total <= 0.0) throw std::invalid_argument("GridCdf: zero mass");
  for (double& c : cum_) c /= total;
  cum_.back() = 1.0;
}

double GridCdf::cdf(double x) const {
  if (x <= grid_.x_min) return 0.0;
  if (x >= grid_.x_max) return 1.0;
  double pos = (x - grid_.x_min) / grid_.h();
  std::size_t i = std::min(static_cast<std::size_t>(pos), grid_.n - 2);
  double w = pos - static_cast<double>(i);
  return cum_[i] + w * (cum_[i + 1] - cum_[i]);
}

double GridCdf::quantile(double u) const {
  u = std::clamp(u, 0.0, 1.0);
  auto it = std::lower_bound(cum_.begin(), cum_.end(), u);
  if (it == cum_.begin()) return grid_.x_min;
  std::size_t i = static_cast<std::size_t>(it - cum_.begin());
  double c0 = cum_[i - 1], c1 = cum_[i];
  if (c1 <= c0) return grid_.node(i);
  double w = (u - c0) / (c1 - c0);
  return grid_.node(i - 1) + w * grid_.h();
}

void write_density_csv(const std::string& path, const GridDensity& d) {
  CsvFile out(path);
  out.line("x,value");
  for (std::size_t i = 0; i < d.grid.n; ++i)
    out.line(fmt17(d.grid.node(i)) + "," + fmt17(d.values[i]));
  out.close();
}

GridDensity read_density_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string header;
  std::getline(in, header);
  std::vector<double> xs, vs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string a, b;
    std::getline(ss, a, ',');
    std::getline(ss, b, ',');
    xs.push_back(std::stod(a));
    vs.push_back(std::stod(b));
  }
  if (xs.size() < 2) throw std::runtime_error("density csv too short: " + path);
  Grid g{xs.front(), xs.back(), xs.size()};
  return normalize(g, std::move(vs));
}

}  // namespace otto
