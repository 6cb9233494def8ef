#pragma once

#include <string>
#include <utility>
#include <vector>

#include "otto/grid.hpp"

namespace otto {

double trapezoid(const Grid& g, const std::vector<double>& v);

// Probability density sampled at the nodes of a uniform grid, unit trapezoid mass.
struct GridDensity {
  Grid grid;
  std::vector<double> values;
};

// Rejects negative or all-zero input; rescales to trapezoid mass 1.
GridDensity normalize(const Grid& g, std::vector<double> raw);

GridDensity gaussian_density(const Grid& g, double mean, double var);

// Trapezoid integral of x^k p(x), k in {0,...,4}.
double moment(const GridDensity& d, int k);

double l1_distance(const GridDensity& a, const GridDensity& b);

// Density floor used before taking logs: max(1e-300, floor_rel * max p).
double density_clip(const GridDensity& d, double floor_rel);

// d/dx log p at the nodes: central differences of log(max(p, clip)) inside the
// clip region, affine extrapolation of the score outside it (log-density tails of
// Gaussian-like targets are quadratic, so their score is affine).
struct ScoreField {
  Grid grid;
  std::vector<double> values;
};
ScoreField score(const GridDensity& d, double floor_rel = 1e-14);

// Gaussian KDE with Silverman bandwidth 1.06 sigma M^{-1/5}, normalized on the grid.
// Needs >= 100 samples with nonzero variance.
GridDensity from_samples(const std::vector<double>& xs, const Grid& g);

// Central window [quantile((1-mass)/2), quantile(1-(1-mass)/2)] of a density.
std::pair<double, double> central_window(const GridDensity& d, double mass = 0.95);

// Piecewise-linear CDF of a grid density and its inverse.
class GridCdf {
 public:
  explicit GridCdf(const GridDensity& d);
  double cdf(double x) const;
  double quantile(double u) const;

 private:
  Grid grid_;
  std::vector<double> cum_;  // cum_[0] = 0, cum_[n-1] = 1
};

void write_density_csv(const std::string& path, const GridDensity& d);
GridDensity read_density_csv(const std::string& path);

}  // namespace otto
