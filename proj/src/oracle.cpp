#include "otto/oracle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace otto::oracle {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

GaussianState ou_marginal(GaussianState g0, double t) {
  if (t < 0.0) throw std::invalid_argument("ou_marginal: t >= 0 required");
  double e = std::exp(-t);
  return {g0.mean * std::exp(-t / 2.0), g0.var * e + 1.0 - e};
}

GaussianState heat_marginal(GaussianState g0, double t) {
  if (t < 0.0) throw std::invalid_argument("heat_marginal: t >= 0 required");
  return {g0.mean, g0.var + t};
}

std::pair<double, double> gaussian_entropy_fisher(GaussianState g, const Potential& pot) {
  double m = g.mean, v = g.var;
  if (v <= 0.0) throw std::invalid_argument("gaussian state needs var > 0");
  double neg_diff_entropy = -0.5 * std::log(kTwoPi * std::numbers::e * v);
  switch (pot.kind()) {
    case PotentialKind::Zero:
      return {neg_diff_entropy, 1.0 / v};
    case PotentialKind::Quadratic: {
      double th = pot.theta();
      double H = neg_diff_entropy + 2.0 * th * (v + m * m) + 2.0 * pot.constant();
      // d/dx log ell = -(x-m)/v + 4 theta x = c1 x + m/v
      double c1 = 4.0 * th - 1.0 / v;
      double I = c1 * c1 * v + std::pow(c1 * m + m / v, 2);
      return {H, I};
    }
    default:
      throw std::invalid_argument("gaussian_entropy_fisher: only Zero and Quadratic supported");
  }
}

double gaussian_w2(GaussianState a, GaussianState b) {
  double dm = a.mean - b.mean;
  double ds = std::sqrt(a.var) - std::sqrt(b.var);
  return std::sqrt(dm * dm + ds * ds);
}

double gaussian_relative_entropy(GaussianState a, GaussianState b) {
  return 0.5 * std::log(b.var / a.var) + (a.var + (a.mean - b.mean) * (a.mean - b.mean)) / (2.0 * b.var) - 0.5;
}

double ou_entropy_slope(GaussianState g0, double t, const Potential& pot) {
  if (pot.kind() != PotentialKind::Quadratic)
    throw std::invalid_argument("ou_entropy_slope: quadratic potential required");
  GaussianState g = ou_marginal(g0, t);
  double m = g.mean, v = g.var;
  double mdot = -m / 2.0, vdot = 1.0 - v;
  double th = pot.theta();
  // H(m, v) = -1/2 log(2 pi e v) + 2 theta (v + m^2) + 2c
  double dHdm = 4.0 * th * m;
  double dHdv = -0.5 / v + 2.0 * th;
  return dHdm * mdot + dHdv * vdot;
}

double ou_metric_speed(GaussianState g0, double t) {
  GaussianState g = ou_marginal(g0, t);
  double m = g.mean, v = g.var;
  double mdot = -m / 2.0, vdot = 1.0 - v;
  double sdot = vdot / (2.0 * std::sqrt(v));
  return std::sqrt(mdot * mdot + sdot * sdot);
}

}  // namespace otto::oracle
