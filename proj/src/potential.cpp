#include "otto/potential.hpp"

#include <cmath>
#include <utility>

namespace otto {

Potential Potential::zero() {
  Potential p;
  p.kind_ = PotentialKind::Zero;
  p.kappa_ = 0.0;
  p.normalizable_ = false;
  p.coer_c_ = 0.0;
  p.coer_R_ = 0.0;
  return p;
}

Potential Potential::quadratic(double theta, double c) {
  if (theta <= 0.0) throw std::invalid_argument("quadratic potential needs theta > 0");
  if (c < 0.0) throw std::invalid_argument("quadratic potential needs c >= 0 to keep Psi >= 0");
  Potential p;
  p.kind_ = PotentialKind::Quadratic;
  p.theta_ = theta;
  p.c_ = c;
  p.kappa_ = 2.0 * theta;
  p.normalizable_ = true;
  p.coer_c_ = 0.0;
  p.coer_R_ = 0.0;
  return p;
}

Potential Potential::double_well(double alpha) {
  if (alpha <= 0.0) throw std::invalid_argument("double-well potential needs alpha > 0");
  Potential p;
  p.kind_ = PotentialKind::DoubleWell;
  p.alpha_ = alpha;
  p.kappa_ = -4.0 * alpha * alpha;  // min Psi'' = 12 x^2 - 4 alpha^2 at x = 0
  p.normalizable_ = true;
  p.coer_c_ = 0.0;
  p.coer_R_ = alpha;  // x Psi' = 4 x^2 (x^2 - alpha^2) >= 0 for |x| >= alpha
  return p;
}

Potential Potential::custom(std::function<double(double)> value, std::function<double(double)> grad,
                            std::function<double(double)> hess, double curvature_bound,
                            bool normalizable) {
  Potential p;
  p.kind_ = PotentialKind::Custom;
  p.f_ = std::move(value);
  p.df_ = std::move(grad);
  p.d2f_ = std::move(hess);
  p.kappa_ = curvature_bound;
  p.normalizable_ = normalizable;
  return p;
}

double Potential::value(double x) const {
  switch (kind_) {
    case PotentialKind::Zero:
      return 0.0;
    case PotentialKind::Quadratic:
      return theta_ * x * x + c_;
    case PotentialKind::DoubleWell: {
      double u = x * x - alpha_ * alpha_;
      return u * u;
    }
    case PotentialKind::Custom:
      return f_(x);
  }
  return 0.0;
}

double Potential::grad(double x) const {
  switch (kind_) {
    case PotentialKind::Zero:
      return 0.0;
    case PotentialKind::Quadratic:
      return 2.0 * theta_ * x;
    case PotentialKind::DoubleWell:
      return 4.0 * x * (x * x - alpha_ * alpha_);
    case PotentialKind::Custom:
      return df_(x);
  }
  return 0.0;
}

double Potential::hess(double x) const {
  switch (kind_) {
    case PotentialKind::Zero:
      return 0.0;
    case PotentialKind::Quadratic:
      return 2.0 * theta_;
    case PotentialKind::DoubleWell:
      return 12.0 * x * x - 4.0 * alpha_ * alpha_;
    case PotentialKind::Custom:
      return d2f_(x);
  }
  return 0.0;
}

double Potential::gibbs_density(double x) const { return std::exp(-2.0 * value(x)); }

double Potential::gibbs_mass(const Grid& g) const {
  if (!normalizable_) throw InfiniteMassError("gibbs_mass: e^{-2 Psi} has infinite mass");
  double sum = 0.0;
  for (std::size_t i = 0; i < g.n; ++i) {
    double w = (i == 0 || i + 1 == g.n) ? 0.5 : 1.0;
    sum += w * gibbs_density(g.node(i));
  }
  return sum * g.h();
}

std::string Potential::describe() const {
  switch (kind_) {
    case PotentialKind::Zero:
      return "zero";
    case PotentialKind::Quadratic:
      return "quadratic theta=" + std::to_string(theta_) + " c=" + std::to_string(c_);
    case PotentialKind::DoubleWell:
      return "double_well alpha=" + std::to_string(alpha_);
    case PotentialKind::Custom:
      return "custom";
  }
  return "?";
}

Perturbation::Perturbation(double center, double radius, double amplitude)
    : center_(center), radius_(radius), amplitude_(amplitude) {
  if (radius <= 0.0) throw std::invalid_argument("perturbation needs radius > 0");
}

double Perturbation::B(double x) const {
  double u = (x - center_) / radius_;
  double w = 1.0 - u * u;
  if (w <= 0.0) return 0.0;
  return amplitude_ * std::exp(-1.0 / w);
}

double Perturbation::beta(double x) const {
  double u = (x - center_) / radius_;
  double w = 1.0 - u * u;
  if (w <= 0.0) return 0.0;
  // B'(x) = B(x) * (-2u / w^2) / radius
  return B(x) * (-2.0 * u / (w * w)) / radius_;
}

double Perturbation::div_beta(double x) const {
  double u = (x - center_) / radius_;
  double w = 1.0 - u * u;
  if (w <= 0.0) return 0.0;
  // B''(x) = B(x) * (g(u)^2 + g'(u)) / radius^2, g(u) = -2u/w^2, g' = -2(1+3u^2)/w^3
  double g = -2.0 * u / (w * w);
  double gp = -2.0 * (1.0 + 3.0 * u * u) / (w * w * w);
  return B(x) * (g * g + gp) / (radius_ * radius_);
}

}  // namespace otto
