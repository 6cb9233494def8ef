#pragma once

#include <functional>
#include <stdexcept>
#include <string>

#include "otto/grid.hpp"

namespace otto {

struct InfiniteMassError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class PotentialKind { Zero, Quadratic, DoubleWell, Custom };

// Confining potential Psi: R -> [0, inf) with analytic derivatives, a curvature
// lower bound Psi'' >= kappa, and the Gibbs reference density q = e^{-2 Psi}.
class Potential {
 public:
  static Potential zero();
  // Psi(x) = theta x^2 + c, theta > 0. c = (1/4) log(2 pi) at theta = 1/4 makes q the
  // standard normal density; a constant shifts H(P|Q) by 2c and leaves scores unchanged.
  static Potential quadratic(double theta, double c = 0.0);
  // Psi(x) = (x^2 - alpha^2)^2, alpha > 0.
  static Potential double_well(double alpha);
  static Potential custom(std::function<double(double)> value, std::function<double(double)> grad,
                          std::function<double(double)> hess, double curvature_bound,
                          bool normalizable);

  double value(double x) const;
  double grad(double x) const;
  double hess(double x) const;

  double gibbs_density(double x) const;    // e^{-2 Psi(x)}
  double gibbs_mass(const Grid& g) const;  // trapezoid quadrature; InfiniteMassError if not normalizable

  double curvature_bound() const { return kappa_; }
  bool normalizable() const { return normalizable_; }
  // <x, Psi'(x)> >= -c x^2 for |x| >= R
  double coercivity_c() const { return coer_c_; }
  double coercivity_R() const { return coer_R_; }

  PotentialKind kind() const { return kind_; }
  double theta() const { return theta_; }
  double constant() const { return c_; }
  double alpha() const { return alpha_; }
  std::string describe() const;

 private:
  Potential() = default;
  PotentialKind kind_ = PotentialKind::Zero;
  double theta_ = 0.0, c_ = 0.0, alpha_ = 0.0;
  double kappa_ = 0.0;
  double coer_c_ = 0.0, coer_R_ = 0.0;
  bool normalizable_ = false;
  std::function<double(double)> f_, df_, d2f_;
};

// Smooth bump with compact support [center - radius, center + radius]:
//   B(x) = amplitude * exp(-1/(1-u^2)),  u = (x - center)/radius,  |u| < 1.
// beta = B' and div beta = B'' vanish identically outside the support.
class Perturbation {
 public:
  Perturbation(double center, double radius, double amplitude);

  double B(double x) const;
  double beta(double x) const;
  double div_beta(double x) const;

  double center() const { return center_; }
  double radius() const { return radius_; }
  double amplitude() const { return amplitude_; }
  double support_lo() const { return center_ - radius_; }
  double support_hi() const { return center_ + radius_; }

 private:
  double center_, radius_, amplitude_;
};

}  // namespace otto
