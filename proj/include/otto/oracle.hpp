#pragma once

#include <utility>

#include "otto/potential.hpp"

namespace otto::oracle {

struct GaussianState {
  double mean = 0.0;
  double var = 1.0;  // > 0
};

// Marginal law of dX = -X/2 dt + dW (quadratic potential, theta = 1/4) at time t >= 0:
// mean m0 e^{-t/2}, variance v0 e^{-t} + 1 - e^{-t}.
GaussianState ou_marginal(GaussianState g0, double t);

// Marginal law of dX = dW (Psi = 0): mean unchanged, variance v0 + t.
GaussianState heat_marginal(GaussianState g0, double t);

// Closed-form (H, I) of N(m, v) against q = e^{-2 Psi}. Supported: Zero and Quadratic.
// Quadratic theta, c: H = -1/2 log(2 pi e v) + 2 theta (v + m^2) + 2c,
//                     I = (2 theta - 1/v)^2 v + (2 theta m)^2.
// Zero:               H = -1/2 log(2 pi e v),  I = 1/v.
std::pair<double, double> gaussian_entropy_fisher(GaussianState g, const Potential& pot);

// W2(N(m1,v1), N(b.m,b.v)) = sqrt((m1-m2)^2 + (sqrt(v1)-sqrt(v2))^2).
double gaussian_w2(GaussianState a, GaussianState b);

// H(N_a | N_b) for two Gaussian probability laws.
double gaussian_relative_entropy(GaussianState a, GaussianState b);

// d/dt H and d/dt W2-speed along ou_marginal, closed form via the chain rule.
double ou_entropy_slope(GaussianState g0, double t, const Potential& pot);
double ou_metric_speed(GaussianState g0, double t);

}  // namespace otto::oracle
