#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "otto/functionals.hpp"
#include "otto/oracle.hpp"
#include "otto/pde.hpp"

using namespace otto;

namespace {

const Grid kGrid{-10.0, 10.0, 2048};

GridDensity gibbs_density_of(const Potential& pot, const Grid& g = kGrid) {
  std::vector<double> q(g.n);
  for (std::size_t i = 0; i < g.n; ++i) q[i] = pot.gibbs_density(g.node(i));
  return normalize(g, std::move(q));
}

}  // namespace

TEST_CASE("heat flow variance growth") {
  GridDensity init = gaussian_density(kGrid, 0.0, 1.0);
  FlowSnapshotSeries flow = solve_forward(Potential::zero(), init, 0.0, 0.5, 1e-3, 50);
  GridDensity last = flow.density(flow.times.size() - 1);
  double mu = moment(last, 1);
  CHECK(mu == doctest::Approx(0.0).scale(1.0).epsilon(1e-3));
  CHECK(moment(last, 2) - mu * mu == doctest::Approx(1.5).epsilon(0.01 / 1.5));
}

TEST_CASE("OU flow matches the closed form") {
  Potential quad = Potential::quadratic(0.25);
  GridDensity init = gaussian_density(kGrid, 1.0, 2.0);
  double T = std::log(4.0);
  FlowSnapshotSeries flow = solve_forward(quad, init, 0.0, T, 1e-4, 100);
  GridDensity last = flow.density(flow.times.size() - 1);
  double mu = moment(last, 1);
  CHECK(mu == doctest::Approx(0.5).epsilon(0.005 / 0.5));
  CHECK(moment(last, 2) - mu * mu == doctest::Approx(1.25).epsilon(0.01 / 1.25));
}

TEST_CASE("gibbs state is stationary at machine level") {
  Potential quad = Potential::quadratic(0.25);
  GridDensity init = gibbs_density_of(quad);
  FlowSnapshotSeries flow = solve_forward(quad, init, 0.0, 0.5, 1e-3, 100);
  double sup = 0.0;
  const auto& last = flow.states.back();
  for (std::size_t i = 0; i < kGrid.n; ++i)
    sup = std::max(sup, std::fabs(last[i] - init.values[i]));
  CHECK(sup < 1e-6);
  CHECK(sup < 1e-11);  // exponential fitting keeps the discrete Gibbs state exactly
}

TEST_CASE("mass conservation and positivity") {
  Potential dw = Potential::double_well(1.0);
  Grid g{-4.0, 4.0, 1024};
  GridDensity init = gaussian_density(g, 0.0, 0.25);
  FlowSnapshotSeries flow = solve_forward(dw, init, 0.0, 1.0, 1e-3, 100);
  for (std::size_t k = 0; k < flow.times.size(); ++k) {
    double mass = trapezoid(g, flow.states[k]);
    CHECK(std::fabs(mass - 1.0) < 1e-9);
    for (double v : flow.states[k]) CHECK(v >= 0.0);
  }
}

TEST_CASE("free energy and entropy decrease along unperturbed flows") {
  Potential quad = Potential::quadratic(0.25);
  GridDensity init = gaussian_density(kGrid, 1.0, 2.0);
  FlowSnapshotSeries flow = solve_forward(quad, init, 0.0, 1.0, 1e-3, 50);
  double prev_h = 1e300, prev_f = 1e300;
  for (std::size_t k = 0; k < flow.times.size(); ++k) {
    double h = relative_entropy(flow.density(k), quad);
    double f = free_energy(flow.density(k), quad);
    CHECK(h <= prev_h + 1e-8 * std::fabs(prev_h));
    CHECK(f <= prev_f + 1e-8 * std::fabs(prev_f));
    prev_h = h;
    prev_f = f;
  }
}

TEST_CASE("likelihood ratio") {
  GridDensity d = gaussian_density(kGrid, 1.0, 2.0);
  // zero potential: ell = p
  std::vector<double> ell = likelihood_ratio(d, Potential::zero());
  for (std::size_t i = 0; i < kGrid.n; i += 100)
    CHECK(ell[i] == doctest::Approx(d.values[i]).epsilon(1e-12));

  // gibbs state: ell is the constant 1/mass
  Potential quad = Potential::quadratic(0.25);
  GridDensity gibbs = gibbs_density_of(quad);
  std::vector<double> ell_g = likelihood_ratio(gibbs, quad);
  double c = 1.0 / std::sqrt(2.0 * M_PI);
  for (std::size_t i = 0; i < kGrid.n; ++i) {
    if (std::fabs(kGrid.node(i)) > 6.0) continue;
    CHECK(ell_g[i] == doctest::Approx(c).epsilon(1e-8));
  }

  // e^{2 Psi(0)} = 1: ell at the origin is the density value there
  std::size_t i0 = kGrid.n / 2;
  std::vector<double> ell_q = likelihood_ratio(d, quad);
  double x0 = kGrid.node(i0);
  double ref = std::exp(-(x0 - 1.0) * (x0 - 1.0) / 4.0) / std::sqrt(4.0 * M_PI) *
               std::exp(x0 * x0 / 2.0);
  CHECK(ell_q[i0] == doctest::Approx(ref).epsilon(1e-6));
  CHECK(ell_q[i0] == doctest::Approx(0.21970).epsilon(1e-2));
}

TEST_CASE("backward Kolmogorov preserves constants") {
  Potential quad = Potential::quadratic(0.25);
  std::vector<double> ell0(kGrid.n, 3.14);
  GridFunctionSeries s = solve_backward_kolmogorov(quad, kGrid, ell0, 0.0, 0.2, 1e-3, 50);
  for (const auto& state : s.states)
    for (std::size_t i = 0; i < kGrid.n; i += 64)
      CHECK(state[i] == doctest::Approx(3.14).epsilon(1e-12));
}

TEST_CASE("backward Kolmogorov agrees with the forward solver") {
  Potential quad = Potential::quadratic(0.25);
  GridDensity init = gaussian_density(kGrid, 1.0, 2.0);
  double T = 0.25;
  FlowSnapshotSeries flow = solve_forward(quad, init, 0.0, T, 1e-4, 250);
  GridFunctionSeries bk =
      solve_backward_kolmogorov(quad, kGrid, likelihood_ratio(init, quad), 0.0, T, 1e-4, 250);

  REQUIRE(bk.times.size() == flow.times.size());
  for (std::size_t k = 1; k < flow.times.size(); ++k) {
    std::vector<double> ref = likelihood_ratio(flow.density(k), quad);
    auto [lo, hi] = central_window(flow.density(k), 0.95);
    double sup = 0.0;
    for (std::size_t i = 0; i < kGrid.n; ++i) {
      double x = kGrid.node(i);
      if (x < lo || x > hi) continue;
      sup = std::max(sup, std::fabs(bk.states[k][i] - ref[i]) / (1.0 + std::fabs(ref[i])));
    }
    CHECK(sup < 1e-3);
  }
}

TEST_CASE("perturbed backward Kolmogorov reduces to the unperturbed one at amplitude zero") {
  Potential quad = Potential::quadratic(0.25);
  std::vector<double> ell0 = likelihood_ratio(gaussian_density(kGrid, 1.0, 2.0), quad);
  GridFunctionSeries plain = solve_backward_kolmogorov(quad, kGrid, ell0, 0.0, 0.1, 1e-3, 20);
  GridFunctionSeries zero_amp = solve_backward_kolmogorov(quad, kGrid, ell0, 0.0, 0.1, 1e-3, 20,
                                                          Perturbation(0.0, 1.0, 0.0));
  for (std::size_t k = 0; k < plain.times.size(); ++k)
    for (std::size_t i = 0; i < kGrid.n; i += 37)
      CHECK(plain.states[k][i] == zero_amp.states[k][i]);
}

TEST_CASE("perturbation ratio") {
  Potential quad = Potential::quadratic(0.25);
  GridDensity init = gaussian_density(kGrid, 1.0, 2.0);
  Perturbation bump(0.0, 1.0, 0.2);

  SUBCASE("amplitude zero gives ratio one") {
    FlowSnapshotSeries flow = solve_forward(quad, init, 0.0, 0.05, 1e-4, 100);
    FlowSnapshotSeries pflow =
        solve_forward(quad, init, 0.0, 0.05, 1e-4, 100, Perturbation(0.0, 1.0, 0.0));
    PerturbationRatioSeries pr = perturbation_ratio(flow, pflow);
    for (const auto& ys : pr.ratio.states)
      for (std::size_t i = 0; i < kGrid.n; i += 32) CHECK(ys[i] == doctest::Approx(1.0));
  }

  SUBCASE("shared initial condition gives ratio one at t0") {
    FlowSnapshotSeries flow = solve_forward(quad, init, 0.0, 0.05, 1e-4, 100);
    FlowSnapshotSeries pflow = solve_forward(quad, init, 0.0, 0.05, 1e-4, 100, bump);
    PerturbationRatioSeries pr = perturbation_ratio(flow, pflow);
    for (std::size_t i = 0; i < kGrid.n; i += 32)
      CHECK(pr.ratio.states[0][i] == doctest::Approx(1.0));
    CHECK(pr.sup_deviation_rate[0] == 0.0);
  }

  SUBCASE("linear deviation estimate: rate bounded and approaches div(beta p)/p") {
    // |Y - 1| <= C (t - t0): the sup rate must stay bounded by the t -> 0 limit
    // sup |div beta + beta dlog p(t0)| and converge to it from below. Diffusion
    // smooths the bump-localized deviation, so the rate decays as t grows.
    FlowSnapshotSeries flow = solve_forward(quad, init, 0.0, 4e-3, 2e-5, 25);
    FlowSnapshotSeries pflow = solve_forward(quad, init, 0.0, 4e-3, 2e-5, 25, bump);
    PerturbationRatioSeries pr = perturbation_ratio(flow, pflow);

    GridDensity d0 = flow.density(0);
    ScoreField s0 = score(d0);
    auto [lo, hi] = central_window(d0, 0.95);
    double first_order_sup = 0.0;
    for (std::size_t i = 0; i < kGrid.n; ++i) {
      double x = kGrid.node(i);
      if (x < lo || x > hi) continue;
      first_order_sup =
          std::max(first_order_sup, std::fabs(bump.div_beta(x) + bump.beta(x) * s0.values[i]));
    }
    for (std::size_t k = 1; k < pr.ratio.times.size(); ++k) {
      CHECK(pr.sup_deviation_rate[k] > 0.0);
      CHECK(pr.sup_deviation_rate[k] <= first_order_sup * 1.05);
    }
    CHECK(pr.sup_deviation_rate[1] == doctest::Approx(first_order_sup).epsilon(0.10));
  }

  SUBCASE("mismatched grids rejected") {
    FlowSnapshotSeries flow = solve_forward(quad, init, 0.0, 0.02, 1e-3, 10);
    Grid g2{-10.0, 10.0, 1024};
    FlowSnapshotSeries pflow =
        solve_forward(quad, gaussian_density(g2, 1.0, 2.0), 0.0, 0.02, 1e-3, 10, bump);
    CHECK_THROWS(perturbation_ratio(flow, pflow));
  }
}

TEST_CASE("self convergence under refinement") {
  Potential quad = Potential::quadratic(0.25);
  double T = 0.5;
  GridDensity init = gaussian_density(kGrid, 1.0, 2.0);
  FlowSnapshotSeries coarse = solve_forward(quad, init, 0.0, T, 2e-4, 2500);
  Grid fine_grid{-10.0, 10.0, 4096};
  FlowSnapshotSeries fine =
      solve_forward(quad, gaussian_density(fine_grid, 1.0, 2.0), 0.0, T, 1e-4, 5000);
  double h_coarse = relative_entropy(coarse.density(coarse.times.size() - 1), quad);
  double h_fine = relative_entropy(fine.density(fine.times.size() - 1), quad);
  CHECK(std::fabs(h_coarse - h_fine) < 1e-3);
}

TEST_CASE("flow interpolant reproduces gaussian scores") {
  Potential quad = Potential::quadratic(0.25);
  FlowSnapshotSeries flow{kGrid, quad, std::nullopt, {}, {}};
  for (int k = 0; k <= 20; ++k) {
    double t = 0.01 * k;
    oracle::GaussianState g = oracle::ou_marginal({1.0, 2.0}, t);
    flow.times.push_back(t);
    flow.states.push_back(gaussian_density(kGrid, g.mean, g.var).values);
  }
  FlowInterpolant interp(flow);
  for (double t : {0.0, 0.053, 0.1, 0.2}) {
    oracle::GaussianState g = oracle::ou_marginal({1.0, 2.0}, t);
    for (double x : {-3.0, -1.0, 0.0, 1.5, 4.0}) {
      double ref = -(x - g.mean) / g.var;
      CHECK(interp.score_p(t, x) == doctest::Approx(ref).epsilon(2e-3).scale(1.0));
      double logref =
          -0.5 * std::log(2.0 * M_PI * g.var) - (x - g.mean) * (x - g.mean) / (2.0 * g.var);
      CHECK(interp.log_p(t, x) == doctest::Approx(logref).epsilon(2e-3).scale(1.0));
    }
  }
  CHECK_THROWS(interp.score_p(0.5, 0.0));
  CHECK_THROWS(interp.score_p(-0.1, 0.0));
}
