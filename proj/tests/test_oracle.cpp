#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "otto/oracle.hpp"

using namespace otto;
using namespace otto::oracle;

TEST_CASE("ou marginal closed form") {
  GaussianState g = ou_marginal({1.0, 2.0}, std::log(4.0));
  CHECK(g.mean == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(g.var == doctest::Approx(1.25).epsilon(1e-12));

  GaussianState id = ou_marginal({1.0, 2.0}, 0.0);
  CHECK(id.mean == doctest::Approx(1.0));
  CHECK(id.var == doctest::Approx(2.0));

  for (double t : {0.1, 0.7, 3.0}) {
    GaussianState st = ou_marginal({0.0, 1.0}, t);
    CHECK(st.mean == doctest::Approx(0.0));
    CHECK(st.var == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("heat marginal closed form") {
  GaussianState g = heat_marginal({0.0, 1.0}, 0.5);
  CHECK(g.mean == doctest::Approx(0.0));
  CHECK(g.var == doctest::Approx(1.5));
  CHECK(heat_marginal({3.0, 1.0}, 2.0).mean == doctest::Approx(3.0));
  CHECK(heat_marginal({3.0, 1.0}, 0.0).var == doctest::Approx(1.0));
}

TEST_CASE("gaussian entropy and Fisher information") {
  Potential quad = Potential::quadratic(0.25);
  auto [h, i] = gaussian_entropy_fisher({1.0, 2.0}, quad);
  CHECK(h == doctest::Approx(1.0 - 0.5 * std::log(4.0 * M_PI)).epsilon(1e-12));  // -0.26551
  CHECK(h == doctest::Approx(-0.26551).epsilon(1e-4));
  CHECK(i == doctest::Approx(1.5).epsilon(1e-12));

  Potential quad_norm = Potential::quadratic(0.25, 0.25 * std::log(2.0 * M_PI));
  auto [h0, i0] = gaussian_entropy_fisher({0.0, 1.0}, quad_norm);
  CHECK(h0 == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(i0 == doctest::Approx(0.0).epsilon(1e-12));

  auto [hz, iz] = gaussian_entropy_fisher({0.0, 4.0}, Potential::zero());
  CHECK(hz == doctest::Approx(-0.5 * std::log(8.0 * M_PI * std::exp(1.0))).epsilon(1e-12));
  CHECK(iz == doctest::Approx(0.25).epsilon(1e-12));

  CHECK_THROWS(gaussian_entropy_fisher({0.0, 1.0}, Potential::double_well(1.0)));
}

TEST_CASE("gaussian W2 closed form") {
  CHECK(gaussian_w2({0, 1}, {1, 1}) == doctest::Approx(1.0));
  CHECK(gaussian_w2({0, 1}, {0, 4}) == doctest::Approx(1.0));
  CHECK(gaussian_w2({1, 2}, {0, 1}) ==
        doctest::Approx(std::sqrt(1.0 + std::pow(std::sqrt(2.0) - 1.0, 2))).epsilon(1e-12));
  CHECK(gaussian_w2({1, 2}, {0, 1}) == doctest::Approx(1.08239).epsilon(1e-4));
}

TEST_CASE("de Bruijn closed loop along the OU flow") {
  Potential quad = Potential::quadratic(0.25);
  GaussianState g0{1.0, 2.0};
  for (int k = 0; k < 20; ++k) {
    double t = 0.05 + 0.2 * k;
    auto [h, i] = gaussian_entropy_fisher(ou_marginal(g0, t), quad);
    (void)h;
    double slope = ou_entropy_slope(g0, t, quad);
    CHECK(slope == doctest::Approx(-0.5 * i).epsilon(1e-10));
  }
}

TEST_CASE("metric speed closed loop along the OU flow") {
  Potential quad = Potential::quadratic(0.25);
  GaussianState g0{1.0, 2.0};
  for (int k = 0; k < 20; ++k) {
    double t = 0.05 + 0.2 * k;
    auto [h, i] = gaussian_entropy_fisher(ou_marginal(g0, t), quad);
    (void)h;
    CHECK(ou_metric_speed(g0, t) == doctest::Approx(0.5 * std::sqrt(i)).epsilon(1e-10));
  }
}

TEST_CASE("relative entropy between gaussians") {
  // H(N(1,2) | N(0,1)) = -0.26551 + (1/2) log(2 pi) = 0.65343
  double h = gaussian_relative_entropy({1.0, 2.0}, {0.0, 1.0});
  CHECK(h == doctest::Approx(0.65343).epsilon(1e-4));
}

#include "otto/functionals.hpp"
#include "otto/transport.hpp"

TEST_CASE("grid functionals agree with the oracle across a sweep of states") {
  Grid g{-10.0, 10.0, 2048};
  Potential quad = Potential::quadratic(0.25);
  Potential zero = Potential::zero();
  GaussianState states[] = {{0.0, 1.0}, {1.0, 2.0}, {-0.7, 0.5}, {2.0, 1.5}, {0.3, 3.0}};
  for (const auto& s : states) {
    GridDensity d = gaussian_density(g, s.mean, s.var);
    for (const Potential* pot : {&quad, &zero}) {
      auto [h_ref, i_ref] = gaussian_entropy_fisher(s, *pot);
      CHECK(relative_entropy(d, *pot) == doctest::Approx(h_ref).epsilon(1e-4).scale(1.0));
      CHECK(relative_fisher_information(d, *pot) ==
            doctest::Approx(i_ref).epsilon(2e-3).scale(1.0));
    }
    for (const auto& s2 : states) {
      GridDensity d2 = gaussian_density(g, s2.mean, s2.var);
      CHECK(wasserstein2(d, d2) == doctest::Approx(gaussian_w2(s, s2)).epsilon(2e-3).scale(1.0));
    }
  }
}
