#include <doctest.h>

#include <cmath>

#include "vmsgf/error.hpp"
#include "vmsgf/mesh.hpp"
#include "vmsgf/problem.hpp"
#include "vmsgf/quadrature.hpp"

using namespace vmsgf;

TEST_CASE("mesh construction and lookup") {
  const Mesh1D m = Mesh1D::uniform(1.0, 20);
  CHECK(m.n_elements() == 20);
  CHECK(m.n_interior() == 19);
  CHECK(m.h(3) == doctest::Approx(0.05));
  CHECK(m.locate(0.0) == 0);
  CHECK(m.locate(0.125) == 2);
  CHECK(m.locate(0.1) == 2);  // interior node -> element on its right
  CHECK(m.locate(1.0) == 19);
  CHECK_THROWS_AS(m.locate(1.0001), DomainError);
  CHECK_THROWS_AS(m.locate(-1e-9), DomainError);
  CHECK_THROWS_AS(Mesh1D({0.0, 0.5}), ConfigError);
  CHECK_THROWS_AS(Mesh1D({0.0, 0.5, 0.5, 1.0}), ConfigError);
  CHECK_THROWS_AS(Mesh1D({0.1, 0.5, 1.0}), ConfigError);
  CHECK_THROWS_AS(Mesh1D::uniform(1.0, 1), ConfigError);
}

TEST_CASE("hat functions form a partition of unity and interpolate") {
  const Mesh1D m({0.0, 0.1, 0.35, 0.6, 1.0});
  for (double x : {0.0, 0.05, 0.1, 0.2, 0.59, 0.9, 1.0}) {
    double s = 0.0;
    for (std::size_t k = 0; k < m.nodes().size(); ++k) s += m.hat(k, x);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-15));
  }
  const std::vector<double> v = {1.0, 2.0, -1.0};
  CHECK(m.interpolate(v, 0.35) == doctest::Approx(2.0));
  CHECK(m.interpolate(v, 0.05) == doctest::Approx(0.5));
  CHECK(m.interpolate(v, 0.8) == doctest::Approx(-0.5));
  CHECK(m.interpolate(v, 1.0) == 0.0);
}

TEST_CASE("element matrices match quadrature of the weak form") {
  const double h = 0.07, kappa = 0.3, beta = 1.7, tau = 0.011, f = 2.5;
  const ElementMatrices em = local_matrices(h, kappa, beta, tau, f);
  const QuadratureRule rule = gauss_legendre01(4);
  auto shape = [h](int a, double x) { return a == 0 ? 1.0 - x / h : x / h; };
  auto dshape = [h](int a) { return a == 0 ? -1.0 / h : 1.0 / h; };
  for (int a = 0; a < 2; ++a) {
    double load = 0.0, sload = 0.0;
    for (std::size_t j = 0; j < rule.size(); ++j) {
      const double x = h * rule.nodes[j];
      const double w = h * rule.weights[j];
      load += w * f * shape(a, x);
      sload += w * tau * beta * f * dshape(a);
    }
    CHECK(em.load[a] == doctest::Approx(load).epsilon(1e-14));
    CHECK(em.stabilization_load[a] == doctest::Approx(sload).epsilon(1e-14));
    for (int b = 0; b < 2; ++b) {
      double diff = 0.0, adv = 0.0, stab = 0.0;
      for (std::size_t j = 0; j < rule.size(); ++j) {
        const double x = h * rule.nodes[j];
        const double w = h * rule.weights[j];
        diff += w * kappa * dshape(a) * dshape(b);
        adv += w * beta * dshape(b) * shape(a, x);
        stab += w * tau * beta * beta * dshape(a) * dshape(b);
      }
      CHECK(em.diffusion[a][b] == doctest::Approx(diff).epsilon(1e-14));
      CHECK(em.advection[a][b] == doctest::Approx(adv).epsilon(1e-14));
      CHECK(em.stabilization[a][b] == doctest::Approx(stab).epsilon(1e-14));
    }
  }
}

TEST_CASE("beta maps") {
  CHECK(BetaMap::parse("one_plus_xi_squared")(0.5) == doctest::Approx(1.25));
  CHECK(BetaMap::parse("constant:1.5")(0.9) == 1.5);
  CHECK(BetaMap::parse(BetaMap::constant(0.1).name())(0.3) == 0.1);
  CHECK_THROWS_AS(BetaMap::parse("linear"), ConfigError);
  CHECK_THROWS_AS(BetaMap::parse("constant:abc"), ConfigError);
  CHECK_THROWS_AS(BetaMap::parse("constant:1x"), ConfigError);
}

TEST_CASE("region table validation") {
  const auto five = equal_regions(1.0, 5);
  CHECK(five.size() == 5);
  CHECK(five[4].x_max == 1.0);
  CHECK_NOTHROW(BetaField(five, 1.0, 5));
  CHECK_THROWS_AS(BetaField({}, 1.0, 1), ConfigError);
  CHECK_THROWS_AS(BetaField(five, 1.0, 4), ConfigError);  // coordinate 5 > q
  std::vector<Region> gap = {{0.0, 0.4, 1, {}}, {0.5, 1.0, 1, {}}};
  CHECK_THROWS_AS(BetaField(gap, 1.0, 1), ConfigError);
  std::vector<Region> short_cover = {{0.0, 0.9, 1, {}}};
  CHECK_THROWS_AS(BetaField(short_cover, 1.0, 1), ConfigError);
  std::vector<Region> empty_width = {{0.0, 0.0, 1, {}}, {0.0, 1.0, 1, {}}};
  CHECK_THROWS_AS(BetaField(empty_width, 1.0, 1), ConfigError);

  const BetaField field(five, 1.0, 5);
  const double xi[5] = {0.1, 0.2, 0.3, 0.4, 0.5};
  CHECK(field.value(0.0, xi) == doctest::Approx(1.01));
  CHECK(field.value(0.2, xi) == doctest::Approx(1.04));  // boundary belongs to the right region
  CHECK(field.value(1.0, xi) == doctest::Approx(1.25));
  CHECK_THROWS_AS(field.value(1.5, xi), DomainError);
}

TEST_CASE("regions must align with mesh nodes") {
  const BetaField field(equal_regions(1.0, 5), 1.0, 5);
  CHECK_NOTHROW(element_regions(field, Mesh1D::uniform(1.0, 20)));
  CHECK_THROWS_AS(element_regions(field, Mesh1D::uniform(1.0, 12)), ConfigError);
  const auto table = element_regions(field, Mesh1D::uniform(1.0, 20));
  CHECK(table[3] == 0);
  CHECK(table[4] == 1);
  CHECK(table[19] == 4);
}
