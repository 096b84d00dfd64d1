#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "vmsgf/error.hpp"
#include "vmsgf/quadrature.hpp"

using namespace vmsgf;

TEST_CASE("Gauss rule integrates monomials up to degree 2n-1 exactly") {
  for (int n = 1; n <= 20; ++n) {
    const QuadratureRule rule = gauss_legendre01(n);
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j < rule.size(); ++j) s += rule.weights[j] * std::pow(rule.nodes[j], k);
      CHECK(s == doctest::Approx(1.0 / (k + 1)).epsilon(1e-13));
    }
    for (double x : rule.nodes) CHECK((x > 0.0 && x < 1.0));
  }
  CHECK_THROWS_AS(gauss_legendre01(0), ConfigError);
}

TEST_CASE("tensor quadrature and expectation") {
  const StochasticQuadrature quad = StochasticQuadrature::tensor(3, 4);
  CHECK(quad.size() == 64);
  // E[x y^2 z^3] = 1/2 * 1/3 * 1/4
  const double e = expectation(quad, [](std::span<const double> xi) { return xi[0] * xi[1] * xi[1] * std::pow(xi[2], 3); });
  CHECK(e == doctest::Approx(1.0 / 24.0).epsilon(1e-14));
}

TEST_CASE("univariate gram agrees with the multivariate one in one coordinate") {
  const int p = 4;
  const QuadratureRule rule = gauss_legendre01(10);
  const Eigen::MatrixXd g1 = univariate_weighted_gram(p, [](double x) { return 1.0 + x * x; }, rule);
  const GpcBasis b(1, p);
  const Eigen::MatrixXd g2 = weighted_gram(
      b, [](std::span<const double> xi) { return 1.0 + xi[0] * xi[0]; }, StochasticQuadrature::tensor(1, 10));
  CHECK((g1 - g2).cwiseAbs().maxCoeff() < 1e-14);
  const Eigen::VectorXd m = univariate_weighted_moments(p, [](double x) { return 1.0 + x * x; }, rule);
  // E[(1 + x^2) phi_0] = 4/3
  CHECK(m(0) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(m(0) == doctest::Approx(g1(0, 0)).epsilon(1e-14));
}

TEST_CASE("non-finite weights are reported") {
  const GpcBasis b(1, 2);
  CHECK_THROWS_AS(weighted_gram(b, [](std::span<const double>) { return std::numeric_limits<double>::quiet_NaN(); },
                                StochasticQuadrature::tensor(1, 3)),
                  NumericalError);
  CHECK_THROWS_AS(univariate_weighted_gram(2, [](double) { return INFINITY; }, gauss_legendre01(3)), NumericalError);
}

TEST_CASE("adaptive integration") {
  CHECK(integrate_adaptive([](double x) { return std::exp(x); }, 0.0, 1.0) ==
        doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
  CHECK(integrate_adaptive([](double x) { return std::sqrt(x); }, 0.0, 1.0) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  // Boundary layer of width 1e-4.
  const double c = 1e4;
  CHECK(integrate_adaptive([c](double x) { return std::exp(-c * x); }, 0.0, 1.0, 1e-18, 1e-13) ==
        doctest::Approx(-std::expm1(-c) / c).epsilon(1e-12));
  CHECK(integrate_adaptive([](double x) { return std::abs(x - 0.3); }, 0.0, 1.0) ==
        doctest::Approx(0.5 * (0.09 + 0.49)).epsilon(1e-12));
}
