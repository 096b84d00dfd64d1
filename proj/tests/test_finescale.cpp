#include <doctest.h>

#include <cmath>
#include <random>

#include "vmsgf/deterministic.hpp"
#include "vmsgf/error.hpp"
#include "vmsgf/finescale.hpp"

using namespace vmsgf;

namespace {

AdeProblem locality_problem(int p, BetaMap map = BetaMap::one_plus_xi_squared(), double kappa = 1e-3, int n_el = 20) {
  std::vector<Region> regions = {{0.0, 1.0, 1, map}};
  return AdeProblem(kappa, 1.0, BetaField(regions, 1.0, 1), GpcBasis(1, p), Mesh1D::uniform(1.0, n_el));
}

double grid_max(const StochasticField& f, const std::vector<double>& xs, const std::vector<double>& xis) {
  double m = 0.0;
  for (double x : xs) {
    for (double xi : xis) m = std::max(m, std::abs(f(x, xi)));
  }
  return m;
}

}  // namespace

TEST_CASE("moment matrix: shape, parallel vs serial, and a direct quadrature oracle") {
  const AdeProblem prob = locality_problem(2);
  const FineScaleOperator op(prob);
  CHECK(op.moment_matrix().rows() == 57);
  CHECK(op.moment_matrix().cols() == 57);
  CHECK(op.quadrature_discrepancy() <= 1e-9);
  CHECK(op.condition_estimate() < 1e12);

  const Eigen::MatrixXd serial = reference::moment_matrix(op.kernel(), op.mesh(), op.basis(), op.rule());
  CHECK((serial - op.moment_matrix()).cwiseAbs().maxCoeff() < 1e-13 * serial.cwiseAbs().maxCoeff());

  // (m, n) = (0, 0) entries are E[g_xi(x_j, x_i)].
  const StochasticKernel& g = op.kernel();
  for (std::size_t j : {0u, 2u, 10u, 18u}) {
    for (std::size_t i : {1u, 2u, 17u}) {
      const double xj = prob.mesh().node(j + 1), xi_node = prob.mesh().node(i + 1);
      const double direct =
          integrate_adaptive([&](double xi) { return g(xj, xi_node, xi); }, 0.0, 1.0, 1e-16, 1e-13);
      CHECK(op.moment_matrix()(static_cast<Eigen::Index>(j * 3), static_cast<Eigen::Index>(i * 3)) ==
            doctest::Approx(direct).epsilon(1e-11).scale(1e-3));
    }
  }
}

TEST_CASE("p = 0 reduces the moment matrix to E[g]") {
  const AdeProblem prob = locality_problem(0);
  const FineScaleOperator op(prob);
  CHECK(op.moment_matrix().rows() == 19);
}

TEST_CASE("G'(mu_{i,m}) vanishes") {
  for (int p : {1, 2, 4}) {
    const FineScaleOperator op(locality_problem(p));
    const std::vector<double> xs = element_x_grid(op.mesh(), 4);
    const std::vector<double> xis = uniform_xi_grid(21);
    for (std::size_t i : {0u, 4u, 18u}) {
      for (std::size_t m = 0; m < op.basis().size(); ++m) {
        SourceSpec src{op.mesh().node(i + 1), std::vector<double>(op.basis().size(), 0.0)};
        src.profile[m] = 1.0;
        CHECK(grid_max(op.fine_greens(src), xs, xis) < 1e-8);
      }
    }
  }
}

TEST_CASE("nodal coarse coefficients of G'(chi) vanish for random sources") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int p : {2, 3, 4}) {
    const FineScaleOperator op(locality_problem(p));
    const QuadratureRule check = gauss_legendre01(static_cast<int>(op.rule().size()) * 2 + 3);
    std::vector<double> nodes;
    for (std::size_t i = 1; i + 1 < op.mesh().nodes().size(); ++i) nodes.push_back(op.mesh().node(i));
    for (int trial = 0; trial < 3; ++trial) {
      SourceSpec src{0.05 + 0.9 * (u(rng) + 1.0) / 2.0, {}};
      for (std::size_t m = 0; m < op.basis().size(); ++m) src.profile.push_back(u(rng));
      const Eigen::MatrixXd c = coarse_coefficients(op.fine_greens(src), nodes, op.basis(), check);
      CHECK(c.cwiseAbs().maxCoeff() < 1e-8);
      // The coarse response itself is not annihilated.
      const Eigen::MatrixXd cg = coarse_coefficients(op.greens(src), nodes, op.basis(), check);
      CHECK(cg.cwiseAbs().maxCoeff() > 1e-3);
    }
  }
}

TEST_CASE("deterministic limit gives the element Green's function") {
  const double kappa = 0.02, beta = 1.3;
  const FineScaleOperator op(locality_problem(0, BetaMap::constant(beta), kappa, 10));
  for (double xs : {0.125, 0.43, 0.97}) {
    const SourceSpec src{xs, {1.0}};
    const StochasticField gp = op.fine_greens(src);
    const std::size_t e = op.mesh().locate(xs);
    const GreensKernel element(kappa, beta, op.mesh().node(e), op.mesh().node(e + 1));
    for (double x : element_x_grid(op.mesh(), 7)) {
      const bool inside = x >= op.mesh().node(e) && x <= op.mesh().node(e + 1);
      const double expected = inside ? element(x, xs) : 0.0;
      CHECK(std::abs(gp(x, 0.5) - expected) < 1e-8);
    }
    for (std::size_t k = 1; k + 1 < op.mesh().nodes().size(); ++k) CHECK(std::abs(gp(op.mesh().node(k), 0.2)) < 1e-8);
  }
}

TEST_CASE("locality diagnostics on the reference configuration") {
  const FineScaleOperator op(locality_problem(2));
  const SourceSpec src{0.125, {1.0, 1.0, 1.0}};
  const StochasticField g = op.greens(src);
  const StochasticField gp = op.fine_greens(src);
  const auto xs = element_x_grid(op.mesh());
  const auto xis = uniform_xi_grid();
  const QuadratureRule check = gauss_legendre01(128);
  const LocalityMetrics mg = locality_metrics(sample_field(g, xs, xis), g, op.mesh(), 0.125, op.basis(), check);
  const LocalityMetrics mgp = locality_metrics(sample_field(gp, xs, xis), gp, op.mesh(), 0.125, op.basis(), check);
  CHECK(mg.source_element == 2);
  CHECK(mg.boundary_x[0] == doctest::Approx(0.10));
  CHECK(mg.boundary_x[1] == doctest::Approx(0.15));
  // G(chi) is non-local, G'(chi) is confined to the source element.
  CHECK(mg.ratio > 0.5);
  CHECK(mgp.ratio < 0.05);
  CHECK(mgp.boundary_coeffs.maxCoeff() < 1e-8);
  CHECK(mgp.boundary_max[0] > 0.0);
}

TEST_CASE("source and configuration validation") {
  const FineScaleOperator op(locality_problem(2));
  const SourceSpec zero{0.3, {0.0, 0.0, 0.0}};
  CHECK(grid_max(op.greens(zero), {0.1, 0.3, 0.6}, {0.0, 0.5, 1.0}) == 0.0);
  CHECK(grid_max(op.fine_greens(zero), {0.1, 0.3, 0.6}, {0.0, 0.5, 1.0}) == 0.0);
  const SourceSpec src{0.3, {1.0}};
  CHECK(op.greens(src)(0.0, 0.4) == 0.0);
  CHECK(op.greens(src)(1.0, 0.4) == 0.0);
  CHECK_THROWS_AS(op.greens(SourceSpec{0.3, {1, 1, 1, 1}}), ConfigError);
  CHECK_THROWS_AS(op.greens(SourceSpec{1.0, {1}}), DomainError);

  std::vector<Region> two = {{0.0, 0.5, 1, {}}, {0.5, 1.0, 1, {}}};
  const AdeProblem multi(1e-3, 1.0, BetaField(two, 1.0, 1), GpcBasis(1, 2), Mesh1D::uniform(1.0, 20));
  CHECK_THROWS_AS(FineScaleOperator{multi}, ConfigError);
  std::vector<Region> one = {{0.0, 1.0, 2, {}}};
  const AdeProblem q2(1e-3, 1.0, BetaField(one, 1.0, 2), GpcBasis(2, 1), Mesh1D::uniform(1.0, 20));
  CHECK_THROWS_AS(FineScaleOperator{q2}, ConfigError);
}

TEST_CASE("mode-wise projection equals the full tensor projection") {
  auto v = [](double x, std::span<const double> xi) {
    double s = std::sin(3.0 * x) * (1.0 + xi[0] * xi[0]);
    if (xi.size() > 1) s += x * x * std::exp(xi[1] * x);
    return s * (1.0 - x);
  };
  const Mesh1D mesh({0.0, 0.1, 0.25, 0.5, 0.6, 0.8, 1.0});
  for (int q : {1, 2}) {
    const GpcBasis basis(q, 3);
    const StochasticQuadrature quad = StochasticQuadrature::tensor(q, 8);
    const CoefficientField a = project_modewise(v, mesh, basis, quad);
    const CoefficientField b = project_tensor(v, mesh, basis, quad);
    CHECK((a.coeffs() - b.coeffs()).cwiseAbs().maxCoeff() < 1e-10);
  }
}
