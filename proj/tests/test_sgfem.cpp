#include <doctest.h>

#include <cmath>

#include <omp.h>

#include "vmsgf/deterministic.hpp"
#include "vmsgf/error.hpp"
#include "vmsgf/quadrature.hpp"
#include "vmsgf/sgfem.hpp"

using namespace vmsgf;

namespace {

AdeProblem single_rv(int n_el, int p, double kappa = 1e-3) {
  std::vector<Region> regions = {{0.0, 1.0, 1, BetaMap::one_plus_xi_squared()}};
  return AdeProblem(kappa, 1.0, BetaField(regions, 1.0, 1), GpcBasis(1, p), Mesh1D::uniform(1.0, n_el));
}

AdeProblem multi_rv(int q, int n_el, int p, double kappa = 1e-2) {
  return AdeProblem(kappa, 1.0, BetaField(equal_regions(1.0, q), 1.0, q), GpcBasis(q, p), Mesh1D::uniform(1.0, n_el));
}

double max_abs_diff(const SparseMatrix& a, const SparseMatrix& b) {
  const Eigen::MatrixXd d = Eigen::MatrixXd(a) - Eigen::MatrixXd(b);
  return d.cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("parallel assembly matches full-tensor reference assembly") {
  for (Method method : {Method::galerkin, Method::vms}) {
    for (const AdeProblem& prob : {single_rv(12, 3), multi_rv(2, 10, 2), multi_rv(3, 6, 2)}) {
      const CoupledSystem fast = assemble(prob, method);
      const CoupledSystem ref = reference::assemble(prob, method);
      const double scale = Eigen::MatrixXd(ref.matrix).cwiseAbs().maxCoeff();
      CHECK(max_abs_diff(fast.matrix, ref.matrix) < 1e-12 * scale);
      CHECK((fast.rhs - ref.rhs).cwiseAbs().maxCoeff() < 1e-12 * ref.rhs.cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("assembly is independent of the thread count") {
  const AdeProblem prob = multi_rv(5, 20, 2);
  omp_set_num_threads(1);
  const CoupledSystem one = assemble(prob, Method::vms);
  omp_set_num_threads(4);
  const CoupledSystem four = assemble(prob, Method::vms);
  omp_set_num_threads(omp_get_num_procs());
  REQUIRE(one.matrix.nonZeros() == four.matrix.nonZeros());
  bool identical = true;
  for (Eigen::Index k = 0; k < one.matrix.nonZeros(); ++k) {
    identical = identical && one.matrix.valuePtr()[k] == four.matrix.valuePtr()[k] &&
                one.matrix.innerIndexPtr()[k] == four.matrix.innerIndexPtr()[k];
  }
  CHECK(identical);
  CHECK((one.rhs.array() == four.rhs.array()).all());
}

TEST_CASE("block solver matches sparse LU") {
  for (Method method : {Method::galerkin, Method::vms}) {
    for (const AdeProblem& prob : {single_rv(20, 2), multi_rv(5, 20, 2), multi_rv(2, 16, 4, 1e-3)}) {
      const CoupledSystem sys = assemble(prob, method);
      SolveReport fast_report, ref_report;
      const CoefficientField fast = solve(sys, &fast_report);
      const CoefficientField ref = reference::solve(sys, &ref_report);
      CHECK(fast_report.relative_residual < 1e-10);
      const double scale = ref.coeffs().cwiseAbs().maxCoeff();
      CHECK((fast.coeffs() - ref.coeffs()).cwiseAbs().maxCoeff() < 1e-9 * scale);
    }
  }
}

TEST_CASE("system sizes") {
  CHECK(assemble(multi_rv(5, 20, 2), Method::vms).matrix.rows() == 399);
  CHECK(Mesh1D::uniform(1.0, 320).n_interior() * GpcBasis(5, 6).size() == 147378);
  CHECK(solver_memory_bytes(319, 462) > 1e9);
}

TEST_CASE("p = 0 with a constant map reduces to the deterministic solve") {
  std::vector<Region> regions = {{0.0, 1.0, 1, BetaMap::constant(1.5)}};
  const AdeProblem prob(1e-3, 1.0, BetaField(regions, 1.0, 1), GpcBasis(1, 0), Mesh1D::uniform(1.0, 20));
  const double xi = 0.3;
  for (Method method : {Method::galerkin, Method::vms}) {
    const CoefficientField sg = solve(assemble(prob, method));
    const auto det = solve_realization(prob, std::span<const double>(&xi, 1), method == Method::vms);
    for (std::size_t i = 0; i < det.size(); ++i) CHECK(sg.coeff(i, 0) == doctest::Approx(det[i]).epsilon(1e-10));
  }
}

TEST_CASE("a deterministic map leaves the higher modes at zero") {
  std::vector<Region> regions = {{0.0, 1.0, 1, BetaMap::constant(1.0)}};
  const AdeProblem prob(1e-2, 1.0, BetaField(regions, 1.0, 1), GpcBasis(1, 3), Mesh1D::uniform(1.0, 20));
  const CoefficientField sg = solve(assemble(prob, Method::vms));
  for (std::size_t i = 0; i < sg.n_nodes(); ++i) {
    CHECK(sg.coeff(i, 0) == doctest::Approx(exact_solution(1e-2, 1.0, 1.0, 1.0, prob.mesh().node(i + 1))).epsilon(1e-9));
    for (std::size_t m = 1; m < sg.n_modes(); ++m) CHECK(std::abs(sg.coeff(i, m)) < 1e-13);
  }
}

TEST_CASE("Galerkin accepts beta = 0, VMS rejects it") {
  std::vector<Region> regions = {{0.0, 1.0, 1, BetaMap::constant(0.0)}};
  const AdeProblem prob(0.5, 1.0, BetaField(regions, 1.0, 1), GpcBasis(1, 1), Mesh1D::uniform(1.0, 8));
  const CoefficientField sg = solve(assemble(prob, Method::galerkin));
  CHECK(sg.coeff(3, 0) == doctest::Approx(0.5 * 0.5 / (2 * 0.5)).epsilon(1e-12));
  CHECK_THROWS_AS(assemble(prob, Method::vms), NumericalError);
  CHECK_THROWS_AS(reference::assemble(prob, Method::vms), NumericalError);
}

TEST_CASE("variance from coefficients equals the quadrature variance") {
  const AdeProblem prob = multi_rv(2, 10, 3);
  const CoefficientField sg = solve(assemble(prob, Method::vms));
  const StochasticQuadrature quad = StochasticQuadrature::tensor(2, 6);
  const auto mean = sg.mean();
  const auto var = sg.variance();
  for (double x : {0.1, 0.3, 0.8}) {
    const std::size_t node = static_cast<std::size_t>(std::lround(x * 10)) - 1;
    const double m = expectation(quad, [&](std::span<const double> xi) { return sg.evaluate(x, xi); });
    const double v = expectation(quad, [&](std::span<const double> xi) {
      const double d = sg.evaluate(x, xi) - m;
      return d * d;
    });
    CHECK(m == doctest::Approx(mean[node]).epsilon(1e-12));
    CHECK(std::abs(v - var[node]) < 1e-10);
  }
}

TEST_CASE("coefficient field evaluation") {
  const AdeProblem prob = single_rv(4, 1);
  Eigen::MatrixXd c(3, 2);
  c << 1, 2, 3, 4, 5, 6;
  const CoefficientField f(prob.basis(), prob.mesh(), c);
  const double xi = 0.75;
  const double phi1 = legendre01(1, xi);
  CHECK(f.evaluate(0.25, std::span<const double>(&xi, 1)) == doctest::Approx(1 + 2 * phi1));
  CHECK(f.evaluate(0.125, std::span<const double>(&xi, 1)) == doctest::Approx(0.5 * (1 + 2 * phi1)));
  CHECK(f.evaluate(1.0, std::span<const double>(&xi, 1)) == 0.0);
  const auto r = f.realization(std::span<const double>(&xi, 1));
  CHECK(r[2] == doctest::Approx(5 + 6 * phi1));
  CHECK_THROWS_AS(CoefficientField(prob.basis(), prob.mesh(), Eigen::MatrixXd::Zero(2, 2)), ConfigError);
}
