#include <cmath>
#include <cstring>
#include <map>
#include <string>
#include <utility>

#include <Eigen/SparseLU>

#include "vmsgf/deterministic.hpp"
#include "vmsgf/error.hpp"
#include "vmsgf/quadrature.hpp"
#include "vmsgf/sgfem.hpp"

namespace vmsgf::reference {

namespace {

struct ElementBlocks {
  Eigen::MatrixXd beta;       // E[beta Phi_m Phi_n]
  Eigen::MatrixXd tau_beta2;  // E[tau beta^2 Phi_m Phi_n]
  Eigen::VectorXd tau_beta_f; // E[tau beta f Phi_n]
};

ElementBlocks element_blocks(const AdeProblem& problem, const Region& region, double h, Method method,
                             const StochasticQuadrature& quad, std::size_t element) {
  const GpcBasis& basis = problem.basis();
  const auto c = static_cast<std::size_t>(region.coordinate - 1);
  const BetaMap map = region.map;
  const double kappa = problem.kappa();
  const double f = problem.source();
  ElementBlocks out;
  out.beta = weighted_gram(basis, [&](std::span<const double> xi) { return map(xi[c]); }, quad);
  const auto n = static_cast<Eigen::Index>(basis.size());
  if (method == Method::galerkin) {
    out.tau_beta2 = Eigen::MatrixXd::Zero(n, n);
    out.tau_beta_f = Eigen::VectorXd::Zero(n);
    return out;
  }
  auto tau_at = [&](std::span<const double> xi) {
    const double b = map(xi[c]);
    if (!(b > 0.0)) {
      throw NumericalError("stabilization parameter undefined (beta <= 0) in element " +
                           std::to_string(element));
    }
    return tau(h, b, kappa);
  };
  out.tau_beta2 = weighted_gram(
      basis, [&](std::span<const double> xi) { const double b = map(xi[c]); return tau_at(xi) * b * b; },
      quad);
  out.tau_beta_f = Eigen::VectorXd::Zero(n);
  std::vector<double> phi;
  for (std::size_t j = 0; j < quad.size(); ++j) {
    const auto xi = quad.node(j);
    phi = basis.eval_all(xi);
    const double w = quad.weight(j) * tau_at(xi) * map(xi[c]) * f;
    for (Eigen::Index m = 0; m < n; ++m) out.tau_beta_f(m) += w * phi[static_cast<std::size_t>(m)];
  }
  return out;
}

}  // namespace

CoupledSystem assemble(const AdeProblem& problem, Method method) {
  const GpcBasis& basis = problem.basis();
  const Mesh1D& mesh = problem.mesh();
  const std::size_t ns = basis.size();
  const std::size_t n_el = mesh.n_elements();
  const std::size_t unknowns = mesh.n_interior() * ns;
  const double kappa = problem.kappa();
  const double f = problem.source();

  int nodes = 0;
  for (const Region& r : problem.beta().regions()) nodes = std::max(nodes, assembly_node_count(basis.order(), r.map));
  const StochasticQuadrature quad = StochasticQuadrature::tensor(basis.dimension(), nodes);
  const Eigen::MatrixXd mass = weighted_gram(basis, [](std::span<const double>) { return 1.0; }, quad);
  Eigen::VectorXd mean_phi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ns));
  for (std::size_t j = 0; j < quad.size(); ++j) {
    const std::vector<double> phi = basis.eval_all(quad.node(j));
    for (std::size_t m = 0; m < ns; ++m) mean_phi(static_cast<Eigen::Index>(m)) += quad.weight(j) * phi[m];
  }

  // Blocks depend only on the region and the element size.
  std::map<std::pair<std::size_t, double>, ElementBlocks> cache;
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(unknowns));
  for (std::size_t e = 0; e < n_el; ++e) {
    const double h = mesh.h(e);
    const std::size_t region_index = problem.element_region_index(e);
    auto key = std::make_pair(region_index, h);
    auto it = cache.find(key);
    if (it == cache.end()) {
      it = cache.emplace(key, element_blocks(problem, problem.element_region(e), h, method, quad, e)).first;
    }
    const ElementBlocks& blk = it->second;
    const ElementMatrices unit = local_matrices(h, kappa, 1.0, 1.0, 0.0);
    for (int a = 0; a < 2; ++a) {
      const std::size_t row_node = e + static_cast<std::size_t>(a);
      if (row_node == 0 || row_node == n_el) continue;
      for (int b = 0; b < 2; ++b) {
        const std::size_t col_node = e + static_cast<std::size_t>(b);
        if (col_node == 0 || col_node == n_el) continue;
        for (std::size_t n = 0; n < ns; ++n) {
          for (std::size_t m = 0; m < ns; ++m) {
            const auto in = static_cast<Eigen::Index>(n);
            const auto im = static_cast<Eigen::Index>(m);
            const double v = unit.diffusion[a][b] * mass(in, im) + unit.advection[a][b] * blk.beta(in, im) +
                             unit.stabilization[a][b] * blk.tau_beta2(in, im);
            if (v == 0.0) continue;
            triplets.emplace_back(static_cast<int>((row_node - 1) * ns + n),
                                  static_cast<int>((col_node - 1) * ns + m), v);
          }
        }
      }
      const double sign = a == 0 ? -1.0 : 1.0;
      for (std::size_t n = 0; n < ns; ++n) {
        const auto in = static_cast<Eigen::Index>(n);
        rhs(static_cast<Eigen::Index>((row_node - 1) * ns + n)) +=
            0.5 * f * h * mean_phi(in) + sign * blk.tau_beta_f(in);
      }
    }
  }
  CoupledSystem system{SparseMatrix(static_cast<Eigen::Index>(unknowns), static_cast<Eigen::Index>(unknowns)),
                       std::move(rhs), basis, mesh};
  system.matrix.setFromTriplets(triplets.begin(), triplets.end());
  return system;
}

CoefficientField solve(const CoupledSystem& system, SolveReport* report) {
  const Eigen::SparseMatrix<double> a = system.matrix;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw SolverError("sparse LU failed: " + lu.lastErrorMessage());
  const Eigen::VectorXd x = lu.solve(system.rhs);
  if (lu.info() != Eigen::Success || !x.allFinite()) throw SolverError("sparse LU solve failed");
  const double bnorm = system.rhs.norm();
  const double res = (system.rhs - a * x).norm() / (bnorm > 0.0 ? bnorm : 1.0);
  if (report != nullptr) {
    report->relative_residual = res;
    report->refinement_steps = 0;
  }
  Eigen::MatrixXd coeffs(static_cast<Eigen::Index>(system.n_nodes()),
                         static_cast<Eigen::Index>(system.n_modes()));
  for (std::size_t i = 0; i < system.n_nodes(); ++i) {
    for (std::size_t m = 0; m < system.n_modes(); ++m) {
      coeffs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) =
          x(static_cast<Eigen::Index>(system.flat(i, m)));
    }
  }
  return CoefficientField(system.basis, system.mesh, std::move(coeffs));
}

}  // namespace vmsgf::reference
