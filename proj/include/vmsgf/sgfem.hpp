#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "vmsgf/gpc_basis.hpp"
#include "vmsgf/mesh.hpp"
#include "vmsgf/problem.hpp"

namespace vmsgf {

enum class Method { galerkin, vms };

std::string to_string(Method method);
Method parse_method(const std::string& text);

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// gPC coefficients u_{i,m} of a discrete stochastic field, one row per
/// interior node and one column per basis rank (graded-lex order).
class CoefficientField {
 public:
  CoefficientField(GpcBasis basis, Mesh1D mesh, Eigen::MatrixXd coeffs);
  static CoefficientField zero(GpcBasis basis, Mesh1D mesh);

  const GpcBasis& basis() const { return basis_; }
  const Mesh1D& mesh() const { return mesh_; }
  const Eigen::MatrixXd& coeffs() const { return coeffs_; }
  Eigen::MatrixXd& coeffs() { return coeffs_; }
  std::size_t n_nodes() const { return static_cast<std::size_t>(coeffs_.rows()); }
  std::size_t n_modes() const { return static_cast<std::size_t>(coeffs_.cols()); }
  double coeff(std::size_t node, std::size_t rank) const {
    return coeffs_(static_cast<Eigen::Index>(node), static_cast<Eigen::Index>(rank));
  }

  /// Zero-mode coefficient per interior node.
  std::vector<double> mean() const;
  /// Sum of squared non-zero-mode coefficients per interior node.
  std::vector<double> variance() const;

  /// Coefficients of the field at x (piecewise linear in x, zero at the
  /// boundary).
  Eigen::VectorXd modes_at(double x) const;
  /// sum_m u_m(x) Phi_m(xi).
  double evaluate(double x, std::span<const double> xi) const;
  /// Interior nodal values of the realization at xi.
  std::vector<double> realization(std::span<const double> xi) const;

 private:
  GpcBasis basis_;
  Mesh1D mesh_;
  Eigen::MatrixXd coeffs_;
};

/// Assembled stochastic Galerkin system; unknown (i, m) lives at flat row
/// i * n_modes + m (node-major).
struct CoupledSystem {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
  GpcBasis basis;
  Mesh1D mesh;

  std::size_t n_nodes() const { return mesh.n_interior(); }
  std::size_t n_modes() const { return basis.size(); }
  std::size_t unknowns() const { return n_nodes() * n_modes(); }
  std::size_t flat(std::size_t node, std::size_t rank) const { return node * n_modes() + rank; }
};

/// Stochastic factors of one element: E[beta Phi_m Phi_n], E[tau beta^2 Phi_m
/// Phi_n] and E[tau beta f Phi_n], reduced to the element's active coordinate.
struct ElementStochasticFactors {
  int coordinate = 0;              // 0-based active coordinate
  Eigen::MatrixXd beta;            // (p+1)^2
  Eigen::MatrixXd tau_beta2;       // (p+1)^2, zero for Galerkin
  Eigen::VectorXd tau_beta_f;      // p+1, zero for Galerkin
};

/// Gauss nodes used for the per-element stochastic integrals.
int assembly_node_count(int p, const BetaMap& map);

ElementStochasticFactors element_factors(const AdeProblem& problem, std::size_t element,
                                         Method method);

/// Element-parallel assembly (OpenMP) using 1-D quadrature in each element's
/// active coordinate. Element contributions are scattered in element order, so
/// the result does not depend on the thread count.
CoupledSystem assemble(const AdeProblem& problem, Method method);

struct SolveReport {
  double relative_residual = 0.0;
  int refinement_steps = 0;
};

/// Direct solve by block-tridiagonal LU (blocks are n_modes x n_modes) with
/// iterative refinement to a relative residual of 1e-10.
CoefficientField solve(const CoupledSystem& system, SolveReport* report = nullptr);

/// Bytes held by the block-tridiagonal factorization of a system of this size.
double solver_memory_bytes(std::size_t n_nodes, std::size_t n_modes);

/// Serial reference kernels used to validate the parallel ones.
namespace reference {

/// Full-tensor stochastic quadrature over all q coordinates, dense per-element
/// blocks, serial element loop.
CoupledSystem assemble(const AdeProblem& problem, Method method);

/// General sparse LU.
CoefficientField solve(const CoupledSystem& system, SolveReport* report = nullptr);

}  // namespace reference

}  // namespace vmsgf
