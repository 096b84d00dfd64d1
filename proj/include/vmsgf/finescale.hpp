#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "vmsgf/gpc_basis.hpp"
#include "vmsgf/mesh.hpp"
#include "vmsgf/problem.hpp"
#include "vmsgf/quadrature.hpp"
#include "vmsgf/sgfem.hpp"

namespace vmsgf {

/// chi(x, xi) = delta(x - x_s) * sum_m profile[m] Phi_m(xi).
struct SourceSpec {
  double x_s = 0.0;
  std::vector<double> profile;  // indexed by basis rank
};

/// Scalar field over (x, xi) with q = 1.
using StochasticField = std::function<double(double x, double xi)>;

/// Values of a field on a tensor grid; rows follow x, columns follow xi.
struct FieldGrid {
  std::vector<double> x;
  std::vector<double> xi;
  Eigen::MatrixXd values;
};

/// Ten uniform points per element plus the right end (all mesh nodes included).
std::vector<double> element_x_grid(const Mesh1D& mesh, int points_per_element = 10);
/// n uniform points on [0, 1] including both ends.
std::vector<double> uniform_xi_grid(int n = 101);

/// Samples a field on a grid; rows are filled in parallel.
FieldGrid sample_field(const StochasticField& field, std::vector<double> x, std::vector<double> xi);

/// Stochastic Green's function g_xi(x, s) of -kappa u'' + beta(xi) u' on
/// (0, L) for a single region with q = 1.
class StochasticKernel {
 public:
  StochasticKernel(double kappa, BetaMap map, double length);
  double operator()(double x, double s, double xi) const;

 private:
  double kappa_;
  BetaMap map_;
  double length_;
};

/// Fine-scale Green's operator G' = G - G mu^T [mu G mu^T]^{-1} mu G for the
/// functionals mu_{i,m}(v) = E[Phi_m v(x_i, .)] at the interior nodes.
class FineScaleOperator {
 public:
  /// Requires q = 1 and a single region. The xi quadrature starts at
  /// `xi_nodes` Gauss points and is doubled until two successive moment
  /// matrices agree to 1e-9 relative.
  explicit FineScaleOperator(const AdeProblem& problem, int xi_nodes = 64);

  const GpcBasis& basis() const { return basis_; }
  const Mesh1D& mesh() const { return mesh_; }
  const StochasticKernel& kernel() const { return kernel_; }
  const QuadratureRule& rule() const { return rule_; }
  /// Row (j, n), column (i, m): E[Phi_n g_xi(x_j, x_i) Phi_m]; flat index
  /// node * n_modes + rank.
  const Eigen::MatrixXd& moment_matrix() const { return moments_; }
  double condition_estimate() const { return condition_; }
  /// Max entry change of the moment matrix in the last quadrature doubling.
  double quadrature_discrepancy() const { return discrepancy_; }

  /// [mu G(chi)]_{j,n} = E[Phi_n g_xi(x_j, x_s) profile(xi)].
  Eigen::VectorXd source_moments(const SourceSpec& source) const;
  /// [mu G mu^T]^{-1} mu G(chi).
  Eigen::VectorXd coarse_weights(const SourceSpec& source) const;

  /// G(chi)(x, xi) = g_xi(x, x_s) profile(xi). The returned fields refer to
  /// this operator and must not outlive it.
  StochasticField greens(const SourceSpec& source) const;
  /// G'(chi)(x, xi).
  StochasticField fine_greens(const SourceSpec& source) const;

 private:
  void check_source(const SourceSpec& source) const;
  double profile(const SourceSpec& source, double xi) const;

  GpcBasis basis_;
  Mesh1D mesh_;
  StochasticKernel kernel_;
  QuadratureRule rule_;
  Eigen::MatrixXd moments_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  double condition_ = 0.0;
  double discrepancy_ = 0.0;
};

/// Moment matrix by (i, j) pairs in parallel.
Eigen::MatrixXd moment_matrix(const StochasticKernel& kernel, const Mesh1D& mesh, const GpcBasis& basis,
                              const QuadratureRule& rule);

/// E[Phi_m field(x, .)] for each x (rows) and rank m (columns), by Gauss
/// quadrature in xi.
Eigen::MatrixXd coarse_coefficients(const StochasticField& field, const std::vector<double>& x,
                                    const GpcBasis& basis, const QuadratureRule& rule);

struct LocalityMetrics {
  std::size_t source_element = 0;
  double interior_max = 0.0;   // max |field| over the closed source element
  double exterior_max = 0.0;   // max |field| outside it
  double ratio = 0.0;          // exterior / interior
  double boundary_x[2] = {0.0, 0.0};
  double boundary_max[2] = {0.0, 0.0};  // max over the xi grid of |field(x_b, xi)|
  Eigen::MatrixXd boundary_coeffs;      // 2 x n_modes, |E[Phi_m field(x_b, .)]|
};

/// Locality diagnostics of a field for a source at x_s. The maxima use the
/// sampled grid; the boundary coefficients use `rule`.
LocalityMetrics locality_metrics(const FieldGrid& grid, const StochasticField& field, const Mesh1D& mesh,
                                 double x_s, const GpcBasis& basis, const QuadratureRule& rule);

/// Coarse H^1_0 projection of v computed mode by mode: each mode E[v Phi_m]
/// is projected with the deterministic H^1_0 projector (nodal interpolation
/// in 1D).
CoefficientField project_modewise(const std::function<double(double, std::span<const double>)>& v,
                                  const Mesh1D& mesh, const GpcBasis& basis,
                                  const StochasticQuadrature& quad);
/// Same projection from the full tensor system (K (x) E[Phi Phi^T]) c = b with
/// b_{i,m} = E[Phi_m int v' phi_i'].
CoefficientField project_tensor(const std::function<double(double, std::span<const double>)>& v,
                                const Mesh1D& mesh, const GpcBasis& basis,
                                const StochasticQuadrature& quad);

namespace reference {
/// Serial moment matrix evaluating the basis at every node and pair.
Eigen::MatrixXd moment_matrix(const StochasticKernel& kernel, const Mesh1D& mesh, const GpcBasis& basis,
                              const QuadratureRule& rule);
}  // namespace reference

}  // namespace vmsgf
