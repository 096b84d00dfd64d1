#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "vmsgf/gpc_basis.hpp"
#include "vmsgf/mesh.hpp"
#include "vmsgf/problem.hpp"
#include "vmsgf/sgfem.hpp"

namespace vmsgf {

/// sqrt(E[int |(a - b)'|^2 dx]) on the union of both meshes. Modes missing
/// from one basis count as zero there.
double v_norm(const CoefficientField& a, const CoefficientField& b);

/// Coefficients of `fine` at the interior nodes of `mesh`, truncated to the
/// modes of `basis` (n_interior x basis.size()).
Eigen::MatrixXd restrict_coefficients(const CoefficientField& fine, const Mesh1D& mesh,
                                      const GpcBasis& basis);

/// Nodal mean and variance of a field evaluated at the interior nodes of
/// `mesh`, using all of its modes.
struct NodalStatistics {
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> variance;
};
NodalStatistics nodal_statistics(const CoefficientField& field, const Mesh1D& mesh);

struct CoefficientErrorRow {
  std::size_t node = 0;  // interior node index
  double x = 0.0;
  std::size_t rank = 0;
  int order = 0;
  double error = 0.0;
};

struct CoefficientErrors {
  std::vector<CoefficientErrorRow> rows;  // node-major, then rank
  std::vector<double> per_order_max;      // index = total order
  double max = 0.0;
};

/// |field - reference| entrywise; reference is n_interior x n_modes on the
/// field's own mesh and basis.
CoefficientErrors coefficient_errors(const CoefficientField& field, const Eigen::MatrixXd& reference);

/// For a problem whose advection field depends on xi_1 only and is uniform in
/// x: E[u(x_i, xi) Phi_m] of the closed-form solution at the interior nodes.
Eigen::MatrixXd analytic_coefficients(const AdeProblem& problem, int xi_nodes = 96);
/// Exact nodal mean and variance for the same class of problems.
NodalStatistics analytic_statistics(const AdeProblem& problem, int xi_nodes = 96);

struct McEstimate {
  std::size_t samples = 0;
  std::vector<double> mean;
  std::vector<double> variance;  // unbiased
  std::vector<double> mean_stderr;
  std::vector<double> variance_stderr;
};

/// Seed of sample `index` derived from the master seed.
std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index);
/// Uniform draw on [0,1]^q for a sample.
std::vector<double> sample_point(std::uint64_t seed, std::uint64_t index, int q);

/// Monte Carlo estimate of nodal statistics from stabilized deterministic
/// solves at i.i.d. uniform points. Samples run in parallel; the reduction is
/// serial in sample order.
McEstimate mc_reference(const AdeProblem& problem, std::size_t samples, std::uint64_t seed);

/// Refinement ladder of (n_el, p) pairs.
class DiscretizationLadder {
 public:
  explicit DiscretizationLadder(std::vector<std::pair<int, int>> steps);
  static DiscretizationLadder parse(const std::string& text);  // "20:2, 40:3"
  const std::vector<std::pair<int, int>>& steps() const { return steps_; }
  std::size_t size() const { return steps_.size(); }
  std::string to_string() const;

 private:
  std::vector<std::pair<int, int>> steps_;
};

struct LadderStep {
  int n_el = 0;
  int p = 0;
  std::size_t unknowns = 0;
  double relative_residual = 0.0;
  double distance_to_next = 0.0;  // unset for the last step
};

struct LadderResult {
  std::vector<LadderStep> steps;
  CoefficientField reference;  // solution on the last step
};

/// Solves every step and records successive V-norm distances. Throws
/// ResourceError before solving a step whose factorization estimate exceeds
/// `memory_cap_bytes`.
LadderResult run_ladder(const AdeProblem& problem, const DiscretizationLadder& ladder, Method method,
                        double memory_cap_bytes);

namespace reference {
McEstimate mc_reference(const AdeProblem& problem, std::size_t samples, std::uint64_t seed);
}  // namespace reference

}  // namespace vmsgf
