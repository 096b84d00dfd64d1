#pragma once

#include <span>
#include <vector>

#include "vmsgf/mesh.hpp"
#include "vmsgf/problem.hpp"

namespace vmsgf {

/// Green's function of -kappa g'' + beta g' = delta(x - s) on (a, b) with
/// g(a, s) = g(b, s) = 0.
///
/// Built from the homogeneous solutions {1, exp(beta x / kappa)}; every
/// exponential is evaluated with a non-positive argument, so the kernel is
/// finite for any cell Peclet number. Negative beta is handled by reflecting
/// the interval. Restricted to a single element this is the element Green's
/// function.
class GreensKernel {
 public:
  GreensKernel(double kappa, double beta, double a, double b);

  /// g(x, s). Returns 0 when x or s is on the boundary; DomainError outside
  /// [a, b].
  double operator()(double x, double s) const;

  double kappa() const { return kappa_; }
  double beta() const { return beta_; }
  double left() const { return a_; }
  double right() const { return b_; }

 private:
  double eval_positive(double x, double s) const;

  double kappa_;
  double beta_;
  double a_;
  double b_;
};

/// Closed-form solution of -kappa u'' + beta u' = f, u(0) = u(L) = 0.
double exact_solution(double kappa, double beta, double f, double length, double x);

/// Stabilization parameter (h / 2 beta)(coth Pe - 1/Pe), Pe = h beta / (2 kappa).
/// Small Pe uses the Langevin-function series. Requires h, beta, kappa > 0.
double tau(double h, double beta, double kappa);

/// (1/h) times the double integral of the element Green's function over the
/// element, by adaptive quadrature.
double tau_by_quadrature(double h, double beta, double kappa);

/// Mesh Peclet number h beta / (2 kappa).
inline double peclet(double h, double beta, double kappa) { return h * beta / (2.0 * kappa); }

/// Tridiagonal solve with partial pivoting. `lower` and `upper` have n-1
/// entries. Throws SolverError on an exactly singular pivot.
std::vector<double> solve_tridiagonal(std::vector<double> lower, std::vector<double> diag,
                                      std::vector<double> upper, std::vector<double> rhs);

/// Linear-FEM solve of the deterministic problem frozen at xi. With
/// `stabilized` each element gets the SUPG term with tau(h, beta_e, kappa).
/// Returns the interior nodal values.
std::vector<double> solve_realization(const AdeProblem& problem, std::span<const double> xi,
                                      bool stabilized);
std::vector<double> solve_realization(const AdeProblem& problem, std::span<const double> xi,
                                      bool stabilized, const Mesh1D& mesh);

}  // namespace vmsgf
