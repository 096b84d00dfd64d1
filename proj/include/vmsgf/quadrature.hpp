#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "vmsgf/gpc_basis.hpp"

namespace vmsgf {

/// One-dimensional rule on (0,1); weights sum to 1.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule mapped to (0,1), exact for degree 2n-1.
QuadratureRule gauss_legendre01(int n);

/// Gauss nodes per coordinate needed to integrate Phi_m * w * Phi_n exactly
/// for |m|,|n| <= p and a polynomial weight of the given degree, plus two
/// safety nodes.
int default_node_count(int p, int weight_degree);

/// Expectation operator over (0,1)^q realized by a tensor-product Gauss rule.
class StochasticQuadrature {
 public:
  StochasticQuadrature(int dimension, std::vector<double> nodes,
                       std::vector<double> weights);

  /// Tensor product of an n-point Gauss rule in every coordinate.
  static StochasticQuadrature tensor(int dimension, int nodes_per_coordinate);

  int dimension() const { return dimension_; }
  std::size_t size() const { return weights_.size(); }
  std::span<const double> node(std::size_t j) const {
    return {nodes_.data() + j * static_cast<std::size_t>(dimension_),
            static_cast<std::size_t>(dimension_)};
  }
  double weight(std::size_t j) const { return weights_[j]; }

 private:
  int dimension_;
  std::vector<double> nodes_;  // row-major, size() x dimension
  std::vector<double> weights_;
};

using StochasticFunction = std::function<double(std::span<const double>)>;

/// Sum of w_j f(xi_j) accumulated in node order.
double expectation(const StochasticQuadrature& quad, const StochasticFunction& integrand);

/// Matrix of E[Phi_m w Phi_n] over the basis. Throws NumericalError naming the
/// node when w is not finite there.
Eigen::MatrixXd weighted_gram(const GpcBasis& basis, const StochasticFunction& weight,
                              const StochasticQuadrature& quad);

/// (p+1)x(p+1) matrix of E[phi_a w phi_b] for a weight depending on a single
/// uniform coordinate.
Eigen::MatrixXd univariate_weighted_gram(int p, const std::function<double(double)>& weight,
                                         const QuadratureRule& rule);

/// Vector of E[phi_a w], a = 0..p.
Eigen::VectorXd univariate_weighted_moments(int p, const std::function<double(double)>& weight,
                                            const QuadratureRule& rule);

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over [a,b] to
/// absolute tolerance abs_tol or relative tolerance rel_tol.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol = 1e-14, double rel_tol = 1e-13,
                          int max_intervals = 20000);

}  // namespace vmsgf
