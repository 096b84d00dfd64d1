#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace vmsgf {

/// Strictly increasing nodes 0 = x_0 < ... < x_{n_el} = L. Element e spans
/// [x_e, x_{e+1}] (0-based). Unknowns live on the n_el - 1 interior nodes;
/// interior unknown i sits on mesh node i + 1.
class Mesh1D {
 public:
  explicit Mesh1D(std::vector<double> nodes);
  static Mesh1D uniform(double length, int n_elements);

  std::size_t n_elements() const { return nodes_.size() - 1; }
  std::size_t n_interior() const { return nodes_.size() - 2; }
  double length() const { return nodes_.back(); }
  double node(std::size_t k) const { return nodes_[k]; }
  const std::vector<double>& nodes() const { return nodes_; }
  double h(std::size_t element) const { return nodes_[element + 1] - nodes_[element]; }

  /// Element containing x; the right end maps to the last element and interior
  /// nodes to the element on their right. DomainError outside [0, L].
  std::size_t locate(double x) const;

  /// Hat function of mesh node k (boundary nodes included) at x.
  double hat(std::size_t k, double x) const;

  /// Piecewise-linear interpolation of interior nodal values (zero at both
  /// boundaries).
  double interpolate(const std::vector<double>& interior_values, double x) const;

 private:
  std::vector<double> nodes_;
};

using Matrix2 = std::array<std::array<double, 2>, 2>;

/// Element matrices for linear elements; rows are test functions, columns
/// trial functions, local node 0 on the left.
struct ElementMatrices {
  Matrix2 diffusion;      // kappa * int w' u'
  Matrix2 advection;      // int beta u' w
  Matrix2 stabilization;  // tau * beta^2 * int u' w'
  std::array<double, 2> load;             // int f w
  std::array<double, 2> stabilization_load;  // tau * beta * f * int w'
};

ElementMatrices local_matrices(double h, double kappa, double beta, double tau, double f);

}  // namespace vmsgf
