#include "vmsgf/mesh.hpp"

#include <algorithm>
#include <string>

#include "vmsgf/error.hpp"

namespace vmsgf {

Mesh1D::Mesh1D(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 3) throw ConfigError("mesh needs at least 2 elements");
  if (nodes_.front() != 0.0) throw ConfigError("mesh must start at x = 0");
  for (std::size_t k = 1; k < nodes_.size(); ++k) {
    if (!(nodes_[k] > nodes_[k - 1])) {
      throw ConfigError("mesh nodes must be strictly increasing (node " + std::to_string(k) + ")");
    }
  }
}

Mesh1D Mesh1D::uniform(double length, int n_elements) {
  if (n_elements < 2) throw ConfigError("n_el must be >= 2, got " + std::to_string(n_elements));
  if (!(length > 0.0)) throw ConfigError("domain length must be positive");
  std::vector<double> nodes(static_cast<std::size_t>(n_elements) + 1);
  for (int i = 0; i <= n_elements; ++i) nodes[static_cast<std::size_t>(i)] = i * length / n_elements;
  nodes.back() = length;
  return Mesh1D(std::move(nodes));
}

std::size_t Mesh1D::locate(double x) const {
  if (!(x >= 0.0 && x <= nodes_.back())) {
    throw DomainError("x = " + std::to_string(x) + " outside the mesh");
  }
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  const auto k = static_cast<std::size_t>(it - nodes_.begin());
  return std::min(k == 0 ? 0 : k - 1, n_elements() - 1);
}

double Mesh1D::hat(std::size_t k, double x) const {
  if (x < 0.0 || x > nodes_.back()) return 0.0;
  const double xk = nodes_[k];
  if (x == xk) return 1.0;
  if (x < xk) {
    if (k == 0) return 0.0;
    const double xl = nodes_[k - 1];
    return x > xl ? (x - xl) / (xk - xl) : 0.0;
  }
  if (k + 1 >= nodes_.size()) return 0.0;
  const double xr = nodes_[k + 1];
  return x < xr ? (xr - x) / (xr - xk) : 0.0;
}

double Mesh1D::interpolate(const std::vector<double>& interior_values, double x) const {
  const std::size_t e = locate(x);
  const double left = e == 0 ? 0.0 : interior_values[e - 1];
  const double right = e + 1 == n_elements() ? 0.0 : interior_values[e];
  const double t = (x - nodes_[e]) / h(e);
  return (1.0 - t) * left + t * right;
}

ElementMatrices local_matrices(double h, double kappa, double beta, double tau, double f) {
  ElementMatrices m{};
  const double d = kappa / h;
  m.diffusion = {{{d, -d}, {-d, d}}};
  const double a = 0.5 * beta;
  m.advection = {{{-a, a}, {-a, a}}};
  const double s = tau * beta * beta / h;
  m.stabilization = {{{s, -s}, {-s, s}}};
  m.load = {0.5 * f * h, 0.5 * f * h};
  m.stabilization_load = {-tau * beta * f, tau * beta * f};
  return m;
}

}  // namespace vmsgf
