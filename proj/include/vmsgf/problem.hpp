#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vmsgf/gpc_basis.hpp"
#include "vmsgf/mesh.hpp"

namespace vmsgf {

/// Dependence of the advection speed on its active random coordinate.
struct BetaMap {
  enum class Kind { one_plus_xi_squared, constant };

  Kind kind = Kind::one_plus_xi_squared;
  double value = 0.0;  // only used by Kind::constant

  static BetaMap one_plus_xi_squared() { return {}; }
  static BetaMap constant(double v) { return {Kind::constant, v}; }
  /// Parses "one_plus_xi_squared" or "constant:<value>".
  static BetaMap parse(const std::string& text);

  double operator()(double xi) const {
    return kind == Kind::constant ? value : 1.0 + xi * xi;
  }
  int polynomial_degree() const { return kind == Kind::constant ? 0 : 2; }
  bool is_constant() const { return kind == Kind::constant; }
  std::string name() const;
};

/// beta(x, xi) = map(xi_coordinate) for x in [x_min, x_max).
struct Region {
  double x_min = 0.0;
  double x_max = 0.0;
  int coordinate = 1;  // 1-based random coordinate
  BetaMap map;
};

/// Piecewise advection field whose pieces each depend on one coordinate.
class BetaField {
 public:
  BetaField(std::vector<Region> regions, double length, int q);

  const std::vector<Region>& regions() const { return regions_; }
  std::size_t region_index_at(double x) const;
  double value(double x, std::span<const double> xi) const;

 private:
  std::vector<Region> regions_;
  double length_;
};

/// Element -> region table; ConfigError when an element straddles a region
/// boundary.
std::vector<std::size_t> element_regions(const BetaField& field, const Mesh1D& mesh);

/// -kappa u'' + beta(x, xi) u' = f on (0, L), u(0) = u(L) = 0, f a
/// deterministic constant.
class AdeProblem {
 public:
  AdeProblem(double kappa, double f, BetaField beta, GpcBasis basis, Mesh1D mesh);

  double length() const { return mesh_.length(); }
  double kappa() const { return kappa_; }
  double source() const { return f_; }
  const BetaField& beta() const { return beta_; }
  const GpcBasis& basis() const { return basis_; }
  const Mesh1D& mesh() const { return mesh_; }
  int q() const { return basis_.dimension(); }

  double beta_at(double x, std::span<const double> xi) const;
  const Region& element_region(std::size_t element) const;
  std::size_t element_region_index(std::size_t element) const { return element_region_[element]; }

  /// Same physics on another discretization.
  AdeProblem with_discretization(const Mesh1D& mesh, int p) const;
  AdeProblem with_source(double f) const;

 private:
  double kappa_;
  double f_;
  BetaField beta_;
  GpcBasis basis_;
  Mesh1D mesh_;
  std::vector<std::size_t> element_region_;
};

/// Five-region style field: `count` equal regions on [0, L], region k driven by
/// coordinate k with beta = 1 + xi_k^2.
std::vector<Region> equal_regions(double length, int count);

}  // namespace vmsgf
