#include "vmsgf/problem.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "vmsgf/error.hpp"

namespace vmsgf {

BetaMap BetaMap::parse(const std::string& text) {
  if (text == "one_plus_xi_squared") return one_plus_xi_squared();
  const std::string prefix = "constant:";
  if (text.rfind(prefix, 0) == 0) {
    std::size_t used = 0;
    const std::string number = text.substr(prefix.size());
    double v = 0.0;
    try {
      v = std::stod(number, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != number.size() || !std::isfinite(v)) {
      throw ConfigError("bad constant beta map '" + text + "'");
    }
    return constant(v);
  }
  throw ConfigError("unknown beta map '" + text +
                    "' (expected one_plus_xi_squared or constant:<value>)");
}

std::string BetaMap::name() const {
  if (kind == Kind::one_plus_xi_squared) return "one_plus_xi_squared";
  char buf[64];
  std::snprintf(buf, sizeof buf, "constant:%.17g", value);
  return buf;
}

BetaField::BetaField(std::vector<Region> regions, double length, int q)
    : regions_(std::move(regions)), length_(length) {
  if (regions_.empty()) throw ConfigError("advection field needs at least one region");
  const double tol = 1e-14 * length;
  if (std::abs(regions_.front().x_min) > tol) throw ConfigError("first region must start at x = 0");
  if (std::abs(regions_.back().x_max - length) > tol) {
    throw ConfigError("last region must end at x = L");
  }
  for (std::size_t k = 0; k < regions_.size(); ++k) {
    const Region& r = regions_[k];
    const std::string tag = "region " + std::to_string(k + 1);
    if (!(r.x_max > r.x_min)) throw ConfigError(tag + " has non-positive width");
    if (k > 0 && std::abs(r.x_min - regions_[k - 1].x_max) > tol) {
      throw ConfigError(tag + " leaves a gap or overlaps the previous region");
    }
    if (r.coordinate < 1 || r.coordinate > q) {
      throw ConfigError(tag + " references coordinate " + std::to_string(r.coordinate) +
                        " outside [1, " + std::to_string(q) + "]");
    }
    if (r.map.is_constant() && !std::isfinite(r.map.value)) {
      throw ConfigError(tag + " has a non-finite constant beta");
    }
  }
}

std::size_t BetaField::region_index_at(double x) const {
  if (!(x >= 0.0 && x <= length_)) {
    throw DomainError("x = " + std::to_string(x) + " outside the domain [0, L]");
  }
  for (std::size_t k = 0; k + 1 < regions_.size(); ++k) {
    if (x < regions_[k].x_max) return k;
  }
  return regions_.size() - 1;
}

double BetaField::value(double x, std::span<const double> xi) const {
  const Region& r = regions_[region_index_at(x)];
  return r.map(xi[static_cast<std::size_t>(r.coordinate - 1)]);
}

std::vector<std::size_t> element_regions(const BetaField& field, const Mesh1D& mesh) {
  const auto& regions = field.regions();
  // Every interior region boundary must coincide with a mesh node.
  const double tol = 1e-12 * mesh.length();
  for (std::size_t k = 0; k + 1 < regions.size(); ++k) {
    const double xb = regions[k].x_max;
    const std::size_t e = mesh.locate(xb);
    const bool aligned = std::abs(mesh.node(e) - xb) <= tol || std::abs(mesh.node(e + 1) - xb) <= tol;
    if (!aligned) {
      throw ConfigError("region boundary x = " + std::to_string(xb) +
                        " does not coincide with a mesh node");
    }
  }
  std::vector<std::size_t> table(mesh.n_elements());
  for (std::size_t e = 0; e < mesh.n_elements(); ++e) {
    table[e] = field.region_index_at(0.5 * (mesh.node(e) + mesh.node(e + 1)));
  }
  return table;
}

AdeProblem::AdeProblem(double kappa, double f, BetaField beta, GpcBasis basis, Mesh1D mesh)
    : kappa_(kappa), f_(f), beta_(std::move(beta)), basis_(std::move(basis)), mesh_(std::move(mesh)) {
  if (!(kappa_ > 0.0) || !std::isfinite(kappa_)) throw ConfigError("kappa must be positive");
  if (!std::isfinite(f_)) throw ConfigError("source f must be finite");
  for (const Region& r : beta_.regions()) {
    if (r.coordinate > basis_.dimension()) {
      throw ConfigError("region coordinate exceeds the stochastic dimension of the basis");
    }
  }
  if (std::abs(beta_.regions().back().x_max - mesh_.length()) > 1e-14 * mesh_.length()) {
    throw ConfigError("advection field and mesh cover different domains");
  }
  element_region_ = element_regions(beta_, mesh_);
}

double AdeProblem::beta_at(double x, std::span<const double> xi) const {
  if (xi.size() != static_cast<std::size_t>(q())) throw DomainError("xi has wrong dimension");
  return beta_.value(x, xi);
}

const Region& AdeProblem::element_region(std::size_t element) const {
  if (element >= element_region_.size()) throw DomainError("element index out of range");
  return beta_.regions()[element_region_[element]];
}

AdeProblem AdeProblem::with_discretization(const Mesh1D& mesh, int p) const {
  return AdeProblem(kappa_, f_, beta_, GpcBasis(basis_.dimension(), p), mesh);
}

AdeProblem AdeProblem::with_source(double f) const {
  return AdeProblem(kappa_, f, beta_, basis_, mesh_);
}

std::vector<Region> equal_regions(double length, int count) {
  if (count < 1) throw ConfigError("region count must be >= 1");
  std::vector<Region> regions;
  for (int k = 0; k < count; ++k) {
    Region r;
    r.x_min = k * length / count;
    r.x_max = (k + 1) * length / count;
    r.coordinate = k + 1;
    regions.push_back(r);
  }
  regions.back().x_max = length;
  return regions;
}

}  // namespace vmsgf
