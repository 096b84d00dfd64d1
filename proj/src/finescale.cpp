#include "vmsgf/finescale.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SparseLU>

#include "vmsgf/deterministic.hpp"
#include "vmsgf/error.hpp"

namespace vmsgf {

std::vector<double> element_x_grid(const Mesh1D& mesh, int points_per_element) {
  if (points_per_element < 1) throw ConfigError("need at least one grid point per element");
  std::vector<double> x;
  for (std::size_t e = 0; e < mesh.n_elements(); ++e) {
    for (int k = 0; k < points_per_element; ++k) {
      x.push_back(mesh.node(e) + mesh.h(e) * k / points_per_element);
    }
  }
  x.push_back(mesh.length());
  return x;
}

std::vector<double> uniform_xi_grid(int n) {
  if (n < 2) throw ConfigError("xi grid needs at least two points");
  std::vector<double> xi(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) xi[static_cast<std::size_t>(k)] = static_cast<double>(k) / (n - 1);
  return xi;
}

FieldGrid sample_field(const StochasticField& field, std::vector<double> x, std::vector<double> xi) {
  FieldGrid grid{std::move(x), std::move(xi), {}};
  const auto nx = static_cast<Eigen::Index>(grid.x.size());
  const auto nxi = static_cast<Eigen::Index>(grid.xi.size());
  grid.values.resize(nx, nxi);
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < nx; ++i) {
    for (Eigen::Index k = 0; k < nxi; ++k) {
      grid.values(i, k) = field(grid.x[static_cast<std::size_t>(i)], grid.xi[static_cast<std::size_t>(k)]);
    }
  }
  return grid;
}

StochasticKernel::StochasticKernel(double kappa, BetaMap map, double length)
    : kappa_(kappa), map_(map), length_(length) {}

double StochasticKernel::operator()(double x, double s, double xi) const {
  return GreensKernel(kappa_, map_(xi), 0.0, length_)(x, s);
}

Eigen::MatrixXd moment_matrix(const StochasticKernel& kernel, const Mesh1D& mesh, const GpcBasis& basis,
                              const QuadratureRule& rule) {
  const std::size_t nd = mesh.n_interior();
  const std::size_t ns = basis.size();
  const std::size_t nq = rule.size();
  // phi(k, m) * weight(k), evaluated once.
  Eigen::MatrixXd phi(static_cast<Eigen::Index>(nq), static_cast<Eigen::Index>(ns));
  std::vector<double> row(ns);
  for (std::size_t k = 0; k < nq; ++k) {
    const double xi = rule.nodes[k];
    basis.eval_all(std::span<const double>(&xi, 1), row);
    for (std::size_t m = 0; m < ns; ++m) phi(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m)) = row[m];
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(nd * ns), static_cast<Eigen::Index>(nd * ns));
  const auto pairs = static_cast<std::ptrdiff_t>(nd * nd);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t pp = 0; pp < pairs; ++pp) {
    const std::size_t j = static_cast<std::size_t>(pp) / nd;
    const std::size_t i = static_cast<std::size_t>(pp) % nd;
    Eigen::VectorXd wg(static_cast<Eigen::Index>(nq));
    for (std::size_t k = 0; k < nq; ++k) {
      wg(static_cast<Eigen::Index>(k)) =
          rule.weights[k] * kernel(mesh.node(j + 1), mesh.node(i + 1), rule.nodes[k]);
    }
    const Eigen::MatrixXd block = phi.transpose() * wg.asDiagonal() * phi;
    out.block(static_cast<Eigen::Index>(j * ns), static_cast<Eigen::Index>(i * ns),
              static_cast<Eigen::Index>(ns), static_cast<Eigen::Index>(ns)) = block;
  }
  return out;
}

namespace reference {

Eigen::MatrixXd moment_matrix(const StochasticKernel& kernel, const Mesh1D& mesh, const GpcBasis& basis,
                              const QuadratureRule& rule) {
  const std::size_t nd = mesh.n_interior();
  const std::size_t ns = basis.size();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nd * ns), static_cast<Eigen::Index>(nd * ns));
  for (std::size_t j = 0; j < nd; ++j) {
    for (std::size_t n = 0; n < ns; ++n) {
      for (std::size_t i = 0; i < nd; ++i) {
        for (std::size_t m = 0; m < ns; ++m) {
          double sum = 0.0;
          for (std::size_t k = 0; k < rule.size(); ++k) {
            const double xi = rule.nodes[k];
            const std::span<const double> pt(&xi, 1);
            sum += rule.weights[k] * basis.eval(n, pt) * kernel(mesh.node(j + 1), mesh.node(i + 1), xi) *
                   basis.eval(m, pt);
          }
          out(static_cast<Eigen::Index>(j * ns + n), static_cast<Eigen::Index>(i * ns + m)) = sum;
        }
      }
    }
  }
  return out;
}

}  // namespace reference

namespace {

const Region& single_region(const AdeProblem& problem) {
  if (problem.q() != 1 || problem.beta().regions().size() != 1) {
    throw ConfigError(
        "unsupported configuration: the fine-scale operator needs q = 1 and a single advection region");
  }
  return problem.beta().regions().front();
}

constexpr double kQuadratureAgreement = 1e-9;
constexpr int kMaxXiNodes = 1024;
constexpr double kMaxCondition = 1e12;

}  // namespace

FineScaleOperator::FineScaleOperator(const AdeProblem& problem, int xi_nodes)
    : basis_(problem.basis()),
      mesh_(problem.mesh()),
      kernel_(problem.kappa(), single_region(problem).map, problem.length()) {
  if (xi_nodes < 1) throw ConfigError("xi quadrature needs at least one node");
  int n = xi_nodes;
  Eigen::MatrixXd current = vmsgf::moment_matrix(kernel_, mesh_, basis_, gauss_legendre01(n));
  while (true) {
    const Eigen::MatrixXd finer = vmsgf::moment_matrix(kernel_, mesh_, basis_, gauss_legendre01(2 * n));
    const double scale = std::max(finer.cwiseAbs().maxCoeff(), 1e-300);
    discrepancy_ = (finer - current).cwiseAbs().maxCoeff() / scale;
    if (discrepancy_ <= kQuadratureAgreement) break;
    n *= 2;
    current = finer;
    if (n > kMaxXiNodes) {
      throw NumericalError("moment matrix quadrature did not settle (relative change " +
                           std::to_string(discrepancy_) + " at " + std::to_string(n) + " nodes)");
    }
  }
  rule_ = gauss_legendre01(n);
  moments_ = std::move(current);
  lu_.compute(moments_);
  const double rcond = lu_.rcond();
  condition_ = rcond > 0.0 ? 1.0 / rcond : INFINITY;
  if (!(condition_ <= kMaxCondition)) {
    throw NumericalError("moment matrix is ill-conditioned (condition estimate " + std::to_string(condition_) +
                         "); use a finer xi quadrature");
  }
}

void FineScaleOperator::check_source(const SourceSpec& source) const {
  if (!(source.x_s > 0.0 && source.x_s < mesh_.length())) {
    throw DomainError("source location must lie inside (0, L)");
  }
  if (source.profile.size() > basis_.size()) {
    throw ConfigError("source profile has " + std::to_string(source.profile.size()) +
                      " entries but the basis only " + std::to_string(basis_.size()));
  }
}

double FineScaleOperator::profile(const SourceSpec& source, double xi) const {
  double value = 0.0;
  for (std::size_t m = 0; m < source.profile.size(); ++m) {
    if (source.profile[m] != 0.0) value += source.profile[m] * legendre01(static_cast<int>(m), xi);
  }
  return value;
}

Eigen::VectorXd FineScaleOperator::source_moments(const SourceSpec& source) const {
  check_source(source);
  const std::size_t nd = mesh_.n_interior();
  const std::size_t ns = basis_.size();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nd * ns));
  std::vector<double> phi(ns);
  for (std::size_t k = 0; k < rule_.size(); ++k) {
    const double xi = rule_.nodes[k];
    basis_.eval_all(std::span<const double>(&xi, 1), phi);
    const double w = rule_.weights[k] * profile(source, xi);
    for (std::size_t j = 0; j < nd; ++j) {
      const double g = w * kernel_(mesh_.node(j + 1), source.x_s, xi);
      for (std::size_t n = 0; n < ns; ++n) out(static_cast<Eigen::Index>(j * ns + n)) += g * phi[n];
    }
  }
  return out;
}

Eigen::VectorXd FineScaleOperator::coarse_weights(const SourceSpec& source) const {
  return lu_.solve(source_moments(source));
}

StochasticField FineScaleOperator::greens(const SourceSpec& source) const {
  check_source(source);
  return [this, source](double x, double xi) { return kernel_(x, source.x_s, xi) * profile(source, xi); };
}

StochasticField FineScaleOperator::fine_greens(const SourceSpec& source) const {
  const Eigen::VectorXd y = coarse_weights(source);
  return [this, source, y](double x, double xi) {
    const std::size_t ns = basis_.size();
    std::vector<double> phi(ns);
    basis_.eval_all(std::span<const double>(&xi, 1), phi);
    double value = kernel_(x, source.x_s, xi) * profile(source, xi);
    for (std::size_t i = 0; i < mesh_.n_interior(); ++i) {
      double weight = 0.0;
      for (std::size_t m = 0; m < ns; ++m) weight += y(static_cast<Eigen::Index>(i * ns + m)) * phi[m];
      value -= kernel_(x, mesh_.node(i + 1), xi) * weight;
    }
    return value;
  };
}

Eigen::MatrixXd coarse_coefficients(const StochasticField& field, const std::vector<double>& x,
                                    const GpcBasis& basis, const QuadratureRule& rule) {
  if (basis.dimension() != 1) throw ConfigError("coarse coefficients of a field need q = 1");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(x.size()),
                                              static_cast<Eigen::Index>(basis.size()));
  std::vector<double> phi(basis.size());
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const double xi = rule.nodes[k];
    basis.eval_all(std::span<const double>(&xi, 1), phi);
    for (std::size_t r = 0; r < x.size(); ++r) {
      const double v = rule.weights[k] * field(x[r], xi);
      for (std::size_t m = 0; m < basis.size(); ++m) {
        out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(m)) += v * phi[m];
      }
    }
  }
  return out;
}

LocalityMetrics locality_metrics(const FieldGrid& grid, const StochasticField& field, const Mesh1D& mesh,
                                 double x_s, const GpcBasis& basis, const QuadratureRule& rule) {
  LocalityMetrics out;
  out.source_element = mesh.locate(x_s);
  const double left = mesh.node(out.source_element);
  const double right = mesh.node(out.source_element + 1);
  const double tol = 1e-12 * mesh.length();
  out.boundary_x[0] = left;
  out.boundary_x[1] = right;
  for (std::size_t i = 0; i < grid.x.size(); ++i) {
    const double x = grid.x[i];
    const double row_max = grid.values.row(static_cast<Eigen::Index>(i)).cwiseAbs().maxCoeff();
    if (x >= left - tol && x <= right + tol) {
      out.interior_max = std::max(out.interior_max, row_max);
    } else {
      out.exterior_max = std::max(out.exterior_max, row_max);
    }
    for (int b = 0; b < 2; ++b) {
      if (std::abs(x - out.boundary_x[b]) <= tol) out.boundary_max[b] = std::max(out.boundary_max[b], row_max);
    }
  }
  out.ratio = out.interior_max > 0.0 ? out.exterior_max / out.interior_max : 0.0;
  out.boundary_coeffs =
      coarse_coefficients(field, {left, right}, basis, rule).cwiseAbs();
  return out;
}

CoefficientField project_modewise(const std::function<double(double, std::span<const double>)>& v,
                                  const Mesh1D& mesh, const GpcBasis& basis,
                                  const StochasticQuadrature& quad) {
  CoefficientField out = CoefficientField::zero(basis, mesh);
  std::vector<double> phi(basis.size());
  for (std::size_t k = 0; k < quad.size(); ++k) {
    const auto xi = quad.node(k);
    basis.eval_all(xi, phi);
    for (std::size_t i = 0; i < mesh.n_interior(); ++i) {
      const double w = quad.weight(k) * v(mesh.node(i + 1), xi);
      for (std::size_t m = 0; m < basis.size(); ++m) {
        out.coeffs()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) += w * phi[m];
      }
    }
  }
  return out;
}

CoefficientField project_tensor(const std::function<double(double, std::span<const double>)>& v,
                                const Mesh1D& mesh, const GpcBasis& basis,
                                const StochasticQuadrature& quad) {
  const std::size_t nd = mesh.n_interior();
  const std::size_t ns = basis.size();
  const Eigen::MatrixXd gram = weighted_gram(basis, [](std::span<const double>) { return 1.0; }, quad);

  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t i = 0; i < nd; ++i) {
    const double hl = mesh.h(i);
    const double hr = mesh.h(i + 1);
    const double stiff[3] = {-1.0 / hl, 1.0 / hl + 1.0 / hr, -1.0 / hr};
    for (int off = -1; off <= 1; ++off) {
      if ((off == -1 && i == 0) || (off == 1 && i + 1 == nd)) continue;
      const std::size_t j = i + static_cast<std::size_t>(off + 1) - 1;
      for (std::size_t m = 0; m < ns; ++m) {
        for (std::size_t n = 0; n < ns; ++n) {
          const double g = gram(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
          if (g == 0.0) continue;
          triplets.emplace_back(static_cast<int>(i * ns + m), static_cast<int>(j * ns + n), stiff[off + 1] * g);
        }
      }
    }
  }
  Eigen::SparseMatrix<double> a(static_cast<Eigen::Index>(nd * ns), static_cast<Eigen::Index>(nd * ns));
  a.setFromTriplets(triplets.begin(), triplets.end());

  // int v' phi_i' over the two elements adjacent to mesh node i + 1.
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nd * ns));
  std::vector<double> phi(ns);
  std::vector<double> values(mesh.nodes().size());
  for (std::size_t k = 0; k < quad.size(); ++k) {
    const auto xi = quad.node(k);
    basis.eval_all(xi, phi);
    for (std::size_t node = 0; node < values.size(); ++node) values[node] = v(mesh.node(node), xi);
    for (std::size_t i = 0; i < nd; ++i) {
      const double d = (values[i + 1] - values[i]) / mesh.h(i) - (values[i + 2] - values[i + 1]) / mesh.h(i + 1);
      const double w = quad.weight(k) * d;
      for (std::size_t m = 0; m < ns; ++m) b(static_cast<Eigen::Index>(i * ns + m)) += w * phi[m];
    }
  }
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(a);
  if (lu.info() != Eigen::Success) throw SolverError("tensor projection system is singular");
  const Eigen::VectorXd c = lu.solve(b);
  CoefficientField out = CoefficientField::zero(basis, mesh);
  for (std::size_t i = 0; i < nd; ++i) {
    for (std::size_t m = 0; m < ns; ++m) {
      out.coeffs()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) = c(static_cast<Eigen::Index>(i * ns + m));
    }
  }
  return out;
}

}  // namespace vmsgf
