#include "vmsgf/sgfem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vmsgf/deterministic.hpp"
#include "vmsgf/error.hpp"
#include "vmsgf/quadrature.hpp"

namespace vmsgf {

std::string to_string(Method method) { return method == Method::galerkin ? "galerkin" : "vms"; }

Method parse_method(const std::string& text) {
  if (text == "galerkin") return Method::galerkin;
  if (text == "vms") return Method::vms;
  throw ConfigError("unknown method '" + text + "' (expected galerkin or vms)");
}

// ---------------------------------------------------------------------------
// CoefficientField

CoefficientField::CoefficientField(GpcBasis basis, Mesh1D mesh, Eigen::MatrixXd coeffs)
    : basis_(std::move(basis)), mesh_(std::move(mesh)), coeffs_(std::move(coeffs)) {
  if (static_cast<std::size_t>(coeffs_.rows()) != mesh_.n_interior() ||
      static_cast<std::size_t>(coeffs_.cols()) != basis_.size()) {
    throw ConfigError("coefficient array must be n_interior x basis size");
  }
}

CoefficientField CoefficientField::zero(GpcBasis basis, Mesh1D mesh) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(mesh.n_interior()),
                                            static_cast<Eigen::Index>(basis.size()));
  return CoefficientField(std::move(basis), std::move(mesh), std::move(c));
}

std::vector<double> CoefficientField::mean() const {
  std::vector<double> out(n_nodes());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = coeff(i, 0);
  return out;
}

std::vector<double> CoefficientField::variance() const {
  std::vector<double> out(n_nodes(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t m = 1; m < n_modes(); ++m) out[i] += coeff(i, m) * coeff(i, m);
  }
  return out;
}

Eigen::VectorXd CoefficientField::modes_at(double x) const {
  const std::size_t e = mesh_.locate(x);
  const double t = (x - mesh_.node(e)) / mesh_.h(e);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(coeffs_.cols());
  if (e > 0) out += (1.0 - t) * coeffs_.row(static_cast<Eigen::Index>(e - 1)).transpose();
  if (e + 1 < mesh_.n_elements()) out += t * coeffs_.row(static_cast<Eigen::Index>(e)).transpose();
  return out;
}

double CoefficientField::evaluate(double x, std::span<const double> xi) const {
  const std::vector<double> phi = basis_.eval_all(xi);
  const Eigen::VectorXd modes = modes_at(x);
  double value = 0.0;
  for (Eigen::Index m = 0; m < modes.size(); ++m) value += modes(m) * phi[static_cast<std::size_t>(m)];
  return value;
}

std::vector<double> CoefficientField::realization(std::span<const double> xi) const {
  const std::vector<double> phi = basis_.eval_all(xi);
  const Eigen::Map<const Eigen::VectorXd> phi_vec(phi.data(), static_cast<Eigen::Index>(phi.size()));
  const Eigen::VectorXd values = coeffs_ * phi_vec;
  return {values.data(), values.data() + values.size()};
}

// ---------------------------------------------------------------------------
// Assembly

int assembly_node_count(int p, const BetaMap& map) {
  return std::max(default_node_count(p, 2 * map.polynomial_degree()), p + 6);
}

ElementStochasticFactors element_factors(const AdeProblem& problem, std::size_t element,
                                         Method method) {
  const Region& region = problem.element_region(element);
  const int p = problem.basis().order();
  const QuadratureRule rule = gauss_legendre01(assembly_node_count(p, region.map));
  const double h = problem.mesh().h(element);
  const double kappa = problem.kappa();
  const double f = problem.source();
  const BetaMap map = region.map;

  ElementStochasticFactors out;
  out.coordinate = region.coordinate - 1;
  out.beta = univariate_weighted_gram(p, map, rule);
  if (method == Method::vms) {
    auto stabilization_tau = [&](double xi) {
      const double beta = map(xi);
      if (!(beta > 0.0)) {
        throw NumericalError("stabilization parameter undefined (beta = " + std::to_string(beta) +
                             " <= 0) in element " + std::to_string(element));
      }
      return tau(h, beta, kappa);
    };
    out.tau_beta2 = univariate_weighted_gram(
        p, [&](double xi) { const double b = map(xi); return stabilization_tau(xi) * b * b; }, rule);
    out.tau_beta_f = univariate_weighted_moments(
        p, [&](double xi) { return stabilization_tau(xi) * map(xi) * f; }, rule);
  } else {
    out.tau_beta2 = Eigen::MatrixXd::Zero(p + 1, p + 1);
    out.tau_beta_f = Eigen::VectorXd::Zero(p + 1);
  }
  return out;
}

namespace {

struct Coupling {
  std::size_t col_rank;
  int row_degree;  // entry of the row index in the active coordinate
  int col_degree;
};

// For active coordinate c, the modes n coupled to row mode m are those equal to
// m in every other coordinate.
std::vector<std::vector<Coupling>> coupling_pattern(const GpcBasis& basis, int c) {
  std::vector<std::vector<Coupling>> pattern(basis.size());
  for (std::size_t r = 0; r < basis.size(); ++r) {
    const MultiIndex& m = basis.index(r);
    const int rest = m.total_order() - m[static_cast<std::size_t>(c)];
    std::vector<int> entries = m.entries();
    for (int d = 0; d + rest <= basis.order(); ++d) {
      entries[static_cast<std::size_t>(c)] = d;
      pattern[r].push_back({basis.rank_of(MultiIndex(entries)), m[static_cast<std::size_t>(c)], d});
    }
  }
  return pattern;
}

// Ranks of d * e_c for d = 0..p.
std::vector<std::size_t> pure_ranks(const GpcBasis& basis, int c) {
  std::vector<std::size_t> out;
  std::vector<int> entries(static_cast<std::size_t>(basis.dimension()), 0);
  for (int d = 0; d <= basis.order(); ++d) {
    entries[static_cast<std::size_t>(c)] = d;
    out.push_back(basis.rank_of(MultiIndex(entries)));
  }
  return out;
}

}  // namespace

CoupledSystem assemble(const AdeProblem& problem, Method method) {
  const GpcBasis& basis = problem.basis();
  const Mesh1D& mesh = problem.mesh();
  const std::size_t ns = basis.size();
  const std::size_t n_el = mesh.n_elements();
  const std::size_t unknowns = mesh.n_interior() * ns;
  const double kappa = problem.kappa();
  const double f = problem.source();

  std::vector<std::vector<std::vector<Coupling>>> patterns(static_cast<std::size_t>(basis.dimension()));
  std::vector<std::vector<std::size_t>> pure(static_cast<std::size_t>(basis.dimension()));
  for (const Region& r : problem.beta().regions()) {
    const auto c = static_cast<std::size_t>(r.coordinate - 1);
    if (patterns[c].empty()) {
      patterns[c] = coupling_pattern(basis, r.coordinate - 1);
      pure[c] = pure_ranks(basis, r.coordinate - 1);
    }
  }

  std::vector<std::vector<Eigen::Triplet<double>>> element_triplets(n_el);
  std::vector<ElementStochasticFactors> factors(n_el);
  bool failed = false;
  std::string failure;

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t ee = 0; ee < static_cast<std::ptrdiff_t>(n_el); ++ee) {
    const auto e = static_cast<std::size_t>(ee);
    try {
      factors[e] = element_factors(problem, e, method);
      const ElementStochasticFactors& fac = factors[e];
      const double h = mesh.h(e);
      // Unit-coefficient element matrices; beta and tau enter via the factors.
      const ElementMatrices unit = local_matrices(h, kappa, 1.0, 1.0, 0.0);
      const auto& pattern = patterns[static_cast<std::size_t>(fac.coordinate)];
      auto& trip = element_triplets[e];
      for (int a = 0; a < 2; ++a) {
        const std::size_t row_node = e + static_cast<std::size_t>(a);
        if (row_node == 0 || row_node == n_el) continue;
        for (int b = 0; b < 2; ++b) {
          const std::size_t col_node = e + static_cast<std::size_t>(b);
          if (col_node == 0 || col_node == n_el) continue;
          const double adv = unit.advection[a][b];
          const double stab = unit.stabilization[a][b];
          const double diff = unit.diffusion[a][b];
          for (std::size_t n = 0; n < ns; ++n) {
            const std::size_t row = (row_node - 1) * ns + n;
            for (const Coupling& cpl : pattern[n]) {
              double v = adv * fac.beta(cpl.row_degree, cpl.col_degree) +
                         stab * fac.tau_beta2(cpl.row_degree, cpl.col_degree);
              if (cpl.col_rank == n) v += diff;
              trip.emplace_back(static_cast<int>(row),
                                static_cast<int>((col_node - 1) * ns + cpl.col_rank), v);
            }
          }
        }
      }
    } catch (const std::exception& ex) {
#pragma omp critical
      {
        if (!failed) {
          failed = true;
          failure = ex.what();
        }
      }
    }
  }
  if (failed) throw NumericalError("assembly failed: " + failure);

  std::size_t total = 0;
  for (const auto& t : element_triplets) total += t.size();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(total);
  for (auto& t : element_triplets) {
    triplets.insert(triplets.end(), t.begin(), t.end());
    std::vector<Eigen::Triplet<double>>().swap(t);
  }

  CoupledSystem system{SparseMatrix(static_cast<Eigen::Index>(unknowns), static_cast<Eigen::Index>(unknowns)),
                       Eigen::VectorXd::Zero(static_cast<Eigen::Index>(unknowns)), basis, mesh};
  system.matrix.setFromTriplets(triplets.begin(), triplets.end());

  // Load vector, serial in element order.
  for (std::size_t e = 0; e < n_el; ++e) {
    const ElementStochasticFactors& fac = factors[e];
    const double h = mesh.h(e);
    const auto& pure_c = pure[static_cast<std::size_t>(fac.coordinate)];
    for (int a = 0; a < 2; ++a) {
      const std::size_t node = e + static_cast<std::size_t>(a);
      if (node == 0 || node == n_el) continue;
      const std::size_t base = (node - 1) * ns;
      system.rhs(static_cast<Eigen::Index>(base)) += 0.5 * f * h;
      const double sign = a == 0 ? -1.0 : 1.0;
      for (std::size_t d = 0; d < pure_c.size(); ++d) {
        system.rhs(static_cast<Eigen::Index>(base + pure_c[d])) +=
            sign * fac.tau_beta_f(static_cast<Eigen::Index>(d));
      }
    }
  }
  return system;
}

}  // namespace vmsgf
