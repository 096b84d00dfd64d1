#include "vmsgf/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <random>
#include <sstream>

#include "vmsgf/deterministic.hpp"
#include "vmsgf/error.hpp"
#include "vmsgf/quadrature.hpp"

namespace vmsgf {

namespace {

void require_compatible(const CoefficientField& a, const CoefficientField& b) {
  const double la = a.mesh().length();
  const double lb = b.mesh().length();
  if (std::abs(la - lb) > 1e-12 * std::max(la, lb)) {
    throw ConfigError("fields live on different domains");
  }
  if (a.basis().dimension() != b.basis().dimension()) {
    throw ConfigError("fields have different stochastic dimensions");
  }
}

std::vector<double> merged_nodes(const Mesh1D& a, const Mesh1D& b) {
  std::vector<double> all(a.nodes());
  all.insert(all.end(), b.nodes().begin(), b.nodes().end());
  std::sort(all.begin(), all.end());
  const double tol = 1e-12 * a.length();
  std::vector<double> out;
  for (double x : all) {
    if (out.empty() || x - out.back() > tol) out.push_back(x);
  }
  out.back() = std::min(out.back(), a.length());
  return out;
}

// Coefficients of `field` at x, listed in the rank order of `basis`.
Eigen::VectorXd modes_in(const CoefficientField& field, double x, const GpcBasis& basis) {
  const Eigen::VectorXd own = field.modes_at(x);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t r = 0; r < basis.size(); ++r) {
    const MultiIndex& idx = basis.index(r);
    if (field.basis().contains(idx)) {
      out(static_cast<Eigen::Index>(r)) = own(static_cast<Eigen::Index>(field.basis().rank_of(idx)));
    }
  }
  return out;
}

}  // namespace

double v_norm(const CoefficientField& a, const CoefficientField& b) {
  require_compatible(a, b);
  const GpcBasis& big = a.basis().size() >= b.basis().size() ? a.basis() : b.basis();
  const std::vector<double> nodes = merged_nodes(a.mesh(), b.mesh());
  double sum = 0.0;
  Eigen::VectorXd prev = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(big.size()));
  for (std::size_t k = 1; k < nodes.size(); ++k) {
    const Eigen::VectorXd cur = modes_in(a, nodes[k], big) - modes_in(b, nodes[k], big);
    const double dx = nodes[k] - nodes[k - 1];
    sum += (cur - prev).squaredNorm() / dx;
    prev = cur;
  }
  return std::sqrt(sum);
}

Eigen::MatrixXd restrict_coefficients(const CoefficientField& fine, const Mesh1D& mesh,
                                      const GpcBasis& basis) {
  if (basis.dimension() != fine.basis().dimension()) {
    throw ConfigError("cannot restrict to a basis of another dimension");
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(mesh.n_interior()), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < mesh.n_interior(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = modes_in(fine, mesh.node(i + 1), basis).transpose();
  }
  return out;
}

NodalStatistics nodal_statistics(const CoefficientField& field, const Mesh1D& mesh) {
  NodalStatistics out;
  for (std::size_t i = 0; i < mesh.n_interior(); ++i) {
    const double x = mesh.node(i + 1);
    const Eigen::VectorXd modes = field.modes_at(x);
    out.x.push_back(x);
    out.mean.push_back(modes(0));
    out.variance.push_back(modes.tail(modes.size() - 1).squaredNorm());
  }
  return out;
}

CoefficientErrors coefficient_errors(const CoefficientField& field, const Eigen::MatrixXd& reference) {
  if (reference.rows() != field.coeffs().rows() || reference.cols() != field.coeffs().cols()) {
    throw ConfigError("reference coefficients have the wrong shape");
  }
  CoefficientErrors out;
  out.per_order_max.assign(static_cast<std::size_t>(field.basis().order()) + 1, 0.0);
  for (std::size_t i = 0; i < field.n_nodes(); ++i) {
    for (std::size_t m = 0; m < field.n_modes(); ++m) {
      CoefficientErrorRow row;
      row.node = i;
      row.x = field.mesh().node(i + 1);
      row.rank = m;
      row.order = field.basis().index(m).total_order();
      row.error = std::abs(field.coeff(i, m) -
                           reference(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)));
      auto& slot = out.per_order_max[static_cast<std::size_t>(row.order)];
      slot = std::max(slot, row.error);
      out.max = std::max(out.max, row.error);
      out.rows.push_back(row);
    }
  }
  return out;
}

namespace {

BetaMap uniform_single_map(const AdeProblem& problem) {
  const auto& regions = problem.beta().regions();
  if (problem.q() != 1) throw ConfigError("the closed-form reference needs q = 1");
  for (const Region& r : regions) {
    if (r.map.kind != regions.front().map.kind || r.map.value != regions.front().map.value) {
      throw ConfigError("the closed-form reference needs the same advection map in every region");
    }
  }
  return regions.front().map;
}

}  // namespace

Eigen::MatrixXd analytic_coefficients(const AdeProblem& problem, int xi_nodes) {
  const BetaMap map = uniform_single_map(problem);
  const GpcBasis& basis = problem.basis();
  const Mesh1D& mesh = problem.mesh();
  const QuadratureRule rule = gauss_legendre01(xi_nodes);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(mesh.n_interior()),
                                              static_cast<Eigen::Index>(basis.size()));
  std::vector<double> phi(basis.size());
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const double xi = rule.nodes[k];
    basis.eval_all(std::span<const double>(&xi, 1), phi);
    const double beta = map(xi);
    for (std::size_t i = 0; i < mesh.n_interior(); ++i) {
      const double u = exact_solution(problem.kappa(), beta, problem.source(), mesh.length(), mesh.node(i + 1));
      for (std::size_t m = 0; m < basis.size(); ++m) {
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) += rule.weights[k] * u * phi[m];
      }
    }
  }
  return out;
}

NodalStatistics analytic_statistics(const AdeProblem& problem, int xi_nodes) {
  const BetaMap map = uniform_single_map(problem);
  const Mesh1D& mesh = problem.mesh();
  const QuadratureRule rule = gauss_legendre01(xi_nodes);
  NodalStatistics out;
  for (std::size_t i = 0; i < mesh.n_interior(); ++i) {
    const double x = mesh.node(i + 1);
    double m1 = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k) {
      m1 += rule.weights[k] * exact_solution(problem.kappa(), map(rule.nodes[k]), problem.source(), mesh.length(), x);
    }
    double var = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k) {
      const double d =
          exact_solution(problem.kappa(), map(rule.nodes[k]), problem.source(), mesh.length(), x) - m1;
      var += rule.weights[k] * d * d;
    }
    out.x.push_back(x);
    out.mean.push_back(m1);
    out.variance.push_back(var);
  }
  return out;
}

std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer on a Weyl sequence.
  std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<double> sample_point(std::uint64_t seed, std::uint64_t index, int q) {
  std::mt19937_64 engine(sample_seed(seed, index));
  std::vector<double> xi(static_cast<std::size_t>(q));
  for (double& v : xi) v = std::generate_canonical<double, 53>(engine);
  return xi;
}

namespace {

McEstimate reduce_samples(const std::vector<std::vector<double>>& values, std::size_t n_nodes) {
  const std::size_t count = values.size();
  McEstimate out;
  out.samples = count;
  out.mean.assign(n_nodes, 0.0);
  out.variance.assign(n_nodes, 0.0);
  out.mean_stderr.assign(n_nodes, 0.0);
  out.variance_stderr.assign(n_nodes, 0.0);
  const double mcount = static_cast<double>(count);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    double sum = 0.0;
    for (const auto& v : values) sum += v[i];
    const double mean = sum / mcount;
    double s2 = 0.0;
    double s4 = 0.0;
    for (const auto& v : values) {
      const double d = v[i] - mean;
      s2 += d * d;
      s4 += d * d * d * d;
    }
    const double var = s2 / (mcount - 1.0);
    const double m4 = s4 / mcount;
    out.mean[i] = mean;
    out.variance[i] = var;
    out.mean_stderr[i] = std::sqrt(var / mcount);
    const double var_of_var = (m4 - var * var * (mcount - 3.0) / (mcount - 1.0)) / mcount;
    out.variance_stderr[i] = std::sqrt(std::max(var_of_var, 0.0));
  }
  return out;
}

}  // namespace

McEstimate mc_reference(const AdeProblem& problem, std::size_t samples, std::uint64_t seed) {
  if (samples < 2) throw ConfigError("Monte Carlo needs at least two samples");
  std::vector<std::vector<double>> values(samples);
  bool failed = false;
  std::string failure;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(samples); ++s) {
    try {
      const std::vector<double> xi = sample_point(seed, static_cast<std::uint64_t>(s), problem.q());
      values[static_cast<std::size_t>(s)] = solve_realization(problem, xi, true);
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
  if (failed) throw NumericalError("Monte Carlo sample failed: " + failure);
  return reduce_samples(values, problem.mesh().n_interior());
}

namespace reference {

McEstimate mc_reference(const AdeProblem& problem, std::size_t samples, std::uint64_t seed) {
  if (samples < 2) throw ConfigError("Monte Carlo needs at least two samples");
  // Welford updates, one sample at a time.
  const std::size_t n = problem.mesh().n_interior();
  std::vector<double> mean(n, 0.0), m2(n, 0.0);
  for (std::size_t s = 0; s < samples; ++s) {
    const std::vector<double> u = solve_realization(problem, sample_point(seed, s, problem.q()), true);
    for (std::size_t i = 0; i < n; ++i) {
      const double delta = u[i] - mean[i];
      mean[i] += delta / static_cast<double>(s + 1);
      m2[i] += delta * (u[i] - mean[i]);
    }
  }
  McEstimate out;
  out.samples = samples;
  out.mean = mean;
  for (std::size_t i = 0; i < n; ++i) {
    out.variance.push_back(m2[i] / static_cast<double>(samples - 1));
    out.mean_stderr.push_back(std::sqrt(out.variance.back() / static_cast<double>(samples)));
  }
  out.variance_stderr.assign(n, 0.0);
  return out;
}

}  // namespace reference

DiscretizationLadder::DiscretizationLadder(std::vector<std::pair<int, int>> steps) : steps_(std::move(steps)) {
  if (steps_.empty()) throw ConfigError("ladder needs at least one step");
  for (std::size_t k = 0; k < steps_.size(); ++k) {
    const auto [n_el, p] = steps_[k];
    if (n_el < 2 || p < 0) throw ConfigError("ladder step " + std::to_string(k + 1) + " is invalid");
    if (k == 0) continue;
    const auto [prev_n, prev_p] = steps_[k - 1];
    if (n_el < prev_n || p < prev_p || (n_el == prev_n && p == prev_p)) {
      throw ConfigError("ladder step " + std::to_string(k + 1) + " does not refine the previous step");
    }
  }
}

DiscretizationLadder DiscretizationLadder::parse(const std::string& text) {
  std::vector<std::pair<int, int>> steps;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    int n_el = 0;
    int p = 0;
    char tail = 0;
    if (std::sscanf(item.c_str(), " %d : %d %c", &n_el, &p, &tail) != 2) {
      throw ConfigError("bad ladder step '" + item + "' (expected n_el:p)");
    }
    steps.emplace_back(n_el, p);
  }
  return DiscretizationLadder(std::move(steps));
}

std::string DiscretizationLadder::to_string() const {
  std::string out;
  for (const auto& [n_el, p] : steps_) {
    if (!out.empty()) out += ", ";
    out += std::to_string(n_el) + ":" + std::to_string(p);
  }
  return out;
}

LadderResult run_ladder(const AdeProblem& problem, const DiscretizationLadder& ladder, Method method,
                        double memory_cap_bytes) {
  // Refuse before any solve if some step would not fit.
  for (const auto& [n_el, p] : ladder.steps()) {
    const std::size_t nodes = static_cast<std::size_t>(n_el) - 1;
    const double bytes = solver_memory_bytes(nodes, basis_dimension(problem.q(), p));
    if (bytes > memory_cap_bytes) {
      char buf[200];
      std::snprintf(buf, sizeof buf, "step %d:%d needs about %.0f MB for the factorization, cap is %.0f MB", n_el,
                    p, bytes / 1048576.0, memory_cap_bytes / 1048576.0);
      throw ResourceError(buf);
    }
  }
  std::vector<LadderStep> steps;
  std::optional<CoefficientField> previous;
  for (const auto& [n_el, p] : ladder.steps()) {
    const AdeProblem step_problem = problem.with_discretization(Mesh1D::uniform(problem.length(), n_el), p);
    LadderStep step;
    step.n_el = n_el;
    step.p = p;
    step.unknowns = step_problem.mesh().n_interior() * step_problem.basis().size();
    SolveReport report;
    CoefficientField field = [&] {
      const CoupledSystem system = assemble(step_problem, method);
      return solve(system, &report);
    }();
    step.relative_residual = report.relative_residual;
    if (previous) steps.back().distance_to_next = v_norm(*previous, field);
    steps.push_back(step);
    previous = std::move(field);
  }
  return LadderResult{std::move(steps), std::move(*previous)};
}

}  // namespace vmsgf
