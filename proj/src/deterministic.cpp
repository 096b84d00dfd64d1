#include "vmsgf/deterministic.hpp"

#include <array>
#include <cmath>
#include <string>

#include "vmsgf/error.hpp"
#include "vmsgf/quadrature.hpp"

namespace vmsgf {

GreensKernel::GreensKernel(double kappa, double beta, double a, double b)
    : kappa_(kappa), beta_(beta), a_(a), b_(b) {
  if (!(kappa_ > 0.0)) throw DomainError("Green's kernel needs kappa > 0");
  if (!(b_ > a_)) throw DomainError("Green's kernel needs a < b");
  if (!std::isfinite(beta_)) throw DomainError("Green's kernel needs finite beta");
}

double GreensKernel::operator()(double x, double s) const {
  if (x < a_ || x > b_ || s < a_ || s > b_) {
    throw DomainError("Green's kernel evaluated outside its interval");
  }
  if (x == a_ || x == b_ || s == a_ || s == b_) return 0.0;
  if (beta_ == 0.0) {
    const double lo = std::min(x, s);
    const double hi = std::max(x, s);
    return (lo - a_) * (b_ - hi) / (kappa_ * (b_ - a_));
  }
  if (beta_ > 0.0) return eval_positive(x, s);
  // x -> a + b - x maps the operator with -beta onto one with +beta.
  const GreensKernel mirrored(kappa_, -beta_, a_, b_);
  return mirrored.eval_positive(a_ + b_ - x, a_ + b_ - s);
}

double GreensKernel::eval_positive(double x, double s) const {
  const double c = beta_ / kappa_;
  const double denom = beta_ * -std::expm1(-c * (b_ - a_));
  if (x <= s) {
    const double left = std::exp(c * (x - s)) * -std::expm1(-c * (x - a_));
    const double right = -std::expm1(c * (s - b_));
    return left * right / denom;
  }
  const double left = -std::expm1(-c * (s - a_));
  const double right = -std::expm1(c * (x - b_));
  return left * right / denom;
}

double exact_solution(double kappa, double beta, double f, double length, double x) {
  if (x <= 0.0 || x >= length) return 0.0;
  const double c = beta / kappa;
  if (std::abs(c * length) < 1e-5) {
    // First-order expansion in beta; the remainder is O((c L)^2).
    return f * x * (length - x) / (2.0 * kappa) * (1.0 - beta * (length - 2.0 * x) / (6.0 * kappa));
  }
  double ratio = 0.0;  // (e^{cx} - 1) / (e^{cL} - 1)
  if (c > 0.0) {
    ratio = std::exp(c * (x - length)) * std::expm1(-c * x) / std::expm1(-c * length);
  } else {
    ratio = std::expm1(c * x) / std::expm1(c * length);
  }
  return f / beta * (x - length * ratio);
}

namespace {

// Coefficients of coth(x) - 1/x = sum_n a_n x^(2n-1), a_n = 4^n B_2n / (2n)!.
constexpr std::array<double, 12> kBernoulli = {
    1.0 / 6.0,        -1.0 / 30.0,      1.0 / 42.0,        -1.0 / 30.0,
    5.0 / 66.0,       -691.0 / 2730.0,  7.0 / 6.0,         -3617.0 / 510.0,
    43867.0 / 798.0,  -174611.0 / 330.0, 854513.0 / 138.0, -236364091.0 / 2730.0};

double langevin_series_over_x(double x) {
  // (coth x - 1/x) / x, valid for |x| well inside pi.
  const double x2 = x * x;
  double sum = 0.0;
  double power = 1.0;  // x^(2n-2)
  double four_n = 1.0;
  double factorial = 1.0;
  for (std::size_t n = 1; n <= kBernoulli.size(); ++n) {
    four_n *= 4.0;
    factorial *= static_cast<double>(2 * n - 1) * static_cast<double>(2 * n);
    sum += four_n * kBernoulli[n - 1] / factorial * power;
    power *= x2;
  }
  return sum;
}

constexpr double kSeriesSwitch = 0.5;

}  // namespace

double tau(double h, double beta, double kappa) {
  if (!(h > 0.0) || !(beta > 0.0) || !(kappa > 0.0)) {
    throw DomainError("tau requires h, beta, kappa > 0");
  }
  const double pe = peclet(h, beta, kappa);
  if (pe < kSeriesSwitch) {
    // (h / 2 beta) * Pe * S(Pe) = h^2 / (4 kappa) * S(Pe)
    return h * h / (4.0 * kappa) * langevin_series_over_x(pe);
  }
  return h / (2.0 * beta) * (1.0 / std::tanh(pe) - 1.0 / pe);
}

double tau_by_quadrature(double h, double beta, double kappa) {
  const GreensKernel g(kappa, beta, 0.0, h);
  auto inner = [&](double s) {
    // The kernel has a kink at x = s.
    return integrate_adaptive([&](double x) { return g(x, s); }, 0.0, s, 1e-16, 1e-13) +
           integrate_adaptive([&](double x) { return g(x, s); }, s, h, 1e-16, 1e-13);
  };
  return integrate_adaptive(inner, 0.0, h, 1e-16, 1e-12) / h;
}

std::vector<double> solve_tridiagonal(std::vector<double> dl, std::vector<double> d,
                                      std::vector<double> du, std::vector<double> b) {
  // Gaussian elimination with partial pivoting in the style of LAPACK dgtsv.
  // After a row interchange dl[i] stores the fill-in of the second
  // superdiagonal.
  const std::size_t n = d.size();
  if (n == 0) return b;
  if (dl.size() + 1 != n || du.size() + 1 != n || b.size() != n) {
    throw SolverError("tridiagonal system has inconsistent sizes");
  }
  auto singular = [](std::size_t i) {
    return SolverError("singular tridiagonal system at row " + std::to_string(i));
  };
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      if (d[i] == 0.0) throw singular(i);
      const double fact = dl[i] / d[i];
      d[i + 1] -= fact * du[i];
      b[i + 1] -= fact * b[i];
      dl[i] = 0.0;
    } else {
      const double fact = d[i] / dl[i];
      d[i] = dl[i];
      const double temp = d[i + 1];
      d[i + 1] = du[i] - fact * temp;
      if (i + 2 < n) {
        dl[i] = du[i + 1];
        du[i + 1] = -fact * dl[i];
      } else {
        dl[i] = 0.0;
      }
      du[i] = temp;
      const double tb = b[i];
      b[i] = b[i + 1];
      b[i + 1] = tb - fact * b[i + 1];
    }
  }
  if (d[n - 1] == 0.0) throw singular(n - 1);
  b[n - 1] /= d[n - 1];
  if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
  for (std::size_t k = n >= 2 ? n - 2 : 0; k-- > 0;) {
    b[k] = (b[k] - du[k] * b[k + 1] - dl[k] * b[k + 2]) / d[k];
  }
  return b;
}

std::vector<double> solve_realization(const AdeProblem& problem, std::span<const double> xi,
                                      bool stabilized) {
  return solve_realization(problem, xi, stabilized, problem.mesh());
}

std::vector<double> solve_realization(const AdeProblem& problem, std::span<const double> xi,
                                      bool stabilized, const Mesh1D& mesh) {
  if (xi.size() != static_cast<std::size_t>(problem.q())) {
    throw DomainError("realization point has wrong dimension");
  }
  for (double v : xi) {
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("realization point outside [0,1]^q");
  }
  const std::vector<std::size_t> regions = element_regions(problem.beta(), mesh);
  const std::size_t n = mesh.n_interior();
  std::vector<double> lower(n - 1, 0.0), diag(n, 0.0), upper(n - 1, 0.0), rhs(n, 0.0);
  const double kappa = problem.kappa();
  const double f = problem.source();
  for (std::size_t e = 0; e < mesh.n_elements(); ++e) {
    const Region& region = problem.beta().regions()[regions[e]];
    const double beta = region.map(xi[static_cast<std::size_t>(region.coordinate - 1)]);
    const double h = mesh.h(e);
    const double t = stabilized ? tau(h, beta, kappa) : 0.0;
    const ElementMatrices m = local_matrices(h, kappa, beta, t, f);
    for (int a = 0; a < 2; ++a) {
      const std::size_t row_node = e + static_cast<std::size_t>(a);
      if (row_node == 0 || row_node == mesh.n_elements()) continue;
      const std::size_t row = row_node - 1;
      rhs[row] += m.load[a] + m.stabilization_load[a];
      for (int b = 0; b < 2; ++b) {
        const std::size_t col_node = e + static_cast<std::size_t>(b);
        if (col_node == 0 || col_node == mesh.n_elements()) continue;
        const double v = m.diffusion[a][b] + m.advection[a][b] + m.stabilization[a][b];
        if (b == a) {
          diag[row] += v;
        } else if (b > a) {
          upper[row] += v;
        } else {
          lower[row - 1] += v;
        }
      }
    }
  }
  return solve_tridiagonal(std::move(lower), std::move(diag), std::move(upper), std::move(rhs));
}

}  // namespace vmsgf
