#include "vmsgf/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <string>

#include "vmsgf/error.hpp"

namespace vmsgf {

QuadratureRule gauss_legendre01(int n) {
  if (n < 1) throw ConfigError("Gauss rule needs at least one node");
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  // Newton iteration on P_n over (-1,1); roots are symmetric so only half are
  // computed.
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo] = 0.5 * (1.0 - z);
    rule.nodes[hi] = 0.5 * (1.0 + z);
    rule.weights[lo] = 0.5 * w;
    rule.weights[hi] = 0.5 * w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.5;
  return rule;
}

int default_node_count(int p, int weight_degree) {
  const int degree = 2 * p + weight_degree;
  return (degree + 2) / 2 + 2;  // ceil((degree+1)/2) + 2
}

StochasticQuadrature::StochasticQuadrature(int dimension, std::vector<double> nodes,
                                           std::vector<double> weights)
    : dimension_(dimension), nodes_(std::move(nodes)), weights_(std::move(weights)) {
  if (dimension_ < 1) throw ConfigError("quadrature dimension must be >= 1");
  if (nodes_.size() != weights_.size() * static_cast<std::size_t>(dimension_)) {
    throw ConfigError("quadrature node/weight size mismatch");
  }
}

StochasticQuadrature StochasticQuadrature::tensor(int dimension, int nodes_per_coordinate) {
  const QuadratureRule rule = gauss_legendre01(nodes_per_coordinate);
  const std::size_t n = rule.size();
  std::size_t total = 1;
  for (int d = 0; d < dimension; ++d) {
    if (__builtin_mul_overflow(total, n, &total)) {
      throw ConfigError("tensor quadrature too large");
    }
  }
  std::vector<double> nodes(total * static_cast<std::size_t>(dimension));
  std::vector<double> weights(total);
  std::vector<std::size_t> digit(static_cast<std::size_t>(dimension), 0);
  for (std::size_t j = 0; j < total; ++j) {
    double w = 1.0;
    for (int d = 0; d < dimension; ++d) {
      nodes[j * dimension + d] = rule.nodes[digit[d]];
      w *= rule.weights[digit[d]];
    }
    weights[j] = w;
    // odometer increment, last coordinate fastest
    for (int d = dimension - 1; d >= 0; --d) {
      if (++digit[d] < n) break;
      digit[d] = 0;
    }
  }
  return StochasticQuadrature(dimension, std::move(nodes), std::move(weights));
}

double expectation(const StochasticQuadrature& quad, const StochasticFunction& integrand) {
  double sum = 0.0;
  for (std::size_t j = 0; j < quad.size(); ++j) sum += quad.weight(j) * integrand(quad.node(j));
  return sum;
}

Eigen::MatrixXd weighted_gram(const GpcBasis& basis, const StochasticFunction& weight,
                              const StochasticQuadrature& quad) {
  if (quad.dimension() != basis.dimension()) {
    throw ConfigError("quadrature dimension does not match basis dimension");
  }
  const auto nq = static_cast<Eigen::Index>(quad.size());
  const auto ns = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd values(nq, ns);
  Eigen::MatrixXd weighted(nq, ns);
  std::vector<double> phi(basis.size());
  for (Eigen::Index j = 0; j < nq; ++j) {
    const auto xi = quad.node(static_cast<std::size_t>(j));
    const double w = weight(xi);
    if (!std::isfinite(w)) {
      std::string where;
      for (double v : xi) where += (where.empty() ? "" : ",") + std::to_string(v);
      throw NumericalError("non-finite weight at quadrature node " + std::to_string(j) +
                           " (xi = " + where + ")");
    }
    basis.eval_all(xi, phi);
    for (Eigen::Index m = 0; m < ns; ++m) {
      values(j, m) = phi[static_cast<std::size_t>(m)];
      weighted(j, m) = quad.weight(static_cast<std::size_t>(j)) * w * phi[static_cast<std::size_t>(m)];
    }
  }
  Eigen::MatrixXd gram = values.transpose() * weighted;
  // Exact symmetry regardless of floating-point summation order.
  return 0.5 * (gram + gram.transpose());
}

Eigen::MatrixXd univariate_weighted_gram(int p, const std::function<double(double)>& weight,
                                         const QuadratureRule& rule) {
  const auto n = static_cast<Eigen::Index>(p + 1);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  std::vector<double> phi(static_cast<std::size_t>(n));
  for (std::size_t j = 0; j < rule.size(); ++j) {
    const double w = weight(rule.nodes[j]);
    if (!std::isfinite(w)) {
      throw NumericalError("non-finite weight at quadrature node " + std::to_string(j) +
                           " (xi = " + std::to_string(rule.nodes[j]) + ")");
    }
    legendre01_all(p, rule.nodes[j], phi);
    const double ww = rule.weights[j] * w;
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b <= a; ++b) {
        gram(a, b) += ww * phi[static_cast<std::size_t>(a)] * phi[static_cast<std::size_t>(b)];
      }
    }
  }
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a + 1; b < n; ++b) gram(a, b) = gram(b, a);
  }
  return gram;
}

Eigen::VectorXd univariate_weighted_moments(int p, const std::function<double(double)>& weight,
                                            const QuadratureRule& rule) {
  const auto n = static_cast<Eigen::Index>(p + 1);
  Eigen::VectorXd moments = Eigen::VectorXd::Zero(n);
  std::vector<double> phi(static_cast<std::size_t>(n));
  for (std::size_t j = 0; j < rule.size(); ++j) {
    const double w = weight(rule.nodes[j]);
    if (!std::isfinite(w)) {
      throw NumericalError("non-finite weight at quadrature node " + std::to_string(j) +
                           " (xi = " + std::to_string(rule.nodes[j]) + ")");
    }
    legendre01_all(p, rule.nodes[j], phi);
    for (Eigen::Index a = 0; a < n; ++a) {
      moments(a) += rule.weights[j] * w * phi[static_cast<std::size_t>(a)];
    }
  }
  return moments;
}

namespace {

// QUADPACK qk15 abscissae and weights.
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel kronrod15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double fsum = f(center - dx) + f(center + dx);
    kronrod += kWgk[j] * fsum;
    if (j % 2 == 1) gauss += kWg[j / 2] * fsum;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, double rel_tol, int max_intervals) {
  if (a == b) return 0.0;
  // Start from a partition graded geometrically toward both ends, so thin
  // endpoint layers that fall between the nodes of a single panel are seen.
  constexpr int kGrading = 20;
  std::vector<double> cuts = {a};
  for (int k = kGrading; k >= 2; --k) cuts.push_back(a + (b - a) * std::ldexp(1.0, -k));
  cuts.push_back(a + 0.5 * (b - a));
  for (int k = 2; k <= kGrading; ++k) cuts.push_back(b - (b - a) * std::ldexp(1.0, -k));
  cuts.push_back(b);
  std::priority_queue<Panel> heap;
  double total = 0.0;
  double error = 0.0;
  int intervals = 0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    if (!(cuts[k + 1] > cuts[k])) continue;
    const Panel panel = kronrod15(f, cuts[k], cuts[k + 1]);
    total += panel.value;
    error += panel.error;
    heap.push(panel);
    ++intervals;
  }
  while (error > std::max(abs_tol, rel_tol * std::abs(total)) && intervals < max_intervals) {
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {  // interval no longer splittable
      heap.push(worst);
      break;
    }
    const Panel left = kronrod15(f, worst.a, mid);
    const Panel right = kronrod15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }
  // Final sum in left-to-right order so the result does not depend on the
  // running-update history.
  std::vector<Panel> panels;
  panels.reserve(heap.size());
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  double sum = 0.0;
  for (const Panel& p : panels) sum += p.value;
  return sum;
}

}  // namespace vmsgf
