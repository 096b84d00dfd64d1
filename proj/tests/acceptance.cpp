// Acceptance checks. One line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "vmsgf/analysis.hpp"
#include "vmsgf/commands.hpp"
#include "vmsgf/deterministic.hpp"
#include "vmsgf/finescale.hpp"
#include "vmsgf/quadrature.hpp"
#include "vmsgf/sgfem.hpp"

using namespace vmsgf;
namespace fs = std::filesystem;

namespace {

// Regression values frozen from the first verified run. A rerun passes when
// it does not get worse than these by more than 1%.
constexpr double kFrozenExteriorRatioP2 = 2.327646e-14;  // G'(chi), p = 2
constexpr double kFrozenSingleRvGain = 770.31;          // Galerkin / VMS max coefficient error

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

AdeProblem single_rv(int n_el, int p, BetaMap map = BetaMap::one_plus_xi_squared()) {
  std::vector<Region> regions = {{0.0, 1.0, 1, map}};
  return AdeProblem(1e-3, 1.0, BetaField(regions, 1.0, 1), GpcBasis(1, p), Mesh1D::uniform(1.0, n_el));
}

// ---- 1

Outcome basis_correctness() {
  double worst = 0.0;
  bool dims = true;
  for (int q = 1; q <= 5; ++q) {
    for (int p = 0; p <= 6; ++p) {
      const GpcBasis basis(q, p);
      std::size_t expected = 1;
      for (int k = 1; k <= q; ++k) expected = expected * static_cast<std::size_t>(p + k) / static_cast<std::size_t>(k);
      dims = dims && basis.size() == expected;
      // Products of two degree <= p polynomials are exact with p + 1 nodes.
      const StochasticQuadrature quad = StochasticQuadrature::tensor(q, p + 1);
      const Eigen::MatrixXd gram = weighted_gram(basis, [](std::span<const double>) { return 1.0; }, quad);
      worst = std::max(worst, (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff());
    }
  }
  dims = dims && GpcBasis(5, 2).size() == 21 && GpcBasis(5, 6).size() == 462;
  return {dims && worst < 1e-12, fmt("max |E[phi_m phi_n] - delta| = %.2e, dimensions %s", worst, dims ? "ok" : "wrong")};
}

// ---- 2

// Element Green's function on [0, h] in extended precision, built from the
// Sturm-Liouville form of -k g'' + b g'.
long double element_green(long double h, long double beta, long double kappa, long double x, long double s) {
  const long double r = beta / kappa;
  const long double lo = std::min(x, s), hi = std::max(x, s);
  const long double a = std::expm1(r * lo);
  const long double b = std::exp(r * h) - std::exp(r * hi);
  return std::exp(-r * s) * a * b / (kappa * r * std::expm1(r * h));
}

double tau_oracle(double h, double beta, double kappa) {
  auto inner = [&](double s) {
    auto g = [&](double x) { return static_cast<double>(element_green(h, beta, kappa, x, s)); };
    return integrate_adaptive(g, 0.0, s, 1e-18, 1e-14) + integrate_adaptive(g, s, h, 1e-18, 1e-14);
  };
  return integrate_adaptive(inner, 0.0, h, 1e-18, 1e-13) / h;
}

Outcome tau_identity() {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> uh(0.01, 0.1), ub(1.0, 2.0), ulog(-4.0, -1.0);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double h = uh(rng), beta = ub(rng), kappa = std::pow(10.0, ulog(rng));
    const double t = tau(h, beta, kappa);
    worst = std::max(worst, std::abs(t - tau_oracle(h, beta, kappa)) / t);
  }
  const double h = 0.05, beta = 1.5;
  const double small = std::abs(tau(h, beta, 1e3) - h * h / 12e3) / (h * h / 12e3);
  const double large = std::abs(tau(h, beta, 1e-12) - h / (2 * beta)) / (h / (2 * beta));
  const bool ok = worst < 1e-8 && small < 1e-8 && large < 1e-8;
  return {ok, fmt("max relative deviation from quadrature %.2e; Pe->0 %.2e, Pe->inf %.2e", worst, small, large)};
}

// ---- 3

Outcome deterministic_exactness() {
  double worst = 0.0;
  for (double beta : {1.0, 1.5, 2.0}) {
    const AdeProblem prob = single_rv(20, 0, BetaMap::constant(beta));
    const double xi = 0.5;
    const std::vector<double> u = solve_realization(prob, std::span<const double>(&xi, 1), true);
    for (std::size_t i = 0; i < u.size(); ++i) {
      worst = std::max(worst, std::abs(u[i] - exact_solution(1e-3, beta, 1.0, 1.0, prob.mesh().node(i + 1))));
    }
  }
  return {worst < 1e-9, fmt("max nodal error %.2e", worst)};
}

// ---- 4

Outcome finescale_identities() {
  const FineScaleOperator op(single_rv(20, 2));
  const auto xs = element_x_grid(op.mesh(), 10);
  const auto xis = uniform_xi_grid(41);
  double mu = 0.0;
  for (std::size_t i = 0; i < op.mesh().n_interior(); ++i) {
    for (std::size_t m = 0; m < op.basis().size(); ++m) {
      SourceSpec src{op.mesh().node(i + 1), std::vector<double>(op.basis().size(), 0.0)};
      src.profile[m] = 1.0;
      const StochasticField gp = op.fine_greens(src);
      for (double x : xs) {
        for (double xi : xis) mu = std::max(mu, std::abs(gp(x, xi)));
      }
    }
  }
  std::vector<double> nodes;
  for (std::size_t i = 1; i + 1 < op.mesh().nodes().size(); ++i) nodes.push_back(op.mesh().node(i));
  const QuadratureRule check = gauss_legendre01(2 * static_cast<int>(op.rule().size()));
  const Eigen::MatrixXd c = coarse_coefficients(op.fine_greens({0.125, {1.0, 1.0, 1.0}}), nodes, op.basis(), check);
  const double chi = c.cwiseAbs().maxCoeff();
  return {mu < 1e-8 && chi < 1e-8, fmt("max |G'mu_{i,m}| = %.2e, max |E[phi_m G'(chi)(x_i)]| = %.2e", mu, chi)};
}

// ---- 5

LocalityMetrics locality_for(int p) {
  const FineScaleOperator op(single_rv(20, p));
  std::vector<double> profile(op.basis().size(), 0.0);
  for (std::size_t m = 0; m < 3; ++m) profile[m] = 1.0;
  const StochasticField gp = op.fine_greens({0.125, profile});
  const FieldGrid grid = sample_field(gp, element_x_grid(op.mesh()), uniform_xi_grid());
  return locality_metrics(grid, gp, op.mesh(), 0.125, op.basis(), gauss_legendre01(128));
}

Outcome locality_trend() {
  const LocalityMetrics m2 = locality_for(2);
  const LocalityMetrics m4 = locality_for(4);
  const double b2 = std::max(m2.boundary_max[0], m2.boundary_max[1]);
  const double b4 = std::max(m4.boundary_max[0], m4.boundary_max[1]);
  const bool frozen = kFrozenExteriorRatioP2 > 0.0;
  const bool ok = b4 < b2 && (!frozen || m2.ratio <= kFrozenExteriorRatioP2 * 1.01);
  return {ok, fmt("boundary max p=2 %.4e, p=4 %.4e; exterior/interior p=2 %.6e (frozen %.6e), p=4 %.6e", b2, b4,
                  m2.ratio, kFrozenExteriorRatioP2, m4.ratio)};
}

// ---- 6

Outcome single_rv_accuracy() {
  const AdeProblem prob = single_rv(20, 2);
  const Eigen::MatrixXd exact = analytic_coefficients(prob);
  const double gal = coefficient_errors(solve(assemble(prob, Method::galerkin)), exact).max;
  const double vms = coefficient_errors(solve(assemble(prob, Method::vms)), exact).max;
  const double gain = gal / vms;
  const bool frozen = kFrozenSingleRvGain > 0.0;
  const bool ok = vms <= gal / 10.0 && (!frozen || gain >= kFrozenSingleRvGain * 0.99);
  return {ok, fmt("max coefficient error galerkin %.4e, vms %.4e, ratio %.2f (frozen %.2f)", gal, vms, gain,
                  kFrozenSingleRvGain)};
}

// ---- 7

Outcome five_rv() {
  const AdeProblem coarse(1e-3, 1.0, BetaField(equal_regions(1.0, 5), 1.0, 5), GpcBasis(5, 2), Mesh1D::uniform(1.0, 20));
  const auto t0 = std::chrono::steady_clock::now();
  const CoupledSystem vsys = assemble(coarse, Method::vms);
  const CoefficientField vms = solve(vsys);
  const CoefficientField gal = solve(assemble(coarse, Method::galerkin));
  const double coarse_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const DiscretizationLadder ladder = DiscretizationLadder::parse("20:2, 40:3, 80:4, 160:5, 320:6");
  const auto t1 = std::chrono::steady_clock::now();
  const LadderResult lr = run_ladder(coarse, ladder, Method::galerkin, 4096.0 * 1048576.0);
  const double ladder_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();

  bool decreasing = true;
  std::string dist;
  for (std::size_t k = 0; k + 1 < lr.steps.size(); ++k) {
    dist += fmt("%s%.3e", k ? " " : "", lr.steps[k].distance_to_next);
    if (k > 0) decreasing = decreasing && lr.steps[k].distance_to_next < lr.steps[k - 1].distance_to_next;
  }
  const Eigen::MatrixXd ref = restrict_coefficients(lr.reference, coarse.mesh(), coarse.basis());
  const CoefficientErrors ev = coefficient_errors(vms, ref);
  const CoefficientErrors eg = coefficient_errors(gal, ref);
  bool per_order = true;
  std::string orders;
  for (std::size_t o = 0; o < ev.per_order_max.size(); ++o) {
    per_order = per_order && ev.per_order_max[o] <= eg.per_order_max[o] / 10.0;
    orders += fmt("%s%zu:%.1f", o ? " " : "", o, eg.per_order_max[o] / ev.per_order_max[o]);
  }
  const std::size_t ref_unknowns = lr.steps.back().unknowns;
  const bool sizes = vsys.matrix.rows() == 399 && ref_unknowns == 147378;
  const bool ok = sizes && decreasing && per_order && ladder_seconds <= 15 * 60 && coarse_seconds <= 60;
  return {ok, fmt("unknowns %ld / %zu; distances %s; galerkin/vms per order %s; ladder %.0f s", vsys.matrix.rows(),
                  ref_unknowns, dist.c_str(), orders.c_str(), ladder_seconds)};
}

// ---- 8

Outcome monte_carlo() {
  const AdeProblem prob = single_rv(20, 2);
  const CoefficientField sg = solve(assemble(prob, Method::vms));
  const McEstimate mc = mc_reference(prob, 10000, 20240607);
  const std::vector<double> mean = sg.mean();
  double worst = 0.0;
  for (std::size_t i = 0; i < mean.size(); ++i) worst = std::max(worst, std::abs(mean[i] - mc.mean[i]) / mc.mean_stderr[i]);
  return {worst <= 3.0, fmt("max |sg mean - mc mean| / stderr = %.3f over %zu samples", worst, mc.samples)};
}

// ---- 9

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "vmsgf");
  std::vector<char*> argv;
  for (std::string& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

Outcome reproducibility() {
  const fs::path dir = fs::current_path() / "acceptance_repro";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "kappa = 0.001\nn_el = 20\np = 2\nregion = 0, 1, 1, one_plus_xi_squared\n"
           "ladder = 10:1, 20:2, 40:3\nmc_samples = 500\n";
  }
  const std::vector<std::string> commands = {"solve", "greens-locality", "convergence", "compare", "tau-table",
                                             "mc-validate"};
  int files = 0;
  std::string bad;
  for (const std::string& cmd : commands) {
    for (const char* run : {"a", "b"}) {
      const int code = invoke({cmd, "--config", (dir / "run.cfg").string(), "--out", (dir / run).string(), "--seed",
                               "7", "--reproducible"});
      if (code != 0) bad += " " + cmd + "(exit " + std::to_string(code) + ")";
    }
  }
  for (const auto& entry : fs::directory_iterator(dir / "a")) {
    ++files;
    const fs::path other = dir / "b" / entry.path().filename();
    if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) bad += " " + entry.path().filename().string();
  }
  return {bad.empty() && files > 0, fmt("%d output files compared%s%s", files, bad.empty() ? "" : "; differing:",
                                        bad.c_str())};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "basis correctness", 5, basis_correctness},
      {2, "tau identity", 10, tau_identity},
      {3, "deterministic nodal exactness", 1, deterministic_exactness},
      {4, "fine-scale operator identities", 60, finescale_identities},
      {5, "locality trend", 120, locality_trend},
      {6, "single-RV accuracy", 10, single_rv_accuracy},
      {7, "five-RV experiment", 16 * 60, five_rv},
      {8, "Monte Carlo cross-validation", 120, monte_carlo},
      {9, "reproducibility", 0, reproducibility},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.budget_seconds <= 0 || seconds <= c.budget_seconds;
    const bool pass = o.pass && in_time;
    failures += pass ? 0 : 1;
    std::cout << "criterion " << c.id << " [" << c.name << "]: " << (pass ? "PASS" : "FAIL") << " (" << o.detail
              << fmt("; %.2f s", seconds) << (in_time ? "" : ", over budget") << ")" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
