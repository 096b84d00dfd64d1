#include "vmsgf/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <omp.h>

#include <CLI11.hpp>

#include "vmsgf/analysis.hpp"
#include "vmsgf/csv.hpp"
#include "vmsgf/deterministic.hpp"
#include "vmsgf/error.hpp"
#include "vmsgf/finescale.hpp"

namespace vmsgf {

namespace fs = std::filesystem;

namespace {

std::ostream& log_of(const CommandContext& ctx) {
  static std::ofstream sink;
  return ctx.log != nullptr ? *ctx.log : sink;
}

std::string output_path(const CommandContext& ctx, const std::string& name) {
  fs::create_directories(ctx.out_dir);
  return (fs::path(ctx.out_dir) / name).string();
}

std::vector<std::string> header(const CommandContext& ctx, const std::string& command,
                                const std::vector<std::string>& extra = {}) {
  std::vector<std::string> lines = {"vmsgf " + command};
  for (const std::string& line : render_config(ctx.config)) lines.push_back("cfg " + line);
  lines.insert(lines.end(), extra.begin(), extra.end());
  return lines;
}

void check_experiment(const CommandContext& ctx, const std::string& command) {
  if (!ctx.config.experiment.empty() && ctx.config.experiment != command) {
    throw ConfigError("config declares experiment '" + ctx.config.experiment + "' but the command is '" +
                      command + "'");
  }
}

std::vector<Method> methods_of(const std::string& method) {
  if (method == "both") return {Method::galerkin, Method::vms};
  return {parse_method(method)};
}

void check_memory(const AdeProblem& problem, double cap_mb) {
  const double bytes = solver_memory_bytes(problem.mesh().n_interior(), problem.basis().size());
  if (bytes > cap_mb * 1048576.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "factorization needs about %.0f MB, cap is %.0f MB (memory_cap_mb)",
                  bytes / 1048576.0, cap_mb);
    throw ResourceError(buf);
  }
}

CoefficientField solve_method(const AdeProblem& problem, Method method, double cap_mb, std::ostream& log) {
  check_memory(problem, cap_mb);
  const CoupledSystem system = assemble(problem, method);
  SolveReport report;
  CoefficientField field = solve(system, &report);
  char buf[200];
  std::snprintf(buf, sizeof buf, "%s: %zu unknowns, relative residual %.3e after %d refinement steps\n",
                to_string(method).c_str(), system.unknowns(), report.relative_residual, report.refinement_steps);
  log << buf;
  return field;
}

std::vector<std::string> mode_columns(const GpcBasis& basis) {
  std::vector<std::string> cols;
  for (const MultiIndex& idx : basis.indices()) cols.push_back(mode_label(idx));
  return cols;
}

std::string field_descriptor(const CoefficientField& field) {
  return "field L = " + format_double(field.mesh().length()) + ", n_el = " +
         std::to_string(field.mesh().n_elements()) + ", p = " + std::to_string(field.basis().order()) +
         ", q = " + std::to_string(field.basis().dimension());
}

void write_grid(const std::string& path, const std::vector<std::string>& head, const FieldGrid& grid) {
  std::vector<std::string> cols = {"x"};
  for (double xi : grid.xi) cols.push_back(format_double(xi));
  CsvWriter csv(path, head, cols);
  for (std::size_t i = 0; i < grid.x.size(); ++i) {
    std::vector<double> row = {grid.x[i]};
    for (Eigen::Index k = 0; k < grid.values.cols(); ++k) row.push_back(grid.values(static_cast<Eigen::Index>(i), k));
    csv.row(row);
  }
  csv.close();
}

}  // namespace

std::string mode_label(const MultiIndex& index) {
  std::string s = "c";
  for (int v : index.entries()) s += "_" + std::to_string(v);
  return s;
}

void write_coefficient_field(const std::string& path, const std::vector<std::string>& head,
                             const CoefficientField& field) {
  std::vector<std::string> lines = head;
  lines.push_back(field_descriptor(field));
  std::vector<std::string> cols = {"node", "x"};
  const std::vector<std::string> modes = mode_columns(field.basis());
  cols.insert(cols.end(), modes.begin(), modes.end());
  CsvWriter csv(path, lines, cols);
  for (std::size_t i = 0; i < field.n_nodes(); ++i) {
    std::vector<std::string> row = {std::to_string(i + 1), format_double(field.mesh().node(i + 1))};
    for (std::size_t m = 0; m < field.n_modes(); ++m) row.push_back(format_double(field.coeff(i, m)));
    csv.row(row);
  }
  csv.close();
}

CoefficientField read_coefficient_field(const std::string& path) {
  const CsvTable table = read_csv(path);
  double length = 0.0;
  int n_el = 0;
  int p = -1;
  int q = 0;
  bool found = false;
  for (const std::string& line : table.header_lines) {
    if (line.rfind("field ", 0) != 0) continue;
    if (std::sscanf(line.c_str(), "field L = %lf, n_el = %d, p = %d, q = %d", &length, &n_el, &p, &q) == 4) {
      found = true;
    }
  }
  if (!found) throw ConfigError(path + " has no field descriptor line");
  const GpcBasis basis(q, p);
  const Mesh1D mesh = Mesh1D::uniform(length, n_el);
  if (table.columns.size() != basis.size() + 2 || table.rows.size() != mesh.n_interior()) {
    throw ConfigError(path + " does not match its field descriptor");
  }
  const std::vector<std::string> modes = mode_columns(basis);
  for (std::size_t m = 0; m < modes.size(); ++m) {
    if (table.columns[m + 2] != modes[m]) throw ConfigError(path + ": unexpected column " + table.columns[m + 2]);
  }
  Eigen::MatrixXd coeffs(static_cast<Eigen::Index>(mesh.n_interior()), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    if (row.size() != table.columns.size()) throw ConfigError(path + ": ragged row " + std::to_string(i + 1));
    for (std::size_t m = 0; m < basis.size(); ++m) {
      coeffs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) = std::stod(row[m + 2]);
    }
  }
  return CoefficientField(basis, mesh, std::move(coeffs));
}

void cmd_solve(const CommandContext& ctx) {
  check_experiment(ctx, "solve");
  const RunConfig& cfg = ctx.config;
  const AdeProblem problem = make_problem(cfg);
  const std::vector<Method> methods = methods_of(cfg.method);
  const std::vector<double> xi = cfg.effective_xi();
  std::ostream& log = log_of(ctx);

  std::vector<CoefficientField> fields;
  for (Method m : methods) {
    fields.push_back(solve_method(problem, m, cfg.memory_cap_mb, log));
    write_coefficient_field(output_path(ctx, "solution_" + to_string(m) + ".csv"), header(ctx, "solve"),
                            fields.back());
  }

  std::vector<std::string> cols = {"x"};
  for (Method m : methods) cols.push_back(to_string(m));
  CsvWriter mean(output_path(ctx, "mean.csv"), header(ctx, "solve"), cols);
  CsvWriter variance(output_path(ctx, "variance.csv"), header(ctx, "solve"), cols);
  std::vector<std::string> rcols = cols;
  rcols.push_back("deterministic_stabilized");
  std::string xi_text;
  for (double v : xi) xi_text += (xi_text.empty() ? "" : ", ") + format_double(v);
  CsvWriter real(output_path(ctx, "realization.csv"), header(ctx, "solve", {"realization xi = " + xi_text}),
                 rcols);
  const std::vector<double> exact_nodes = solve_realization(problem, xi, true);
  std::vector<std::vector<double>> realizations;
  std::vector<std::vector<double>> means;
  std::vector<std::vector<double>> variances;
  for (const CoefficientField& f : fields) {
    realizations.push_back(f.realization(xi));
    means.push_back(f.mean());
    variances.push_back(f.variance());
  }
  for (std::size_t i = 0; i < problem.mesh().n_interior(); ++i) {
    const double x = problem.mesh().node(i + 1);
    std::vector<double> mrow = {x}, vrow = {x}, rrow = {x};
    for (std::size_t k = 0; k < fields.size(); ++k) {
      mrow.push_back(means[k][i]);
      vrow.push_back(variances[k][i]);
      rrow.push_back(realizations[k][i]);
    }
    rrow.push_back(exact_nodes[i]);
    mean.row(mrow);
    variance.row(vrow);
    real.row(rrow);
  }
  mean.close();
  variance.close();
  real.close();
}

void cmd_greens_locality(const CommandContext& ctx) {
  check_experiment(ctx, "greens-locality");
  const RunConfig& cfg = ctx.config;
  const AdeProblem problem = make_problem(cfg);
  std::ostream& log = log_of(ctx);
  const FineScaleOperator op(problem, cfg.greens_xi_nodes);
  const SourceSpec source{cfg.source_x, cfg.source_profile};
  const StochasticField g = op.greens(source);
  const StochasticField gp = op.fine_greens(source);
  const std::vector<double> xs = element_x_grid(problem.mesh());
  const std::vector<double> xis = uniform_xi_grid();
  const FieldGrid g_grid = sample_field(g, xs, xis);
  const FieldGrid gp_grid = sample_field(gp, xs, xis);
  // Coefficients use a rule independent of the one that built the operator.
  const QuadratureRule check_rule = gauss_legendre01(static_cast<int>(2 * op.rule().size()));
  const LocalityMetrics mg = locality_metrics(g_grid, g, problem.mesh(), source.x_s, op.basis(), check_rule);
  const LocalityMetrics mgp = locality_metrics(gp_grid, gp, problem.mesh(), source.x_s, op.basis(), check_rule);

  const std::vector<std::string> info = {
      "xi quadrature nodes = " + std::to_string(op.rule().size()),
      "moment matrix size = " + std::to_string(op.moment_matrix().rows()),
      "moment matrix condition estimate = " + format_double(op.condition_estimate()),
      "quadrature doubling discrepancy = " + format_double(op.quadrature_discrepancy())};
  write_grid(output_path(ctx, "G_field.csv"), header(ctx, "greens-locality", {"G(chi): rows x, columns xi"}), g_grid);
  write_grid(output_path(ctx, "Gprime_field.csv"), header(ctx, "greens-locality", {"G'(chi): rows x, columns xi"}),
             gp_grid);

  CsvWriter coeffs(output_path(ctx, "boundary_coeffs.csv"), header(ctx, "greens-locality", info),
                   {"field", "node", "x", "rank", "mode", "order", "abs_coefficient"});
  auto emit = [&](const std::string& name, const LocalityMetrics& m) {
    for (int b = 0; b < 2; ++b) {
      for (std::size_t r = 0; r < op.basis().size(); ++r) {
        coeffs.row({name, b == 0 ? "A" : "B", format_double(m.boundary_x[b]), std::to_string(r),
                    mode_label(op.basis().index(r)), std::to_string(op.basis().index(r).total_order()),
                    format_double(m.boundary_coeffs(b, static_cast<Eigen::Index>(r)))});
      }
    }
  };
  emit("G", mg);
  emit("Gprime", mgp);
  coeffs.close();

  CsvWriter metrics(output_path(ctx, "locality_metrics.csv"), header(ctx, "greens-locality", info),
                    {"field", "source_element", "x_A", "x_B", "interior_max", "exterior_max", "exterior_interior_ratio",
                     "boundary_max_A", "boundary_max_B", "boundary_coeff_max"});
  auto metric_row = [&](const std::string& name, const LocalityMetrics& m) {
    metrics.row({name, std::to_string(m.source_element), format_double(m.boundary_x[0]), format_double(m.boundary_x[1]),
                 format_double(m.interior_max), format_double(m.exterior_max), format_double(m.ratio),
                 format_double(m.boundary_max[0]), format_double(m.boundary_max[1]),
                 format_double(m.boundary_coeffs.maxCoeff())});
  };
  metric_row("G", mg);
  metric_row("Gprime", mgp);
  metrics.close();

  char buf[256];
  std::snprintf(buf, sizeof buf,
                "G': exterior/interior %.3e, boundary max %.3e / %.3e, boundary coefficient max %.3e\n", mgp.ratio,
                mgp.boundary_max[0], mgp.boundary_max[1], mgp.boundary_coeffs.maxCoeff());
  log << buf;
}

void cmd_convergence(const CommandContext& ctx) {
  check_experiment(ctx, "convergence");
  const RunConfig& cfg = ctx.config;
  const AdeProblem problem = make_problem(cfg);
  const DiscretizationLadder ladder = DiscretizationLadder::parse(cfg.ladder);
  std::ostream& log = log_of(ctx);
  const LadderResult result =
      run_ladder(problem, ladder, parse_method(cfg.ladder_method), cfg.memory_cap_mb * 1048576.0);

  CsvWriter csv(output_path(ctx, "ladder_distances.csv"), header(ctx, "convergence"),
                {"from_n_el", "from_p", "from_unknowns", "to_n_el", "to_p", "to_unknowns", "v_norm_distance"});
  for (std::size_t k = 0; k + 1 < result.steps.size(); ++k) {
    const LadderStep& a = result.steps[k];
    const LadderStep& b = result.steps[k + 1];
    csv.row({std::to_string(a.n_el), std::to_string(a.p), std::to_string(a.unknowns), std::to_string(b.n_el),
             std::to_string(b.p), std::to_string(b.unknowns), format_double(a.distance_to_next)});
  }
  csv.close();
  for (std::size_t k = 0; k < result.steps.size(); ++k) {
    const LadderStep& s = result.steps[k];
    char buf[160];
    std::snprintf(buf, sizeof buf, "step %d:%d  %zu unknowns  residual %.3e", s.n_el, s.p, s.unknowns,
                  s.relative_residual);
    log << buf;
    if (k + 1 < result.steps.size()) {
      std::snprintf(buf, sizeof buf, "  distance to next %.6e", s.distance_to_next);
      log << buf;
    }
    log << '\n';
  }
  write_coefficient_field(output_path(ctx, "reference_solution.csv"), header(ctx, "convergence"), result.reference);
}

void cmd_compare(const CommandContext& ctx) {
  check_experiment(ctx, "compare");
  const RunConfig& cfg = ctx.config;
  const AdeProblem problem = make_problem(cfg);
  std::ostream& log = log_of(ctx);
  const Mesh1D& mesh = problem.mesh();

  Eigen::MatrixXd ref_coeffs;
  NodalStatistics ref_stats;
  std::string ref_name;
  if (cfg.reference.empty() && problem.q() == 1) {
    ref_coeffs = analytic_coefficients(problem);
    ref_stats = analytic_statistics(problem);
    ref_name = "closed-form solution projected by Gauss quadrature";
  } else {
    const std::string path =
        cfg.reference.empty() ? (fs::path(ctx.out_dir) / "reference_solution.csv").string() : cfg.reference;
    if (!fs::exists(path)) {
      throw ConfigError("reference solution '" + path + "' not found; run 'vmsgf convergence' with this config first");
    }
    const CoefficientField reference = read_coefficient_field(path);
    ref_coeffs = restrict_coefficients(reference, mesh, problem.basis());
    ref_stats = nodal_statistics(reference, mesh);
    ref_name = path + " (" + field_descriptor(reference) + ")";
  }

  const std::vector<Method> methods = {Method::galerkin, Method::vms};
  std::vector<CoefficientErrors> errors;
  std::vector<NodalStatistics> stats;
  for (Method m : methods) {
    const CoefficientField f = solve_method(problem, m, cfg.memory_cap_mb, log);
    errors.push_back(coefficient_errors(f, ref_coeffs));
    stats.push_back(nodal_statistics(f, mesh));
  }

  const std::vector<std::string> head = header(ctx, "compare", {"reference: " + ref_name});
  CsvWriter ce(output_path(ctx, "coeff_errors.csv"), head,
               {"method", "node", "x", "rank", "mode", "order", "abs_error"});
  for (std::size_t k = 0; k < methods.size(); ++k) {
    for (const CoefficientErrorRow& r : errors[k].rows) {
      ce.row({to_string(methods[k]), std::to_string(r.node + 1), format_double(r.x), std::to_string(r.rank),
              mode_label(problem.basis().index(r.rank)), std::to_string(r.order), format_double(r.error)});
    }
  }
  ce.close();

  CsvWriter se(output_path(ctx, "stats_errors.csv"), head,
               {"x", "reference_mean", "reference_variance", "galerkin_mean_error", "galerkin_variance_error",
                "vms_mean_error", "vms_variance_error"});
  double mean_lo = 0.0, mean_hi = 0.0, var_lo = 0.0, var_hi = 0.0;
  std::vector<double> max_mean_err(methods.size(), 0.0), max_var_err(methods.size(), 0.0);
  for (std::size_t i = 0; i < ref_stats.x.size(); ++i) {
    std::vector<double> row = {ref_stats.x[i], ref_stats.mean[i], ref_stats.variance[i]};
    for (std::size_t k = 0; k < methods.size(); ++k) {
      const double dm = std::abs(stats[k].mean[i] - ref_stats.mean[i]);
      const double dv = std::abs(stats[k].variance[i] - ref_stats.variance[i]);
      row.push_back(dm);
      row.push_back(dv);
      max_mean_err[k] = std::max(max_mean_err[k], dm);
      max_var_err[k] = std::max(max_var_err[k], dv);
    }
    mean_lo = std::min(mean_lo, ref_stats.mean[i]);
    mean_hi = std::max(mean_hi, ref_stats.mean[i]);
    var_lo = std::min(var_lo, ref_stats.variance[i]);
    var_hi = std::max(var_hi, ref_stats.variance[i]);
    se.row(row);
  }
  se.close();

  std::ofstream summary(output_path(ctx, "summary.txt"), std::ios::binary);
  for (const std::string& line : head) summary << "# " << line << '\n';
  char buf[256];
  summary << "order,galerkin_max_error,vms_max_error,galerkin_over_vms\n";
  for (std::size_t order = 0; order < errors[0].per_order_max.size(); ++order) {
    const double g = errors[0].per_order_max[order];
    const double v = errors[1].per_order_max[order];
    summary << order << ',' << format_double(g) << ',' << format_double(v) << ','
            << format_double(v > 0.0 ? g / v : INFINITY) << '\n';
  }
  summary << "all," << format_double(errors[0].max) << ',' << format_double(errors[1].max) << ','
          << format_double(errors[1].max > 0.0 ? errors[0].max / errors[1].max : INFINITY) << '\n';
  const double mean_range = mean_hi - mean_lo;
  const double var_range = var_hi - var_lo;
  summary << "statistic,galerkin_max_error_over_range,vms_max_error_over_range\n";
  summary << "mean," << format_double(max_mean_err[0] / mean_range) << ',' << format_double(max_mean_err[1] / mean_range)
          << '\n';
  summary << "variance," << format_double(max_var_err[0] / var_range) << ','
          << format_double(max_var_err[1] / var_range) << '\n';
  summary.close();
  if (!summary) throw Error("failed writing summary.txt");

  std::snprintf(buf, sizeof buf, "max coefficient error: galerkin %.3e, vms %.3e (ratio %.1f)\n", errors[0].max,
                errors[1].max, errors[0].max / errors[1].max);
  log << buf;
}

void cmd_tau_table(const CommandContext& ctx) {
  check_experiment(ctx, "tau-table");
  const RunConfig& cfg = ctx.config;
  struct Row {
    std::string kind;
    double h, beta, kappa;
  };
  std::vector<Row> rows;
  for (double h : cfg.tau_h) {
    for (double beta : cfg.tau_beta) {
      for (double kappa : cfg.tau_kappa) rows.push_back({"grid", h, beta, kappa});
    }
  }
  rows.push_back({"small_peclet_limit", 0.05, 1.0, 1e3});
  rows.push_back({"large_peclet_limit", 0.05, 1.0, 1e-7});

  CsvWriter csv(output_path(ctx, "tau.csv"), header(ctx, "tau-table"),
                {"kind", "h", "beta", "kappa", "peclet", "tau", "tau_quadrature", "quadrature_rel_diff",
                 "small_peclet_limit", "large_peclet_limit", "limit_rel_diff"});
  for (const Row& r : rows) {
    const double t = tau(r.h, r.beta, r.kappa);
    const double tq = tau_by_quadrature(r.h, r.beta, r.kappa);
    const double small = r.h * r.h / (12.0 * r.kappa);
    const double large = r.h / (2.0 * r.beta);
    std::string limit_diff;
    if (r.kind == "small_peclet_limit") limit_diff = format_double(std::abs(t - small) / t);
    if (r.kind == "large_peclet_limit") limit_diff = format_double(std::abs(t - large) / t);
    csv.row({r.kind, format_double(r.h), format_double(r.beta), format_double(r.kappa),
             format_double(peclet(r.h, r.beta, r.kappa)), format_double(t), format_double(tq),
             format_double(std::abs(t - tq) / t), format_double(small), format_double(large), limit_diff});
  }
  csv.close();
  log_of(ctx) << "tau table: " << rows.size() << " rows\n";
}

void cmd_mc_validate(const CommandContext& ctx) {
  check_experiment(ctx, "mc-validate");
  const RunConfig& cfg = ctx.config;
  const AdeProblem problem = make_problem(cfg);
  std::ostream& log = log_of(ctx);
  const Method method = cfg.method == "galerkin" ? Method::galerkin : Method::vms;
  const CoefficientField field = solve_method(problem, method, cfg.memory_cap_mb, log);
  const McEstimate mc = mc_reference(problem, cfg.mc_samples, cfg.seed);
  const std::vector<double> mean = field.mean();
  const std::vector<double> var = field.variance();

  CsvWriter csv(output_path(ctx, "mc.csv"),
                header(ctx, "mc-validate", {"stochastic Galerkin method: " + to_string(method),
                                            "samples = " + std::to_string(mc.samples)}),
                {"x", "mc_mean", "mc_mean_stderr", "mc_variance", "mc_variance_stderr", "sg_mean", "sg_variance",
                 "mean_z"});
  double max_z = 0.0;
  for (std::size_t i = 0; i < mean.size(); ++i) {
    const double z = mc.mean_stderr[i] > 0.0 ? std::abs(mean[i] - mc.mean[i]) / mc.mean_stderr[i]
                                             : (mean[i] == mc.mean[i] ? 0.0 : INFINITY);
    max_z = std::max(max_z, z);
    csv.row({problem.mesh().node(i + 1), mc.mean[i], mc.mean_stderr[i], mc.variance[i], mc.variance_stderr[i], mean[i],
             var[i], z});
  }
  csv.close();
  char buf[128];
  std::snprintf(buf, sizeof buf, "max |sg mean - mc mean| / stderr = %.3f over %zu samples\n", max_z, mc.samples);
  log << buf;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stochastic Galerkin and variational multiscale solver for 1D advection-diffusion"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int threads = 0;
  bool reproducible = false;

  struct Entry {
    const char* name;
    const char* help;
    void (*run)(const CommandContext&);
  };
  const Entry entries[] = {
      {"solve", "Solve with Galerkin and/or VMS and write coefficients and statistics", cmd_solve},
      {"greens-locality", "Sample G(chi) and G'(chi) and report locality diagnostics", cmd_greens_locality},
      {"compare", "Nodal gPC coefficient and statistics errors against a reference", cmd_compare},
      {"convergence", "Run the refinement ladder and freeze its last step as reference", cmd_convergence},
      {"tau-table", "Tabulate tau with the element Green's function cross-check", cmd_tau_table},
      {"mc-validate", "Compare the stochastic Galerkin mean with Monte Carlo", cmd_mc_validate},
  };
  std::vector<CLI::App*> subs;
  CLI::Option* seed_opts[std::size(entries)];
  for (std::size_t k = 0; k < std::size(entries); ++k) {
    CLI::App* sub = app.add_subcommand(entries[k].name, entries[k].help);
    sub->add_option("--config", config_path, "Config file (key = value lines)")->required();
    sub->add_option("--out", out_dir, "Output directory (default $VMSGF_OUT or ./vmsgf_out)");
    seed_opts[k] = sub->add_option("--seed", seed, "Override the config seed");
    sub->add_option("--threads", threads, "OpenMP threads")->check(CLI::PositiveNumber);
    sub->add_flag("--reproducible", reproducible, "Single-threaded dense algebra");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  for (std::size_t k = 0; k < subs.size(); ++k) {
    if (!subs[k]->parsed()) continue;
    try {
      if (threads > 0) omp_set_num_threads(threads);
      if (reproducible) Eigen::setNbThreads(1);
      CommandContext ctx;
      ctx.config = load_config(config_path);
      if (seed_opts[k]->count() > 0) ctx.config.seed = seed;
      if (out_dir.empty()) {
        const char* env = std::getenv("VMSGF_OUT");
        out_dir = env != nullptr && *env != '\0' ? env : "vmsgf_out";
      }
      ctx.out_dir = out_dir;
      ctx.log = &out;
      entries[k].run(ctx);
      return 0;
    } catch (const ConfigError& e) {
      err << "configuration error: " << e.what() << '\n';
      return 2;
    } catch (const ResourceError& e) {
      err << "resource limit: " << e.what() << '\n';
      return 3;
    } catch (const Error& e) {
      err << "error: " << e.what() << '\n';
      return 4;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return 1;
    }
  }
  return 1;
}

}  // namespace vmsgf
