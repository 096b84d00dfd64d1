#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "vmsgf/problem.hpp"

namespace vmsgf {

/// Effective run configuration. The text format is one `key = value` per
/// line; `#` starts a comment; `region` may repeat. When a file contains
/// lines starting with "# cfg ", only those lines are read, so every output
/// file can be fed back as a config.
struct RunConfig {
  double length = 1.0;
  double kappa = 1e-3;
  double source = 1.0;
  int n_el = 20;
  int p = 2;
  int q = 0;  // 0: highest region coordinate
  std::string method = "both";  // galerkin | vms | both
  std::string experiment;       // optional; must match the command when set
  std::vector<Region> regions;
  std::vector<double> xi_realization;  // default 0.5 in every coordinate

  std::string ladder = "20:2, 40:3, 80:4, 160:5, 320:6";
  std::string ladder_method = "galerkin";
  std::string reference;  // reference_solution.csv for compare

  double source_x = 0.125;
  std::vector<double> source_profile = {1.0, 1.0, 1.0};
  int greens_xi_nodes = 64;

  std::vector<double> tau_h = {0.01, 0.05, 0.1};
  std::vector<double> tau_beta = {1.0, 1.5, 2.0};
  std::vector<double> tau_kappa = {1e-4, 1e-3, 1e-2, 1e-1};

  std::size_t mc_samples = 10000;
  std::uint64_t seed = 20240607;
  double memory_cap_mb = 4096.0;

  int effective_q() const;
  std::vector<double> effective_xi() const;
};

RunConfig parse_config(const std::string& text, const std::string& origin = "config");
RunConfig load_config(const std::string& path);
/// Canonical `key = value` lines covering every field.
std::vector<std::string> render_config(const RunConfig& config);

/// Validated problem on the configured (n_el, p).
AdeProblem make_problem(const RunConfig& config);

}  // namespace vmsgf
