#pragma once

#include <ostream>
#include <string>

#include "vmsgf/config.hpp"
#include "vmsgf/sgfem.hpp"

namespace vmsgf {

struct CommandContext {
  RunConfig config;
  std::string out_dir;
  std::ostream* log = nullptr;
};

void cmd_solve(const CommandContext& ctx);
void cmd_greens_locality(const CommandContext& ctx);
void cmd_convergence(const CommandContext& ctx);
void cmd_compare(const CommandContext& ctx);
void cmd_tau_table(const CommandContext& ctx);
void cmd_mc_validate(const CommandContext& ctx);

/// Writes the coefficients of a field with a header describing its mesh and
/// basis; read back by `read_coefficient_field`.
void write_coefficient_field(const std::string& path, const std::vector<std::string>& header,
                             const CoefficientField& field);
CoefficientField read_coefficient_field(const std::string& path);

/// Column label of a multi-index, e.g. c_1_0.
std::string mode_label(const MultiIndex& index);

/// Command-line entry point; returns the process exit code.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace vmsgf
