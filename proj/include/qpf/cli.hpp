#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qpf/potential.hpp"
#include "qpf/series.hpp"
#include "qpf/thermal.hpp"

namespace qpf::cli {

enum ExitCode : int { kOk = 0, kFailed = 1, kConfigError = 2, kInternalError = 3 };

/// Everything one run needs, read from a flat "key = value" file.
struct RunConfig {
  SystemParams system;
  std::string potential = "zero";  // zero | gaussian | table
  double strength = 0.0;           // g
  double range = 1.0;              // a
  std::string potential_table;     // resolved path
  TruncationPolicy policy;
  int max_particles = kDefaultMaxParticles;

  std::vector<int> m_list = {8, 16, 32, 64};
  int ed_cutoff = 32;
  int discrete_z_cutoff = 8;
  std::optional<int> matrix_m;
  std::optional<double> tol;

  std::string out;  // JSON report path; empty for none
};

/// Parses key/value text. Relative table paths resolve against base_dir.
/// Throws ConfigError whose message starts with the offending key.
RunConfig parse_config(std::istream& in, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

/// Checks cross-field rules and module preconditions; throws ConfigError.
void validate(const RunConfig& config);

DualPotential make_potential(const RunConfig& config);

int cmd_evaluate(const RunConfig& config, std::ostream& out);
int cmd_oracle(const RunConfig& config, const std::string& which, std::ostream& out);
int cmd_graph_validate(const std::string& path, std::ostream& out);
int cmd_unity_check(int n, std::ostream& out);
int cmd_theta(double c, int dim, double tol, std::ostream& out);

/// Full command line; returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace qpf::cli
