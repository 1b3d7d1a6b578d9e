#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tresca/optimize.hpp"

namespace tresca {

/// Everything a CLI run needs. Parsed from `key = value` lines.
struct RunConfig {
  OptimConfig optim;
  double mesh_a = kEllipseA;
  double mesh_b = 1.0 / kEllipseA;
  int n_theta = 128;
  int n_rings = 32;
  std::string mesh_file;  // empty: generate the ellipse
  /// Classification tolerances relative to max|u| and max g.
  double eps_u = 1e-6;
  double eps_g = 1e-6;
  std::vector<double> fd_t_list{1e-2, 1e-3, 1e-4};
  int snapshot_every = 0;  // 0 disables snapshots
  std::string out_dir = "out";
};

/// Tuned step and Uzawa parameters for a friction scale, and the classical
/// problem whose optimal shape the Tresca one is compared with.
struct Preset {
  double tau;
  double mu;
  double penalty;
  int max_outer;
  std::vector<EnergyKind> comparison;
};
Preset preset_for_beta(double beta);

/// The friction scales the `reproduce` command knows about.
const std::vector<double>& reproduce_betas();

/// Parses config text; `overrides` (same keys) win over the text. Keys not
/// given take the preset of the resolved beta, then the documented defaults.
/// Throws ConfigError naming the key on any problem.
RunConfig parse_config(std::string_view text,
                       const std::map<std::string, std::string>& overrides = {});
RunConfig load_config(const std::filesystem::path& path,
                      const std::map<std::string, std::string>& overrides = {});

/// Every key with its resolved value; parse_config(format_config(c)) == c.
std::string format_config(const RunConfig& config);

std::string to_string(EnergyKind kind);
std::string to_string(GradientForm form);
std::string to_string(CurvatureMethod method);

/// Shortest text that parses back to the same double.
std::string format_double(double x);

}  // namespace tresca
