#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "nullflow/background.hpp"
#include "nullflow/field.hpp"
#include "nullflow/flow.hpp"
#include "nullflow/grid.hpp"

namespace nullflow {

/// Flat key -> value view of a configuration: `[section]` headers prefix the
/// keys that follow ("section.key"). Values are kept as written.
using ConfigKeys = std::map<std::string, std::string>;

/// Parses structured config text: `[section]` lines, `key = value` lines,
/// `#` comments, blank lines. FormatError on malformed syntax; duplicate keys
/// are rejected.
ConfigKeys parse_config_text(const std::string& text);

/// Reads and parses a config file (FormatError on I/O problems).
ConfigKeys read_config_file(const std::string& path);

/// Applies one `section.key=value` command-line override (FormatError if the
/// assignment is malformed; overrides may add keys or replace file values).
void apply_override(ConfigKeys& keys, const std::string& assignment);

/// A fully validated run description. Every field has a default, so an empty
/// key set is a valid (Schwarzschild) run.
struct RunConfig {
  // Background geometry.
  std::string background_model = "schwarzschild";  ///< minkowski|schwarzschild|shear-free|file
  double background_mass = 1.0;
  double background_r0 = 1.0;
  double background_extent = 3.0;
  std::size_t background_slices = 301;
  std::string background_path;       ///< tabulated input (model = file)
  std::string background_trk0 = "2"; ///< initial expansion expression (model = shear-free)
  double background_g_kk = 0.0;      ///< constant curvature source (model = shear-free)

  // Sphere lattice.
  GridMode grid_mode = GridMode::Axisymmetric;
  std::size_t grid_n_theta = 128;
  std::size_t grid_n_phi = 1;

  // Generator rescaling.
  double gauge_v0 = 0.5;

  // Flow.
  std::string flow_omega0 = "3";  ///< initial surface expression
  std::string flow_omega0_path;   ///< or a snapshot file
  std::string flow_resume_from;   ///< or a snapshot with time/step metadata
  double flow_eps_mots = 1e-6;
  double flow_cfl = 0.2;
  double flow_dt_fixed = 0.0;
  double flow_dt_min = 1e-10;
  double flow_max_time = 100.0;
  double flow_cadence = 0.0;  ///< history frame spacing (0 = no history)

  // Foliation gluing.
  double foliation_level = 3.0;
  double foliation_collar = 0.2;
  double foliation_width = 0.05;
  double foliation_sigma_spacing = 0.05;

  // Check tolerances.
  double check_gauge_tolerance = 1e-8;
  double check_energy_tolerance = 0.0;

  // Outputs.
  std::string output_dir = "out";
};

/// Validates and converts the key set; all problems are reported together in
/// one ConfigError (unknown keys included).
RunConfig make_run_config(const ConfigKeys& keys);

/// One `key = value` line per field, sorted by key; doubles printed with the
/// shortest round-tripping decimal. parse -> dump is idempotent.
std::string canonical_dump(const RunConfig& config);

/// 16-hex-digit FNV-1a fingerprint of the canonical dump.
std::string config_fingerprint(const RunConfig& config);

/// File + overrides in one step (empty path = defaults plus overrides).
RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides);

// Builders used by the command line layer and the tests.
SphereGrid make_grid(const RunConfig& config);
BackgroundFoliation make_background(const RunConfig& config);
/// Initial surface from the configured expression or snapshot file (the
/// resume path is handled by the caller, which also needs the time stamp).
ScalarField make_omega0(const RunConfig& config, const SphereGrid& grid);
FlowConfig make_flow_config(const RunConfig& config);

}  // namespace nullflow
