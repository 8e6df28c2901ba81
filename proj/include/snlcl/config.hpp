#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "snlcl/flux.hpp"
#include "snlcl/solver.hpp"

namespace snlcl {

/// One experiment as read from an INI-style document.
///
///   [experiment]  preset name paths seed threads diagnostics
///   [grid]        x_min x_max n_cells
///   [time]        horizon n_steps outputs
///   [flux]        model amplitude speed half_width step_width bump_radius
///   [kernel]      radius
///   [initial]     shape center radius scale ramp
///   [regularization] eps_flux eps_initial
///   [picard]      tol max_iters
///   [diagnostics] commutator_eps_dx moment_eps_dx test_center test_radius
///   [ladder]      levels kind paths
///   [output]      dir
struct ExperimentConfig {
  std::string name = "experiment";
  std::string preset;
  std::string summary;
  bool demo_only = false;

  double x_min = -8.0;
  double x_max = 8.0;
  std::size_t n_cells = 1024;
  double horizon = 0.5;
  std::size_t n_steps = 256;
  /// empty means the final time only
  std::vector<double> output_times;

  std::string flux_model = "zero_flux";
  FluxParams flux_params;
  double kernel_radius = 0.5;
  InitialDatum initial;
  double eps_flux = 0.125;
  double eps_initial = 0.0625;
  double picard_tol = 1e-6;
  int picard_max_iters = 25;

  std::size_t n_paths = 64;
  std::uint64_t seed = 20240601;
  unsigned threads = 0;
  /// extra diagnostics beyond the invariants: hypothesis moments commutator residual
  /// uniqueness convergence steepening
  std::vector<std::string> diagnostics;

  std::vector<double> commutator_eps_dx{32.0, 16.0, 8.0};
  std::vector<double> moment_eps_dx{8.0, 16.0, 32.0};
  double test_center = 0.0;
  double test_radius = 3.0;

  std::size_t ladder_levels = 3;
  /// "regularization" halves both widths on a fixed grid; "resolution" halves dx, dt and the widths
  std::string ladder_kind = "regularization";
  std::size_t ladder_paths = 16;

  std::string out_dir = "out";

  double dx() const { return (x_max - x_min) / static_cast<double>(n_cells); }
  std::vector<std::string> violations() const;
};

/// Parses the document, applies preset defaults first when `preset` is given, and
/// throws ConfigError listing every problem found.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

struct PresetInfo {
  std::string name;
  std::string summary;
  bool demo_only = false;
};

std::vector<PresetInfo> presets();
ExperimentConfig preset(const std::string& name);

/// Known diagnostic names.
const std::vector<std::string>& diagnostic_names();

SolverConfig to_solver_config(const ExperimentConfig& cfg);

/// Ladder of solver configs, coarsest first, whose last level is the experiment itself.
std::vector<SolverConfig> ladder_configs(const ExperimentConfig& cfg, const std::string& kind);

nlohmann::json to_json(const ExperimentConfig& cfg);

}  // namespace snlcl
