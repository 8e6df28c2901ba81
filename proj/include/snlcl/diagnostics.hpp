#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "snlcl/flow.hpp"
#include "snlcl/flux.hpp"
#include "snlcl/grid.hpp"
#include "snlcl/solver.hpp"

namespace snlcl {

/// Named results, each tagged with the estimate it mirrors.
class DiagnosticsReport {
 public:
  void add(const std::string& name, const std::string& mirrors, nlohmann::json value);
  bool contains(const std::string& name) const { return doc_.contains(name); }
  const nlohmann::json& operator[](const std::string& name) const { return doc_.at(name).at("value"); }
  const nlohmann::json& document() const noexcept { return doc_; }

 private:
  nlohmann::json doc_ = nlohmann::json::object();
};

/// Empirical orders log(e_l / e_{l+1}) / log(h_l / h_{l+1}) between consecutive levels.
std::vector<double> empirical_orders(std::span<const double> errors, std::span<const double> steps);
/// Least-squares slope of log e against log h.
double fitted_order(std::span<const double> errors, std::span<const double> steps);
bool strictly_decreasing(std::span<const double> values);

// ---------------------------------------------------------------------------
// commutator

/// f(x) = F(t, x, conv(x)) on the nodes of conv's grid.
Field composed_flux(const FluxModel& flux, double t, const Field& conv);

/// R_eps = (f * rho_eps) (u * rho_eps) - (f u) * rho_eps, with f the composed flux and
/// u * rho_eps standing in for the derivative of the mollified primitive.
Field commutator_field(const Field& u, const Field& conv, const FluxModel& flux, double t, double epsilon);

/// Squared discrete L2([0, T] x grid) norm of R_eps over the path's snapshots (left-point in time),
/// one value per width.
std::vector<double> commutator_squares(const PathSolution& sol, const FluxModel& flux,
                                       std::span<const double> epsilons);

struct CommutatorStudy {
  std::vector<double> epsilons;
  /// sqrt of the path mean of the squared norms
  std::vector<double> values;
  std::vector<double> orders;
  double fitted_order = 0.0;
  bool decreasing = false;
  std::size_t n_paths = 0;
};

CommutatorStudy reduce_commutator(std::span<const double> epsilons, std::span<const std::vector<double>> per_path);

// ---------------------------------------------------------------------------
// per-path summaries for ensemble reductions

/// What the ensemble diagnostics keep of one PathSolution.
struct PathSummary {
  std::uint64_t path_index = 0;
  std::vector<double> output_times;
  std::vector<Field> outputs;
  std::vector<double> l2_squared;
  /// 1/J at every node, per output time
  std::vector<std::vector<double>> inverse_jacobians;
  double mass_drift = 0.0;
  std::vector<double> iterate_mass_drift;
  double min_value = 0.0;
  double min_jacobian = 1.0;
  std::size_t boundary_excursions = 0;
  int iterations_used = 0;
  bool converged = false;
  std::vector<double> distances;
  /// sup slope |du/dx| at every path time
  std::vector<double> max_slope;
  /// filled when the matching EnsembleHooks entry is set
  std::vector<double> commutator_squares;
  std::optional<double> residual;
};

/// Optional per-path work done while the full solution is still alive.
struct EnsembleHooks {
  std::vector<double> commutator_eps;
  std::optional<BumpKernel> test_function;
};

PathSummary summarize(const PathSolution& sol, const FluxModel& flux, const EnsembleHooks& hooks = {});

/// Mass identity and the L2 bound E|u(t)|^2 <= max_x E[1/J](t, x) |u0|^2 checked per output time.
struct BoundsReport {
  std::vector<double> times;
  std::vector<double> mean_l2_squared;
  std::vector<double> std_error;
  std::vector<double> moment_max;
  std::vector<double> moment_max_std_error;
  std::vector<double> bound;
  /// true where mean <= bound + 3 standard errors
  std::vector<bool> within;
  double initial_l2_squared = 0.0;
  double max_mass_drift = 0.0;
  double min_value = 0.0;
  double min_jacobian = 1.0;
  std::size_t boundary_excursions = 0;
  std::size_t n_paths = 0;

  bool all_within() const;
};

BoundsReport track_bounds(std::span<const PathSummary> ensemble, const Field& u0);

/// Sample mean and standard error of a scalar over paths.
struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};
MeanEstimate mean_estimate(std::span<const double> samples);

// ---------------------------------------------------------------------------
// ensemble drivers; paths are sampled on `fine_times` and restricted per config

/// Every config's time grid must be nested in fine_times.
std::vector<BrownianPath> shared_paths(std::uint64_t seed, std::size_t n_paths, std::span<const double> fine_times);
BrownianPath restrict_path(const BrownianPath& fine, const SolverConfig& cfg);

struct EnsembleResult {
  std::vector<PathSummary> paths;
  BoundsReport bounds;
  Field initial;
};

/// Picard solves for paths [0, n_paths) of `seed`.
EnsembleResult run_ensemble(const SolverConfig& cfg, std::uint64_t seed, std::size_t n_paths,
                            const EnsembleHooks& hooks = {}, unsigned threads = 0);

/// max_x E[1/J(T, x)] per flux width, all other settings fixed.
struct MomentStability {
  std::vector<double> epsilons;
  std::vector<double> max_moment;
  std::vector<double> max_std_error;
  /// largest over smallest of max_moment
  double ratio = 0.0;
  /// the same quantity with the flux switched off; exactly one
  double control_max = 0.0;
  double control_min = 0.0;
  double control_std_error = 0.0;
  std::size_t n_paths = 0;
};

MomentStability moment_stability(const SolverConfig& cfg, std::span<const double> epsilons, std::uint64_t seed,
                                 std::size_t n_paths, unsigned threads = 0);

/// sup over shared output times of |u_A - u_B|_1, compared on the coarser spatial grid.
double solution_distance(const PathSolution& a, const PathSolution& b);

struct UniquenessStudy {
  /// d_l between level l and level l + 1, averaged over paths
  std::vector<double> distances;
  std::vector<double> std_errors;
  std::vector<double> orders;
  bool decreasing = false;
  std::size_t n_paths = 0;
  std::string note;
};

/// Configs ordered coarse to fine; all share u0, flux, kernel and horizon and have nested time grids.
UniquenessStudy uniqueness_proxy(std::span<const SolverConfig> ladder, std::uint64_t seed, std::size_t n_paths,
                                 unsigned threads = 0);

/// sup_x |u(t, x) - u0(x - c t - B_t)| over the output times, against the unmollified datum.
double translation_error(const PathSolution& sol, const InitialDatum& initial, double speed);

struct ConvergenceLevel {
  double dx = 0.0;
  double dt = 0.0;
  double eps_flux = 0.0;
  double eps_initial = 0.0;
  double max_mass_drift = 0.0;
  double translation_error = 0.0;
  double marching_gap = 0.0;
  double residual_rms = 0.0;
  std::size_t boundary_excursions = 0;
};

struct ConvergenceOptions {
  /// drift speed for the translation oracle; unset for fluxes without one
  std::optional<double> translation_speed;
  bool marching_gap = true;
  std::optional<BumpKernel> test_function;
};

struct ConvergenceStudy {
  std::vector<ConvergenceLevel> levels;
  std::vector<double> translation_orders;
  std::vector<double> gap_orders;
  double translation_fitted_order = 0.0;
  double gap_fitted_order = 0.0;
  bool residual_decreasing = false;
  std::size_t n_paths = 0;
};

ConvergenceStudy convergence_study(std::span<const SolverConfig> ladder, const ConvergenceOptions& options,
                                   std::uint64_t seed, std::size_t n_paths, unsigned threads = 0);

/// Growth of sup |du/dx| along one path: ratio of the largest value before T to the initial one.
struct SteepeningReport {
  std::vector<double> times;
  std::vector<double> max_slope;
  double growth = 0.0;
  double time_of_max = 0.0;
  bool completed = true;
  std::string failure;
};

SteepeningReport burgers_steepening(const SolverConfig& cfg, std::uint64_t seed, std::uint64_t path_index = 0);

/// JSON views of the study results.
nlohmann::json describe(const CommutatorStudy& s);
nlohmann::json describe(const BoundsReport& s);
nlohmann::json describe(const MomentStability& s);
nlohmann::json describe(const UniquenessStudy& s);
nlohmann::json describe(const ConvergenceStudy& s);
nlohmann::json describe(const SteepeningReport& s);
nlohmann::json describe(const HypothesisReport& s);

}  // namespace snlcl
