#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "snlcl/brownian.hpp"
#include "snlcl/flow.hpp"
#include "snlcl/flux.hpp"
#include "snlcl/grid.hpp"
#include "snlcl/kernels.hpp"

namespace snlcl {

/// Analytic initial datum; compactly supported and C-infinity.
struct InitialDatum {
  enum class Shape { bump, plateau };

  Shape shape = Shape::bump;
  double center = 0.0;
  /// support radius of the bump, or plateau half-width measured at half height
  double radius = 2.0;
  /// total mass of the bump, or plateau height
  double scale = 1.0;
  /// width of each plateau ramp
  double ramp = 0.5;

  double operator()(double x) const;
  double support_lo() const;
  double support_hi() const;
};

/// C-infinity step: 0 for s <= 0, 1 for s >= 1, with S(s) + S(1 - s) = 1.
double smooth_step(double s);

struct SolverConfig {
  Grid grid{-8.0, 8.0, 1024};
  std::vector<double> times = uniform_time_grid(0.5, 256);
  BumpKernel kernel{0.0, 0.5};
  FluxModel flux = make_builtin("zero_flux");
  InitialDatum initial;
  double eps_flux = 0.125;
  double eps_initial = 0.0625;
  double picard_tol = 1e-6;
  int picard_max_iters = 25;
  /// indices into times; empty means only the final time
  std::vector<std::size_t> output_indices;

  /// Every violated constraint (resolution, step rule, ranges), empty when valid.
  std::vector<std::string> violations() const;
  void validate() const;
  std::vector<std::size_t> outputs() const;
};

/// Largest admissible step 0.5 / sup|d/dx drift| from the a-priori bounds
/// |K*u| <= |K|_inf |u0|_1 and |(K*u)'| <= |K'|_inf |u0|_1.
double max_stable_step(const SolverConfig& cfg);

struct PathSolution {
  BrownianPath path;
  /// u(t_k) at every path time
  std::vector<Field> snapshots;
  /// (K * u)(t_k), recomputed from the returned snapshots
  std::vector<Field> conv_history;
  std::vector<std::size_t> output_indices;
  /// X_{0,t} for each output index
  std::vector<FlowMap> flows;
  std::vector<Norms> snapshot_norms;

  int iterations_used = 0;
  bool converged = false;
  /// sup over output times of ||u^{n+1} - u^n||_1, one entry per sweep after the first
  std::vector<double> distances;
  /// max over times of | |u^n(t)|_1 / |u_0|_1 - 1 |, one entry per sweep
  std::vector<double> iterate_mass_drift;
  double min_value = 0.0;
  double initial_mass = 0.0;
  std::size_t boundary_excursions = 0;

  double mass_drift() const { return iterate_mass_drift.empty() ? 0.0 : iterate_mass_drift.back(); }
};

/// The regularized initial datum u0 * rho_eps on the configured grid.
Field regularized_initial(const SolverConfig& cfg);

/// Picard sweeps: freeze K * u^n over the whole horizon, run the characteristics,
/// and set u^{n+1}(t) = u0_eps(Y_t) dY_t/dx. Sweep 1 freezes K * u0_eps.
PathSolution solve_picard(const SolverConfig& cfg, const BrownianPath& path);

/// Single pass in time. The drift over [t_k, t_{k+1}] uses K * u(t_{k-1}) (K * u0 for the
/// first step), i.e. the nonlocal term lags by one step instead of one sweep.
PathSolution solve_marching(const SolverConfig& cfg, const BrownianPath& path);

struct WeakResidual {
  BumpKernel test_function;
  std::vector<double> times;
  std::vector<double> values;
  /// residual after every path step
  std::vector<double> series;

  double final_value() const { return values.empty() ? 0.0 : values.back(); }
};

/// Residual of the Ito weak form
///   <u(t),phi> - <u0,phi> - int <u F, phi'> ds - int <u, phi'> dB - 1/2 int <u, phi''> ds
/// with left-point sums, F evaluated at z = (K * u)(s, x).
WeakResidual weak_residual(const PathSolution& sol, const BumpKernel& phi, const FluxModel& flux);

}  // namespace snlcl
