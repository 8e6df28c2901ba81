#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "snlcl/grid.hpp"
#include "snlcl/kernels.hpp"

namespace snlcl {

using ScalarFn = std::function<double(double)>;
using FluxFn = std::function<double(double t, double x, double z)>;

/// F(t, x, z) = a(t) * b(x) * g(z), with the derivatives the estimates need.
struct SeparableParts {
  ScalarFn time = [](double) { return 1.0; };
  ScalarFn time_rate = [](double) { return 0.0; };
  ScalarFn space;
  ScalarFn z = [](double) { return 1.0; };
  ScalarFn z_slope = [](double) { return 0.0; };
  ScalarFn z_curvature = [](double) { return 0.0; };
};

struct FluxTraits {
  bool spatially_smooth = true;
  /// false when F does not depend on its nonlocal argument z
  bool nonlocal = true;
  bool demo_only = false;
  /// pointwise evaluation is only meaningful after mollification in x
  bool requires_regularization = false;
  /// x-locations of jump discontinuities
  std::vector<double> jumps;
};

/// Flux F(t, x, z) with analytic partials F1 = dF/dt, F3 = dF/dz, F33 = d2F/dz2.
class FluxModel {
 public:
  static FluxModel separable(std::string name, SeparableParts parts, FluxTraits traits = {});
  static FluxModel general(std::string name, FluxFn f, FluxFn f_t, FluxFn f_z, FluxFn f_zz, FluxTraits traits = {});

  const std::string& name() const noexcept { return name_; }
  const FluxTraits& traits() const noexcept { return traits_; }
  bool spatially_smooth() const noexcept { return traits_.spatially_smooth; }
  bool nonlocal() const noexcept { return traits_.nonlocal; }
  const std::optional<SeparableParts>& parts() const noexcept { return parts_; }

  double operator()(double t, double x, double z) const { return f_(t, x, z); }
  double dt(double t, double x, double z) const { return f_t_(t, x, z); }
  double dz(double t, double x, double z) const { return f_z_(t, x, z); }
  double dzz(double t, double x, double z) const { return f_zz_(t, x, z); }

 private:
  FluxModel() = default;

  std::string name_;
  FluxFn f_, f_t_, f_z_, f_zz_;
  std::optional<SeparableParts> parts_;
  FluxTraits traits_;
};

/// Node tables of the characteristic drift x -> F_eps(t, x, conv(x)) and its total x-derivative.
struct DriftField {
  double time = 0.0;
  std::vector<double> drift;
  std::vector<double> rate;
};

/// F_eps(t, x, z) = (F *_x rho_eps)(t, x, z), the x-convolution done by lattice quadrature.
///
/// The quadrature nodes are the (infinite) lattice x_min + j dx of the
/// tabulation grid, so grids placed off the jump locations never sample a
/// discontinuity. Weights are renormalized pointwise, which makes constant
/// fluxes exact. Separable models get their mollified spatial factor
/// tabulated once at construction.
class RegularizedFlux {
 public:
  RegularizedFlux(FluxModel base, double epsilon, Grid grid);

  const FluxModel& base() const noexcept { return base_; }
  double epsilon() const noexcept { return epsilon_; }
  const Grid& grid() const noexcept { return grid_; }

  double value(double t, double x, double z) const;
  /// Mollified F3.
  double dz(double t, double x, double z) const;
  /// Central difference of value() in x with step dx.
  double dx(double t, double x, double z) const;

  /// Drift and total spatial derivative at every node, using conv for the nonlocal argument.
  DriftField drift_field(double t, const Field& conv) const;
  void drift_field(double t, const Field& conv, DriftField& out) const;

  /// Upper bound for sup_x |d/dx F_eps(t, x, conv(x))| over t in [0, horizon],
  /// |z| <= z_bound and |conv'| <= slope_bound.
  double max_rate(double horizon, double z_bound, double slope_bound) const;

 private:
  template <class Sampler>
  double lattice_average(double x, Sampler&& sample) const;

  FluxModel base_;
  double epsilon_;
  Grid grid_;
  Mollifier mollifier_;
  DiscreteKernel weights_;
  // mollified spatial factor on nodes -1 .. n_nodes (separable models only)
  std::vector<double> space_table_;
};

/// d/dx [F_eps(t, ., conv(.))](x) = dF_eps/dx + F3_eps * conv'(x), both by central differences.
double total_spatial_derivative(const RegularizedFlux& flux, double t, double x, const Field& conv);

struct HypothesisBox {
  double t_min = 0.0, t_max = 1.0;
  double x_min = -1.0, x_max = 1.0;
  double z_min = -1.0, z_max = 1.0;
};

struct HypothesisResolution {
  std::size_t n_t = 9;
  std::size_t n_x = 2049;
  std::size_t n_z = 65;
};

struct NonFiniteSample {
  std::string quantity;
  double t = 0.0, x = 0.0, z = 0.0;
};

/// Sampled estimates of the five flux norms the existence and uniqueness estimates depend on.
struct HypothesisReport {
  double flux_l1_sup = 0.0;      // sup_t int_x sup_z |F|
  double flux_sup = 0.0;         // sup |F|
  double time_rate_l1_sup = 0.0; // sup_t int_x sup_z |F1|
  double z_slope_sup = 0.0;      // sup |F3|
  double z_curv_l2_l1_sup = 0.0; // ( int_t (int_x sup_z |F33|)^2 )^(1/2)
  HypothesisResolution resolution;
  HypothesisBox box;
  std::optional<NonFiniteSample> non_finite;

  bool all_finite() const noexcept;
};

HypothesisReport verify_hypothesis(const FluxModel& flux, const HypothesisBox& box,
                                   const HypothesisResolution& resolution = {});

struct FluxParams {
  double amplitude = 1.0;
  /// speed of constant_drift
  double speed = 1.0;
  /// half-width of the compact support of irregular models
  double half_width = 1.0;
  /// width of the smoothed step in linear_irregular
  double step_width = 0.05;
  /// support radius of the bump in smooth_nonlocal
  double bump_radius = 2.0;
};

struct ModelInfo {
  std::string name;
  std::string summary;
  bool demo_only = false;
};

/// zero_flux, constant_drift, linear_irregular, discontinuous_flux, smooth_nonlocal, burgers_like.
std::vector<ModelInfo> builtin_models();
FluxModel make_builtin(const std::string& name, const FluxParams& params = {});

}  // namespace snlcl
