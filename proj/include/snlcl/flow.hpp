#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "snlcl/brownian.hpp"
#include "snlcl/flux.hpp"
#include "snlcl/grid.hpp"

namespace snlcl {

/// Positions X_{s,t}(x_i) and Jacobians dX/dx of the characteristics started at the grid nodes.
struct FlowMap {
  Grid grid;
  double start_time = 0.0;
  double end_time = 0.0;
  std::vector<double> positions;
  std::vector<double> jacobians;
  std::size_t boundary_excursions = 0;

  double origin(std::size_t i) const noexcept { return grid.node(static_cast<std::ptrdiff_t>(i)); }
};

/// Euler-Maruyama integrator for dX = F_eps(t, X, conv(t, X)) dt + dB with the
/// multiplicative Jacobian update J <- J (1 + d/dx[F_eps(t, ., conv)](X) dt).
///
/// Particles that leave the grid keep moving; their drift is evaluated from the
/// mollified flux with the nonlocal argument set to zero (the convolution is
/// zero-extended), and each step spent outside counts as a boundary excursion
/// when the particle is marked active.
class FlowIntegrator {
 public:
  FlowIntegrator(const Grid& grid, double start_time, std::vector<char> active = {});

  /// One step of length dt driven by the Brownian increment dB. Throws StepSizeError
  /// if a Jacobian becomes non-positive or particle order is lost.
  void advance(const RegularizedFlux& flux, const DriftField& field, double dt, double dB);

  double time() const noexcept { return time_; }
  std::span<const double> positions() const noexcept { return positions_; }
  std::span<const double> jacobians() const noexcept { return jacobians_; }
  std::size_t boundary_excursions() const noexcept { return excursions_; }
  FlowMap snapshot() const;

 private:
  Grid grid_;
  double start_time_;
  double time_;
  std::vector<double> positions_;
  std::vector<double> jacobians_;
  std::vector<char> active_;
  std::size_t excursions_ = 0;
};

/// conv_history holds one field (held constant) or one field per path time.
using FlowObserver = std::function<void(std::size_t step_index, const FlowIntegrator&)>;

FlowMap forward_flow(const RegularizedFlux& flux, std::span<const Field> conv_history, const BrownianPath& path,
                     std::size_t start_index, std::size_t end_index, std::vector<char> active = {},
                     const FlowObserver& observer = {});

/// Y_{s,t} = X_{s,t}^{-1} by monotone piecewise-linear inversion of i -> X_i.
class InverseFlow {
 public:
  explicit InverseFlow(const FlowMap& map);

  struct Preimage {
    double position = 0.0;
    /// d/dx Y_{s,t}(x); equals 1/J_i at x = X_i
    double jacobian = 1.0;
    bool inside = true;
  };

  /// Queries outside [X_0, X_N] are clamped to the end particle and counted.
  Preimage operator()(double x, ExcursionCounter* excursions = nullptr) const;

 private:
  const FlowMap* map_;
};

/// u(x) = u0(Y(x)) * dY/dx(x) at the nodes of u0's grid. Excursions are counted
/// only where the clamped preimage carries non-zero data.
Field push_forward(const Field& u0, const FlowMap& map, double time_tag, ExcursionCounter* excursions = nullptr);
Field push_forward(const Field& u0, std::span<const double> positions, std::span<const double> jacobians,
                   double time_tag, ExcursionCounter* excursions = nullptr);

/// Integrates Y_{r,t}(x) = x - int_r^t b(r', Y) dr' - (B_t - B_r) backwards from end_index to start_index.
std::vector<double> backward_flow(const RegularizedFlux& flux, std::span<const Field> conv_history,
                                  const BrownianPath& path, std::size_t start_index, std::size_t end_index,
                                  std::span<const double> queries);

/// Per-node Monte Carlo estimate of E[1 / dX/dx] with its standard error.
struct MomentField {
  Field mean;
  std::vector<double> std_error;
  std::size_t n_paths = 0;

  double max_mean() const;
  std::size_t argmax() const;
};

MomentField jacobian_inverse_moment(std::span<const FlowMap> ensemble);
/// Same estimator fed with precomputed 1/J vectors, one per path.
MomentField inverse_moment_from_samples(const Grid& grid, std::span<const std::vector<double>> inverse_jacobians);

}  // namespace snlcl
