#pragma once

#include <concepts>
#include <cstddef>
#include <vector>

#include "snlcl/grid.hpp"

namespace snlcl {

/// Integral of exp(-1/(1-s^2)) over (-1, 1).
inline constexpr double kBumpMass = 0.443993816168079437823048921171;

/// Unnormalized bump exp(-1/(1-s^2)) on |s| < 1, zero elsewhere.
double bump_profile(double s) noexcept;
double bump_profile_d1(double s) noexcept;
double bump_profile_d2(double s) noexcept;

/// Normalized C0-infinity bump centred at `center` with support radius `radius`.
class BumpKernel {
 public:
  BumpKernel(double center, double radius);

  double center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }
  double normalization() const noexcept { return normalization_; }
  double support_lo() const noexcept { return center_ - radius_; }
  double support_hi() const noexcept { return center_ + radius_; }

  double operator()(double x) const noexcept;
  double derivative(double x) const noexcept;
  double second_derivative(double x) const noexcept;
  /// sup |K'|, attained at the inflection of the profile.
  double max_slope() const noexcept;
  double max_value() const noexcept;

 private:
  double center_;
  double radius_;
  double normalization_;
};

/// Symmetric mollifier rho_eps(x) = rho(x/eps)/eps built on the same profile.
class Mollifier {
 public:
  explicit Mollifier(double epsilon);

  double epsilon() const noexcept { return epsilon_; }
  double support_lo() const noexcept { return -epsilon_; }
  double support_hi() const noexcept { return epsilon_; }
  double operator()(double x) const noexcept;

 private:
  double epsilon_;
};

template <class K>
concept SupportedKernel = requires(const K& k, double x) {
  { k(x) } -> std::convertible_to<double>;
  { k.support_lo() } -> std::convertible_to<double>;
  { k.support_hi() } -> std::convertible_to<double>;
};

/// Kernel samples at lattice offsets m*dx, rescaled to unit lattice sum.
struct DiscreteKernel {
  std::ptrdiff_t first_offset = 0;
  std::vector<double> weights;  // weights[k] multiplies f(x - (first_offset + k) dx)
  double dx = 0.0;
  /// Lattice sum of the raw samples times dx, before rescaling.
  double raw_mass = 0.0;

  std::ptrdiff_t last_offset() const noexcept {
    return first_offset + static_cast<std::ptrdiff_t>(weights.size()) - 1;
  }
};

/// Throws ResolutionError when the support radius is below dx.
template <SupportedKernel K>
DiscreteKernel discretize(const K& kernel, double dx);

/// Trapezoid quadrature of (k * f)(x_i), f extended by zero outside the grid.
Field convolve(const Field& f, const DiscreteKernel& kernel);

template <SupportedKernel K>
Field convolve(const Field& f, const K& kernel) {
  return convolve(f, discretize(kernel, f.grid().dx()));
}

}  // namespace snlcl

#include "snlcl/kernels_impl.hpp"
