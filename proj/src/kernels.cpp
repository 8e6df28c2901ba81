#include "snlcl/kernels.hpp"

#include <cmath>

namespace snlcl {

namespace {

// max |d/ds exp(-1/(1-s^2))|, attained at s = 0.75983568565159...
constexpr double kProfileMaxSlope = 0.798429751833599544169527424669;

}  // namespace

double bump_profile(double s) noexcept {
  const double q = 1.0 - s * s;
  return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
}

double bump_profile_d1(double s) noexcept {
  const double q = 1.0 - s * s;
  if (q <= 0.0) return 0.0;
  return std::exp(-1.0 / q) * (-2.0 * s / (q * q));
}

double bump_profile_d2(double s) noexcept {
  const double q = 1.0 - s * s;
  if (q <= 0.0) return 0.0;
  const double q2 = q * q;
  return std::exp(-1.0 / q) * (4.0 * s * s / (q2 * q2) - 2.0 / q2 - 8.0 * s * s / (q2 * q));
}

BumpKernel::BumpKernel(double center, double radius) : center_(center), radius_(radius), normalization_(0.0) {
  if (!std::isfinite(center) || !(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidArgument("bump kernel requires finite center and radius > 0");
  }
  normalization_ = 1.0 / (radius_ * kBumpMass);
}

double BumpKernel::operator()(double x) const noexcept {
  return normalization_ * bump_profile((x - center_) / radius_);
}

double BumpKernel::derivative(double x) const noexcept {
  return normalization_ / radius_ * bump_profile_d1((x - center_) / radius_);
}

double BumpKernel::second_derivative(double x) const noexcept {
  return normalization_ / (radius_ * radius_) * bump_profile_d2((x - center_) / radius_);
}

double BumpKernel::max_slope() const noexcept { return normalization_ / radius_ * kProfileMaxSlope; }

double BumpKernel::max_value() const noexcept { return normalization_ * std::exp(-1.0); }

Mollifier::Mollifier(double epsilon) : epsilon_(epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InvalidArgument("mollifier requires epsilon > 0");
}

double Mollifier::operator()(double x) const noexcept {
  return bump_profile(x / epsilon_) / (epsilon_ * kBumpMass);
}

Field convolve(const Field& f, const DiscreteKernel& kernel) {
  const Grid& g = f.grid();
  if (std::abs(kernel.dx - g.dx()) > 1e-12 * g.dx()) {
    throw InvalidArgument("discrete kernel spacing does not match the field grid");
  }
  const auto n = static_cast<std::ptrdiff_t>(g.n_nodes());
  const auto src = f.values();
  // trapezoid end weights folded into a local copy
  std::vector<double> data(src.begin(), src.end());
  data.front() *= 0.5;
  data.back() *= 0.5;

  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  const std::ptrdiff_t m0 = kernel.first_offset;
  const auto width = static_cast<std::ptrdiff_t>(kernel.weights.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    // source index j = i - m must lie in [0, n)
    const std::ptrdiff_t k_lo = std::max<std::ptrdiff_t>(0, i - (n - 1) - m0);
    const std::ptrdiff_t k_hi = std::min<std::ptrdiff_t>(width - 1, i - m0);
    double acc = 0.0;
    for (std::ptrdiff_t k = k_lo; k <= k_hi; ++k) {
      acc += kernel.weights[static_cast<std::size_t>(k)] * data[static_cast<std::size_t>(i - m0 - k)];
    }
    out[static_cast<std::size_t>(i)] = acc;
  }
  return Field(g, std::move(out), f.time_tag());
}

}  // namespace snlcl
