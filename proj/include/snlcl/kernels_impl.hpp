#pragma once

#include <cmath>
#include <string>

#include "snlcl/errors.hpp"

namespace snlcl {

template <SupportedKernel K>
DiscreteKernel discretize(const K& kernel, double dx) {
  const double lo = kernel.support_lo();
  const double hi = kernel.support_hi();
  if (!(dx > 0.0)) throw InvalidArgument("discretize requires dx > 0");
  if (0.5 * (hi - lo) < dx) {
    throw ResolutionError("kernel radius " + std::to_string(0.5 * (hi - lo)) + " is below grid spacing " +
                          std::to_string(dx));
  }
  DiscreteKernel out;
  out.dx = dx;
  out.first_offset = static_cast<std::ptrdiff_t>(std::ceil(lo / dx));
  const auto last = static_cast<std::ptrdiff_t>(std::floor(hi / dx));
  double sum = 0.0;
  for (std::ptrdiff_t m = out.first_offset; m <= last; ++m) {
    const double w = kernel(static_cast<double>(m) * dx);
    out.weights.push_back(w);
    sum += w;
  }
  out.raw_mass = sum * dx;
  if (!(sum > 0.0)) throw ResolutionError("kernel has no mass on the lattice");
  for (double& w : out.weights) w /= sum;
  return out;
}

}  // namespace snlcl
