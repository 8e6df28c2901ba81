#include "snlcl/brownian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "snlcl/errors.hpp"

namespace snlcl {

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// uniform on (0, 1], never zero so the logarithm below is finite
double to_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

void check_grid(std::span<const double> times) {
  if (times.size() < 2) throw InvalidArgument("time grid needs at least two points");
  if (times.front() != 0.0) throw InvalidArgument("time grid must start at 0");
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    if (!(times[k + 1] > times[k]) || !std::isfinite(times[k + 1])) {
      throw InvalidArgument("time grid is not strictly increasing at index " + std::to_string(k + 1));
    }
  }
}

double time_tolerance(std::span<const double> times) { return 1e-12 * std::max(1.0, std::abs(times.back())); }

}  // namespace

std::vector<double> uniform_time_grid(double horizon, std::size_t n_steps) {
  if (!(horizon > 0.0) || n_steps == 0) throw InvalidArgument("uniform_time_grid needs horizon > 0 and n_steps > 0");
  std::vector<double> t(n_steps + 1);
  for (std::size_t k = 0; k <= n_steps; ++k) t[k] = horizon * static_cast<double>(k) / static_cast<double>(n_steps);
  return t;
}

double counter_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept {
  const std::uint64_t key = splitmix64(seed ^ splitmix64(stream ^ 0x632be59bd9b4e019ULL));
  const std::uint64_t a = splitmix64(key ^ splitmix64(2 * counter));
  const std::uint64_t b = splitmix64(key ^ splitmix64(2 * counter + 1));
  const double r = std::sqrt(-2.0 * std::log(to_unit(a)));
  return r * std::cos(2.0 * std::numbers::pi * to_unit(b));
}

BrownianPath::BrownianPath(std::vector<double> times, std::vector<double> values, std::uint64_t master_seed,
                           std::uint64_t path_index)
    : times_(std::move(times)), values_(std::move(values)), master_seed_(master_seed), path_index_(path_index) {
  check_grid(times_);
  if (values_.size() != times_.size()) throw InvalidArgument("Brownian path values do not match its time grid");
}

BrownianPath BrownianPath::coarsen(std::size_t factor) const {
  if (factor == 0 || n_steps() % factor != 0) {
    throw InvalidArgument("coarsen factor must divide the number of steps");
  }
  std::vector<double> t, v;
  for (std::size_t k = 0; k < times_.size(); k += factor) {
    t.push_back(times_[k]);
    v.push_back(values_[k]);
  }
  return BrownianPath(std::move(t), std::move(v), master_seed_, path_index_);
}

BrownianPath BrownianPath::restrict_to(std::span<const double> coarse_times) const {
  check_grid(coarse_times);
  const double tol = time_tolerance(times_);
  std::vector<double> v;
  v.reserve(coarse_times.size());
  std::size_t k = 0;
  for (double t : coarse_times) {
    while (k < times_.size() && times_[k] < t - tol) ++k;
    if (k == times_.size() || std::abs(times_[k] - t) > tol) {
      throw InvalidArgument("time " + std::to_string(t) + " is not on the path's grid (non-nested grids)");
    }
    v.push_back(values_[k]);
  }
  return BrownianPath(std::vector<double>(coarse_times.begin(), coarse_times.end()), std::move(v), master_seed_,
                      path_index_);
}

BrownianPath sample_path(std::uint64_t master_seed, std::uint64_t path_index, std::span<const double> time_grid) {
  check_grid(time_grid);
  std::vector<double> values(time_grid.size(), 0.0);
  for (std::size_t k = 0; k + 1 < time_grid.size(); ++k) {
    const double dt = time_grid[k + 1] - time_grid[k];
    values[k + 1] = values[k] + std::sqrt(dt) * counter_normal(master_seed, path_index, k);
  }
  return BrownianPath(std::vector<double>(time_grid.begin(), time_grid.end()), std::move(values), master_seed,
                      path_index);
}

bool nested_in(std::span<const double> coarse, std::span<const double> fine) {
  const double tol = time_tolerance(fine);
  std::size_t k = 0;
  for (double t : coarse) {
    while (k < fine.size() && fine[k] < t - tol) ++k;
    if (k == fine.size() || std::abs(fine[k] - t) > tol) return false;
  }
  return true;
}

}  // namespace snlcl
