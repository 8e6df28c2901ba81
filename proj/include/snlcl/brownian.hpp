#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace snlcl {

/// Uniform grid 0 = t_0 < ... < t_n = horizon.
std::vector<double> uniform_time_grid(double horizon, std::size_t n_steps);

/// Counter-based standard normal: a pure function of (seed, stream, counter).
double counter_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept;

/// One realization of B on a time grid, stored as values B(t_k) so that
/// sub-sampling a path reproduces it exactly at the shared times.
class BrownianPath {
 public:
  BrownianPath(std::vector<double> times, std::vector<double> values, std::uint64_t master_seed,
               std::uint64_t path_index);

  std::span<const double> times() const noexcept { return times_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t n_steps() const noexcept { return times_.size() - 1; }
  double time(std::size_t k) const noexcept { return times_[k]; }
  double value(std::size_t k) const noexcept { return values_[k]; }
  double increment(std::size_t k) const noexcept { return values_[k + 1] - values_[k]; }
  double step(std::size_t k) const noexcept { return times_[k + 1] - times_[k]; }
  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t path_index() const noexcept { return path_index_; }

  /// Keeps every `factor`-th time; values at the kept times are unchanged.
  BrownianPath coarsen(std::size_t factor) const;
  /// Restriction to a grid whose times all appear in this path's grid.
  BrownianPath restrict_to(std::span<const double> coarse_times) const;

 private:
  std::vector<double> times_;
  std::vector<double> values_;
  std::uint64_t master_seed_;
  std::uint64_t path_index_;
};

/// Increments N(0, t_{k+1} - t_k) keyed by (master_seed, path_index, k).
BrownianPath sample_path(std::uint64_t master_seed, std::uint64_t path_index, std::span<const double> time_grid);

/// True when every time of `coarse` appears in `fine` (to rounding).
bool nested_in(std::span<const double> coarse, std::span<const double> fine);

}  // namespace snlcl
