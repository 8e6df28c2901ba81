#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace snlcl {

/// Uniform node-centred grid on [x_min, x_max] with n_cells + 1 nodes.
///
/// The whole line is truncated to this window; data carried by the
/// solver is expected to stay compactly supported inside it.
class Grid {
 public:
  Grid(double x_min, double x_max, std::size_t n_cells);

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  std::size_t n_cells() const noexcept { return n_cells_; }
  std::size_t n_nodes() const noexcept { return n_cells_ + 1; }
  double dx() const noexcept { return dx_; }
  double node(std::ptrdiff_t i) const noexcept { return x_min_ + static_cast<double>(i) * dx_; }
  bool contains(double x) const noexcept { return x >= x_min_ && x <= x_max_; }

  /// True when every node of `coarse` is a node of this grid; `ratio` receives the refinement factor.
  bool refines(const Grid& coarse, std::size_t* ratio = nullptr) const;

  bool operator==(const Grid& other) const = default;

 private:
  double x_min_;
  double x_max_;
  std::size_t n_cells_;
  double dx_;
};

/// Node-sampled function of space at a fixed simulation time.
class Field {
 public:
  Field(Grid grid, std::vector<double> values, double time_tag = 0.0);
  static Field zeros(const Grid& grid, double time_tag = 0.0);
  static Field sample(const Grid& grid, const std::function<double(double)>& fn, double time_tag = 0.0);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }
  double time_tag() const noexcept { return time_tag_; }
  void set_time_tag(double t) noexcept { time_tag_ = t; }

  bool all_finite() const noexcept;

 private:
  Grid grid_;
  std::vector<double> values_;
  double time_tag_;
};

/// Counts queries that fell outside the grid window.
struct ExcursionCounter {
  std::size_t count = 0;
};

/// Piecewise-linear evaluation; returns 0 outside the grid and bumps `excursions`.
double interpolate(const Field& f, double x, ExcursionCounter* excursions = nullptr);

struct Norms {
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
};

Norms norms(const Field& f);

/// Composite trapezoid integral of the node values.
double integral(const Field& f);

/// V(x) = integral of f from x_min to x (cumulative trapezoid, V(x_min) = 0).
Field primitive(const Field& f);

/// Trapezoid L1 distance between two fields on the same grid.
double l1_distance(const Field& a, const Field& b);

/// Samples a fine field at the nodes of a coarser nested grid.
Field restrict_to(const Field& fine, const Grid& coarse);

/// Central difference with the field treated as zero beyond the grid.
double central_slope(const Field& f, std::size_t i);

}  // namespace snlcl
