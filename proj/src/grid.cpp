#include "snlcl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "snlcl/errors.hpp"

namespace snlcl {

ConfigError::ConfigError(std::vector<std::string> violations)
    : Error([&] {
        std::string msg = "invalid configuration:";
        for (const auto& v : violations) msg += "\n  - " + v;
        return msg;
      }()),
      violations_(std::move(violations)) {}

Grid::Grid(double x_min, double x_max, std::size_t n_cells)
    : x_min_(x_min), x_max_(x_max), n_cells_(n_cells), dx_(0.0) {
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < x_max)) {
    throw InvalidArgument("grid requires finite x_min < x_max");
  }
  if (n_cells < 2) throw InvalidArgument("grid requires at least 2 cells");
  dx_ = (x_max - x_min) / static_cast<double>(n_cells);
}

bool Grid::refines(const Grid& coarse, std::size_t* ratio) const {
  if (coarse.n_cells_ == 0 || n_cells_ % coarse.n_cells_ != 0) return false;
  const double tol = 1e-12 * std::max(1.0, std::abs(x_max_ - x_min_));
  if (std::abs(coarse.x_min_ - x_min_) > tol || std::abs(coarse.x_max_ - x_max_) > tol) return false;
  if (ratio) *ratio = n_cells_ / coarse.n_cells_;
  return true;
}

Field::Field(Grid grid, std::vector<double> values, double time_tag)
    : grid_(grid), values_(std::move(values)), time_tag_(time_tag) {
  if (values_.size() != grid_.n_nodes()) {
    throw InvalidArgument("field length " + std::to_string(values_.size()) + " does not match grid with " +
                          std::to_string(grid_.n_nodes()) + " nodes");
  }
}

Field Field::zeros(const Grid& grid, double time_tag) {
  return Field(grid, std::vector<double>(grid.n_nodes(), 0.0), time_tag);
}

Field Field::sample(const Grid& grid, const std::function<double(double)>& fn, double time_tag) {
  std::vector<double> v(grid.n_nodes());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid.node(static_cast<std::ptrdiff_t>(i)));
  Field f(grid, std::move(v), time_tag);
  if (!f.all_finite()) throw InvalidArgument("sampled field contains non-finite values");
  return f;
}

bool Field::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double interpolate(const Field& f, double x, ExcursionCounter* excursions) {
  const Grid& g = f.grid();
  if (!(x >= g.x_min() && x <= g.x_max())) {
    if (excursions) ++excursions->count;
    return 0.0;
  }
  const double s = (x - g.x_min()) / g.dx();
  const double nearest = std::round(s);
  const auto n = static_cast<double>(g.n_cells());
  // snap to the node when the offset is pure rounding noise
  if (std::abs(s - nearest) <= 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, s)) {
    return f[static_cast<std::size_t>(std::clamp(nearest, 0.0, n))];
  }
  const double cell = std::min(std::floor(s), n - 1.0);
  const auto i = static_cast<std::size_t>(cell);
  const double lambda = s - cell;
  return (1.0 - lambda) * f[i] + lambda * f[i + 1];
}

double integral(const Field& f) {
  const auto v = f.values();
  double sum = 0.5 * (v.front() + v.back());
  for (std::size_t i = 1; i + 1 < v.size(); ++i) sum += v[i];
  return sum * f.grid().dx();
}

Norms norms(const Field& f) {
  const auto v = f.values();
  Norms n;
  double l1 = 0.5 * (std::abs(v.front()) + std::abs(v.back()));
  double l2 = 0.5 * (v.front() * v.front() + v.back() * v.back());
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    l1 += std::abs(v[i]);
    l2 += v[i] * v[i];
  }
  for (double x : v) n.linf = std::max(n.linf, std::abs(x));
  n.l1 = l1 * f.grid().dx();
  n.l2 = std::sqrt(l2 * f.grid().dx());
  return n;
}

Field primitive(const Field& f) {
  const auto v = f.values();
  std::vector<double> out(v.size(), 0.0);
  const double half_dx = 0.5 * f.grid().dx();
  for (std::size_t i = 1; i < v.size(); ++i) out[i] = out[i - 1] + half_dx * (v[i - 1] + v[i]);
  return Field(f.grid(), std::move(out), f.time_tag());
}

double l1_distance(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid())) throw InvalidArgument("l1_distance requires fields on the same grid");
  const auto va = a.values();
  const auto vb = b.values();
  double sum = 0.5 * (std::abs(va.front() - vb.front()) + std::abs(va.back() - vb.back()));
  for (std::size_t i = 1; i + 1 < va.size(); ++i) sum += std::abs(va[i] - vb[i]);
  return sum * a.grid().dx();
}

Field restrict_to(const Field& fine, const Grid& coarse) {
  std::size_t ratio = 0;
  if (!fine.grid().refines(coarse, &ratio)) throw InvalidArgument("restrict_to requires nested grids");
  std::vector<double> out(coarse.n_nodes());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fine[i * ratio];
  return Field(coarse, std::move(out), fine.time_tag());
}

double central_slope(const Field& f, std::size_t i) {
  const double left = i == 0 ? 0.0 : f[i - 1];
  const double right = i + 1 >= f.size() ? 0.0 : f[i + 1];
  return (right - left) / (2.0 * f.grid().dx());
}

}  // namespace snlcl
