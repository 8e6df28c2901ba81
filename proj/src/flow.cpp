#include "snlcl/flow.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "snlcl/errors.hpp"

namespace snlcl {

namespace {

double table_lookup(const std::vector<double>& table, const Grid& g, double x) {
  const double s = (x - g.x_min()) / g.dx();
  const double cell = std::min(std::floor(s), static_cast<double>(g.n_cells()) - 1.0);
  const auto i = static_cast<std::size_t>(std::max(cell, 0.0));
  const double lambda = s - static_cast<double>(i);
  return (1.0 - lambda) * table[i] + lambda * table[i + 1];
}

const Field& conv_at(std::span<const Field> history, std::size_t k) {
  return history.size() == 1 ? history.front() : history[k];
}

}  // namespace

FlowIntegrator::FlowIntegrator(const Grid& grid, double start_time, std::vector<char> active)
    : grid_(grid),
      start_time_(start_time),
      time_(start_time),
      positions_(grid.n_nodes()),
      jacobians_(grid.n_nodes(), 1.0),
      active_(std::move(active)) {
  for (std::size_t i = 0; i < positions_.size(); ++i) positions_[i] = grid.node(static_cast<std::ptrdiff_t>(i));
  if (active_.empty()) active_.assign(grid.n_nodes(), 1);
  if (active_.size() != grid.n_nodes()) throw InvalidArgument("active mask does not match the grid");
}

void FlowIntegrator::advance(const RegularizedFlux& flux, const DriftField& field, double dt, double dB) {
  const std::size_t n = positions_.size();
  if (field.drift.size() != n || field.rate.size() != n) throw InvalidArgument("drift field does not match the grid");
  for (std::size_t i = 0; i < n; ++i) {
    const double x = positions_[i];
    double drift = 0.0;
    double rate = 0.0;
    if (grid_.contains(x)) {
      drift = table_lookup(field.drift, grid_, x);
      rate = table_lookup(field.rate, grid_, x);
    } else {
      if (active_[i]) ++excursions_;
      drift = flux.value(field.time, x, 0.0);
      rate = flux.dx(field.time, x, 0.0);
    }
    const double factor = 1.0 + rate * dt;
    const double jac = jacobians_[i] * factor;
    if (!(jac > 0.0)) {
      throw StepSizeError("non-positive Jacobian " + std::to_string(jac) + " at node " + std::to_string(i) +
                          " (x0 = " + std::to_string(grid_.node(static_cast<std::ptrdiff_t>(i))) +
                          ") after t = " + std::to_string(time_ + dt));
    }
    positions_[i] = x + drift * dt + dB;
    jacobians_[i] = jac;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!(positions_[i + 1] > positions_[i])) {
      throw StepSizeError("characteristics crossed between nodes " + std::to_string(i) + " and " +
                          std::to_string(i + 1) + " after t = " + std::to_string(time_ + dt));
    }
  }
  time_ += dt;
}

FlowMap FlowIntegrator::snapshot() const {
  return FlowMap{grid_, start_time_, time_, positions_, jacobians_, excursions_};
}

FlowMap forward_flow(const RegularizedFlux& flux, std::span<const Field> conv_history, const BrownianPath& path,
                     std::size_t start_index, std::size_t end_index, std::vector<char> active,
                     const FlowObserver& observer) {
  if (start_index > end_index || end_index > path.n_steps()) throw InvalidArgument("forward_flow: bad time range");
  if (conv_history.empty()) throw InvalidArgument("forward_flow: empty convolution history");
  if (conv_history.size() != 1 && conv_history.size() < end_index) {
    throw InvalidArgument("forward_flow: convolution history does not cover the time range");
  }
  FlowIntegrator flow(flux.grid(), path.time(start_index), std::move(active));
  DriftField field;
  for (std::size_t k = start_index; k < end_index; ++k) {
    flux.drift_field(path.time(k), conv_at(conv_history, k), field);
    flow.advance(flux, field, path.step(k), path.increment(k));
    if (observer) observer(k + 1, flow);
  }
  return flow.snapshot();
}

InverseFlow::InverseFlow(const FlowMap& map) : map_(&map) {
  if (map.positions.size() != map.grid.n_nodes() || map.jacobians.size() != map.grid.n_nodes()) {
    throw InvalidArgument("flow map does not match its grid");
  }
  for (std::size_t i = 0; i + 1 < map.positions.size(); ++i) {
    if (!(map.positions[i + 1] > map.positions[i])) throw InvalidArgument("flow map is not monotone");
  }
}

InverseFlow::Preimage InverseFlow::operator()(double x, ExcursionCounter* excursions) const {
  const auto& X = map_->positions;
  const auto& J = map_->jacobians;
  if (x <= X.front() || x >= X.back()) {
    const bool low = x <= X.front();
    const std::size_t i = low ? 0 : X.size() - 1;
    const bool exact = x == X[i];
    if (!exact && excursions) ++excursions->count;
    return {map_->origin(i), 1.0 / J[i], exact};
  }
  const auto it = std::upper_bound(X.begin(), X.end(), x);
  const auto i = static_cast<std::size_t>(it - X.begin()) - 1;
  const double lambda = (x - X[i]) / (X[i + 1] - X[i]);
  const double y = map_->origin(i) + lambda * map_->grid.dx();
  return {y, 1.0 / ((1.0 - lambda) * J[i] + lambda * J[i + 1]), true};
}

Field push_forward(const Field& u0, const FlowMap& map, double time_tag, ExcursionCounter* excursions) {
  if (!(u0.grid() == map.grid)) throw InvalidArgument("push_forward: data and flow live on different grids");
  return push_forward(u0, map.positions, map.jacobians, time_tag, excursions);
}

Field push_forward(const Field& u0, std::span<const double> X, std::span<const double> J, double time_tag,
                   ExcursionCounter* excursions) {
  const Grid& g = u0.grid();
  const std::size_t n = g.n_nodes();
  if (X.size() != n || J.size() != n) throw InvalidArgument("push_forward: flow does not match the data grid");
  std::vector<double> out(n, 0.0);
  std::size_t cell = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double x = g.node(static_cast<std::ptrdiff_t>(j));
    if (x < X.front() || x > X.back()) {
      const std::size_t end = x < X.front() ? 0 : n - 1;
      if (u0[end] != 0.0) {
        if (excursions) ++excursions->count;
        out[j] = u0[end] / J[end];
      }
      continue;
    }
    while (cell + 2 < n && X[cell + 1] <= x) ++cell;
    const double lambda = (x - X[cell]) / (X[cell + 1] - X[cell]);
    const double value = (1.0 - lambda) * u0[cell] + lambda * u0[cell + 1];
    if (value == 0.0) continue;
    out[j] = value / ((1.0 - lambda) * J[cell] + lambda * J[cell + 1]);
  }
  return Field(g, std::move(out), time_tag);
}

std::vector<double> backward_flow(const RegularizedFlux& flux, std::span<const Field> conv_history,
                                  const BrownianPath& path, std::size_t start_index, std::size_t end_index,
                                  std::span<const double> queries) {
  if (start_index > end_index || end_index > path.n_steps()) throw InvalidArgument("backward_flow: bad time range");
  if (conv_history.empty()) throw InvalidArgument("backward_flow: empty convolution history");
  const Grid& g = flux.grid();
  std::vector<double> y(queries.begin(), queries.end());
  DriftField field;
  for (std::size_t k = end_index; k-- > start_index;) {
    flux.drift_field(path.time(k), conv_at(conv_history, k), field);
    const double dt = path.step(k);
    const double dB = path.increment(k);
    for (double& v : y) {
      const double drift = g.contains(v) ? table_lookup(field.drift, g, v) : flux.value(field.time, v, 0.0);
      v = v - drift * dt - dB;
    }
  }
  return y;
}

double MomentField::max_mean() const {
  const auto v = mean.values();
  return *std::max_element(v.begin(), v.end());
}

std::size_t MomentField::argmax() const {
  const auto v = mean.values();
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

MomentField inverse_moment_from_samples(const Grid& grid, std::span<const std::vector<double>> samples) {
  if (samples.size() < 2) throw InvalidArgument("jacobian_inverse_moment needs at least two paths");
  const std::size_t n = grid.n_nodes();
  const auto paths = static_cast<double>(samples.size());
  std::vector<double> mean(n, 0.0);
  std::vector<double> se(n, 0.0);
  for (const auto& s : samples) {
    if (s.size() != n) throw InvalidArgument("jacobian_inverse_moment: ensemble members disagree on the grid");
    for (std::size_t i = 0; i < n; ++i) mean[i] += s[i];
  }
  for (double& m : mean) m /= paths;
  for (const auto& s : samples) {
    for (std::size_t i = 0; i < n; ++i) {
      const double d = s[i] - mean[i];
      se[i] += d * d;
    }
  }
  for (double& v : se) v = std::sqrt(v / (paths - 1.0) / paths);
  return MomentField{Field(grid, std::move(mean)), std::move(se), samples.size()};
}

MomentField jacobian_inverse_moment(std::span<const FlowMap> ensemble) {
  if (ensemble.size() < 2) throw InvalidArgument("jacobian_inverse_moment needs at least two paths");
  std::vector<std::vector<double>> inv;
  inv.reserve(ensemble.size());
  for (const auto& fm : ensemble) {
    if (!(fm.grid == ensemble.front().grid) || fm.end_time != ensemble.front().end_time ||
        fm.start_time != ensemble.front().start_time) {
      throw InvalidArgument("jacobian_inverse_moment: flow maps do not share grid and times");
    }
    std::vector<double> v(fm.jacobians.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / fm.jacobians[i];
    inv.push_back(std::move(v));
  }
  return inverse_moment_from_samples(ensemble.front().grid, inv);
}

}  // namespace snlcl
