#include "snlcl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "snlcl/errors.hpp"

namespace snlcl {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Everything a path run needs that does not depend on the path.
struct Prepared {
  RegularizedFlux flux;
  DiscreteKernel kernel;
  Field u0;
  std::vector<char> active;
  double mass = 0.0;
};

Prepared prepare(const SolverConfig& cfg, const BrownianPath& path) {
  cfg.validate();
  const auto times = path.times();
  if (times.size() != cfg.times.size()) throw InvalidArgument("path time grid does not match the solver time grid");
  const double tol = 1e-12 * std::max(1.0, cfg.times.back());
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (std::abs(times[k] - cfg.times[k]) > tol) {
      throw InvalidArgument("path time " + fmt(times[k]) + " differs from solver time " + fmt(cfg.times[k]));
    }
  }
  Field u0 = regularized_initial(cfg);
  std::vector<char> active(u0.size());
  for (std::size_t i = 0; i < u0.size(); ++i) active[i] = u0[i] != 0.0;
  const double mass = norms(u0).l1;
  return Prepared{RegularizedFlux(cfg.flux, cfg.eps_flux, cfg.grid), discretize(cfg.kernel, cfg.grid.dx()),
                  std::move(u0), std::move(active), mass};
}

bool is_output(const std::vector<std::size_t>& outputs, std::size_t k) {
  return std::binary_search(outputs.begin(), outputs.end(), k);
}

double relative_drift(double l1, double mass) { return mass > 0.0 ? std::abs(l1 / mass - 1.0) : l1; }

double min_over(const std::vector<Field>& fields) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& f : fields) {
    const auto v = f.values();
    m = std::min(m, *std::min_element(v.begin(), v.end()));
  }
  return m;
}

double max_drift(const std::vector<Field>& fields, double mass) {
  double d = 0.0;
  for (const auto& f : fields) d = std::max(d, relative_drift(norms(f).l1, mass));
  return d;
}

void finish(PathSolution& sol, const Prepared& prep) {
  sol.conv_history.clear();
  sol.conv_history.reserve(sol.snapshots.size());
  sol.snapshot_norms.clear();
  sol.snapshot_norms.reserve(sol.snapshots.size());
  for (const auto& u : sol.snapshots) {
    if (!u.all_finite()) throw StepSizeError("non-finite solution value at t = " + fmt(u.time_tag()));
    sol.conv_history.push_back(convolve(u, prep.kernel));
    sol.conv_history.back().set_time_tag(u.time_tag());
    sol.snapshot_norms.push_back(norms(u));
  }
  sol.min_value = min_over(sol.snapshots);
  sol.initial_mass = prep.mass;
}

}  // namespace

double smooth_step(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / s);
  const double b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

double InitialDatum::operator()(double x) const {
  if (shape == Shape::bump) return scale * BumpKernel(center, radius)(x);
  const double rise = smooth_step((x - (center - radius) + 0.5 * ramp) / ramp);
  const double fall = smooth_step(((center + radius) + 0.5 * ramp - x) / ramp);
  return scale * rise * fall;
}

double InitialDatum::support_lo() const {
  return shape == Shape::bump ? center - radius : center - radius - 0.5 * ramp;
}

double InitialDatum::support_hi() const {
  return shape == Shape::bump ? center + radius : center + radius + 0.5 * ramp;
}

std::vector<std::size_t> SolverConfig::outputs() const {
  if (output_indices.empty()) return {times.empty() ? 0 : times.size() - 1};
  std::vector<std::size_t> out = output_indices;
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::string> SolverConfig::violations() const {
  std::vector<std::string> v;
  const double dx = grid.dx();
  const double min_eps = 4.0 * dx * (1.0 - 1e-12);
  if (!(eps_flux >= min_eps)) v.push_back("eps_flux = " + fmt(eps_flux) + " is below 4 dx = " + fmt(4.0 * dx));
  if (!(eps_initial >= min_eps)) {
    v.push_back("eps_initial = " + fmt(eps_initial) + " is below 4 dx = " + fmt(4.0 * dx));
  }
  if (!(kernel.radius() >= dx)) v.push_back("kernel radius " + fmt(kernel.radius()) + " is below dx = " + fmt(dx));
  if (!(picard_tol > 0.0)) v.push_back("picard_tol = " + fmt(picard_tol) + " must be positive");
  if (picard_max_iters < 1) v.push_back("picard_max_iters = " + std::to_string(picard_max_iters) + " must be >= 1");

  bool times_ok = times.size() >= 2 && times.front() == 0.0;
  for (std::size_t k = 0; times_ok && k + 1 < times.size(); ++k) times_ok = times[k + 1] > times[k];
  if (!times_ok) v.push_back("time grid must start at 0 and increase strictly");
  for (std::size_t k : output_indices) {
    if (k >= times.size()) v.push_back("output index " + std::to_string(k) + " is past the last time");
  }

  if (!(initial.radius > 0.0) || !std::isfinite(initial.scale) || !(initial.scale > 0.0)) {
    v.push_back("initial datum needs radius > 0 and scale > 0");
  } else if (initial.shape == InitialDatum::Shape::plateau && !(initial.ramp > 0.0)) {
    v.push_back("plateau ramp = " + fmt(initial.ramp) + " must be positive");
  } else if (initial.support_lo() - eps_initial <= grid.x_min() || initial.support_hi() + eps_initial >= grid.x_max()) {
    v.push_back("initial datum support [" + fmt(initial.support_lo()) + ", " + fmt(initial.support_hi()) +
                "] plus eps_initial does not fit inside the grid");
  }

  if (times_ok && v.empty()) {
    try {
      const double limit = max_stable_step(*this);
      double largest = 0.0;
      for (std::size_t k = 0; k + 1 < times.size(); ++k) largest = std::max(largest, times[k + 1] - times[k]);
      if (largest > limit * (1.0 + 1e-12)) {
        v.push_back("time step " + fmt(largest) + " violates the step rule dt <= " + fmt(limit));
      }
    } catch (const Error& e) {
      v.push_back(e.what());
    }
  }
  return v;
}

void SolverConfig::validate() const {
  auto v = violations();
  if (!v.empty()) throw ConfigError(std::move(v));
}

double max_stable_step(const SolverConfig& cfg) {
  const RegularizedFlux flux(cfg.flux, cfg.eps_flux, cfg.grid);
  const double mass = norms(Field::sample(cfg.grid, [&](double x) { return std::abs(cfg.initial(x)); })).l1;
  const double z_bound = cfg.kernel.max_value() * mass;
  const double slope_bound = cfg.kernel.max_slope() * mass;
  const double rate = flux.max_rate(cfg.times.back(), z_bound, slope_bound);
  return rate > 0.0 ? 0.5 / rate : std::numeric_limits<double>::infinity();
}

Field regularized_initial(const SolverConfig& cfg) {
  const Field raw = Field::sample(cfg.grid, [&](double x) { return cfg.initial(x); });
  return convolve(raw, Mollifier(cfg.eps_initial));
}

PathSolution solve_picard(const SolverConfig& cfg, const BrownianPath& path) {
  const Prepared prep = prepare(cfg, path);
  const auto outputs = cfg.outputs();
  const std::size_t n = path.n_steps();

  PathSolution sol{path, {}, {}, outputs, {}, {}};
  std::vector<Field> conv{convolve(prep.u0, prep.kernel)};

  for (int iter = 1; iter <= cfg.picard_max_iters; ++iter) {
    std::vector<Field> next;
    next.reserve(n + 1);
    next.push_back(prep.u0);
    std::vector<FlowMap> flows;
    if (is_output(outputs, 0)) flows.push_back(FlowIntegrator(cfg.grid, 0.0).snapshot());
    ExcursionCounter pushed;
    auto observer = [&](std::size_t k, const FlowIntegrator& fi) {
      next.push_back(push_forward(prep.u0, fi.positions(), fi.jacobians(), path.time(k), &pushed));
      if (is_output(outputs, k)) flows.push_back(fi.snapshot());
    };
    const FlowMap final_map = forward_flow(prep.flux, conv, path, 0, n, prep.active, observer);

    sol.iterate_mass_drift.push_back(max_drift(next, prep.mass));
    double distance = 0.0;
    if (iter > 1) {
      for (std::size_t k : outputs) distance = std::max(distance, l1_distance(next[k], sol.snapshots[k]));
      sol.distances.push_back(distance);
    }
    sol.snapshots = std::move(next);
    sol.flows = std::move(flows);
    sol.boundary_excursions = final_map.boundary_excursions + pushed.count;
    sol.iterations_used = iter;

    if (!cfg.flux.nonlocal() || (iter > 1 && distance < cfg.picard_tol)) {
      sol.converged = true;
      break;
    }
    if (iter == cfg.picard_max_iters) break;
    conv.clear();
    conv.reserve(n + 1);
    for (const auto& u : sol.snapshots) conv.push_back(convolve(u, prep.kernel));
  }
  finish(sol, prep);
  return sol;
}

PathSolution solve_marching(const SolverConfig& cfg, const BrownianPath& path) {
  const Prepared prep = prepare(cfg, path);
  const auto outputs = cfg.outputs();
  const std::size_t n = path.n_steps();

  PathSolution sol{path, {}, {}, outputs, {}, {}};
  sol.snapshots.reserve(n + 1);
  sol.snapshots.push_back(prep.u0);
  std::vector<Field> conv{convolve(prep.u0, prep.kernel)};
  conv.reserve(n + 1);

  FlowIntegrator flow(cfg.grid, 0.0, prep.active);
  if (is_output(outputs, 0)) sol.flows.push_back(flow.snapshot());
  ExcursionCounter pushed;
  DriftField field;
  for (std::size_t k = 0; k < n; ++k) {
    const Field& lagged = conv[k == 0 ? 0 : k - 1];
    prep.flux.drift_field(path.time(k), lagged, field);
    flow.advance(prep.flux, field, path.step(k), path.increment(k));
    sol.snapshots.push_back(push_forward(prep.u0, flow.positions(), flow.jacobians(), path.time(k + 1), &pushed));
    if (cfg.flux.nonlocal()) conv.push_back(convolve(sol.snapshots.back(), prep.kernel));
    else conv.push_back(conv.front());
    if (is_output(outputs, k + 1)) sol.flows.push_back(flow.snapshot());
  }
  sol.iterate_mass_drift.push_back(max_drift(sol.snapshots, prep.mass));
  sol.boundary_excursions = flow.boundary_excursions() + pushed.count;
  sol.iterations_used = 1;
  sol.converged = true;
  finish(sol, prep);
  return sol;
}

WeakResidual weak_residual(const PathSolution& sol, const BumpKernel& phi, const FluxModel& flux) {
  if (sol.snapshots.empty()) throw InvalidArgument("weak_residual needs snapshots");
  const Grid& g = sol.snapshots.front().grid();
  if (!(phi.support_lo() > g.x_min()) || !(phi.support_hi() < g.x_max())) {
    throw DomainError("test function support [" + fmt(phi.support_lo()) + ", " + fmt(phi.support_hi()) +
                      "] touches the grid boundary");
  }
  const BrownianPath& path = sol.path;
  const std::size_t n = path.n_steps();
  if (sol.snapshots.size() != n + 1 || sol.conv_history.size() != n + 1) {
    throw InvalidArgument("weak_residual needs snapshots at every path time");
  }

  const std::size_t m = g.n_nodes();
  std::vector<double> p(m), p1(m), p2(m), w(m, g.dx());
  w.front() = w.back() = 0.5 * g.dx();
  for (std::size_t i = 0; i < m; ++i) {
    const double x = g.node(static_cast<std::ptrdiff_t>(i));
    p[i] = phi(x);
    p1[i] = phi.derivative(x);
    p2[i] = phi.second_derivative(x);
  }
  auto pair = [&](const Field& u, const std::vector<double>& test) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += w[i] * u[i] * test[i];
    return s;
  };

  WeakResidual res{phi, {}, {}, {}};
  res.series.reserve(n);
  const double start = pair(sol.snapshots.front(), p);
  double integrals = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Field& u = sol.snapshots[k];
    const Field& conv = sol.conv_history[k];
    const double t = path.time(k);
    double flux_term = 0.0;
    double noise_term = 0.0;
    double ito_term = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (u[i] == 0.0) continue;
      const double x = g.node(static_cast<std::ptrdiff_t>(i));
      flux_term += w[i] * u[i] * flux(t, x, conv[i]) * p1[i];
      noise_term += w[i] * u[i] * p1[i];
      ito_term += w[i] * u[i] * p2[i];
    }
    integrals += flux_term * path.step(k) + noise_term * path.increment(k) + 0.5 * ito_term * path.step(k);
    res.series.push_back(pair(sol.snapshots[k + 1], p) - start - integrals);
  }
  for (std::size_t k : sol.output_indices) {
    res.times.push_back(path.time(k));
    res.values.push_back(k == 0 ? 0.0 : res.series[k - 1]);
  }
  return res;
}

}  // namespace snlcl
