#include "snlcl/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "snlcl/ensemble.hpp"
#include "snlcl/errors.hpp"

namespace snlcl {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double trapezoid_square(const Field& f) {
  const auto v = f.values();
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double w = (i == 0 || i + 1 == v.size()) ? 0.5 : 1.0;
    s += w * v[i] * v[i];
  }
  return s * f.grid().dx();
}

DiscreteKernel mollifier_weights(double epsilon, const Grid& g) {
  if (epsilon < 4.0 * g.dx() * (1.0 - 1e-12)) {
    throw ResolutionError("commutator width " + std::to_string(epsilon) + " is below 4 dx = " +
                          std::to_string(4.0 * g.dx()));
  }
  return discretize(Mollifier(epsilon), g.dx());
}

Field commutator_with(const Field& u, const Field& conv, const FluxModel& flux, double t, const DiscreteKernel& k) {
  const Field f = composed_flux(flux, t, conv);
  std::vector<double> fu(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) fu[i] = f[i] * u[i];
  const Field f_eps = convolve(f, k);
  const Field u_eps = convolve(u, k);
  const Field fu_eps = convolve(Field(u.grid(), std::move(fu)), k);
  std::vector<double> r(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) r[i] = f_eps[i] * u_eps[i] - fu_eps[i];
  return Field(u.grid(), std::move(r), u.time_tag());
}

std::span<const double> finest_times(std::span<const SolverConfig> ladder) {
  if (ladder.empty()) throw InvalidArgument("empty configuration ladder");
  const SolverConfig* fine = &ladder.front();
  for (const auto& c : ladder) {
    if (c.times.size() > fine->times.size()) fine = &c;
  }
  for (const auto& c : ladder) {
    if (std::abs(c.times.back() - fine->times.back()) > 1e-12 * std::max(1.0, fine->times.back())) {
      throw InvalidArgument("ladder levels have different horizons");
    }
    if (!nested_in(c.times, fine->times)) {
      throw InvalidArgument("ladder time grids are not nested; shared Brownian paths would not coarsen exactly");
    }
  }
  return fine->times;
}

nlohmann::json numbers(const std::vector<double>& v) { return nlohmann::json(v); }

}  // namespace

void DiagnosticsReport::add(const std::string& name, const std::string& mirrors, nlohmann::json value) {
  doc_[name] = {{"mirrors", mirrors}, {"value", std::move(value)}};
}

std::vector<double> empirical_orders(std::span<const double> errors, std::span<const double> steps) {
  if (errors.size() != steps.size()) throw InvalidArgument("empirical_orders: size mismatch");
  std::vector<double> out;
  for (std::size_t l = 0; l + 1 < errors.size(); ++l) {
    if (errors[l] > 0.0 && errors[l + 1] > 0.0 && steps[l] > 0.0 && steps[l + 1] > 0.0 && steps[l] != steps[l + 1]) {
      out.push_back(std::log(errors[l] / errors[l + 1]) / std::log(steps[l] / steps[l + 1]));
    } else {
      out.push_back(kNaN);
    }
  }
  return out;
}

double fitted_order(std::span<const double> errors, std::span<const double> steps) {
  if (errors.size() != steps.size() || errors.size() < 2) return kNaN;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto n = static_cast<double>(errors.size());
  for (std::size_t l = 0; l < errors.size(); ++l) {
    if (!(errors[l] > 0.0) || !(steps[l] > 0.0)) return kNaN;
    const double x = std::log(steps[l]);
    const double y = std::log(errors[l]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  return denom == 0.0 ? kNaN : (n * sxy - sx * sy) / denom;
}

bool strictly_decreasing(std::span<const double> values) {
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    if (!(values[i + 1] < values[i])) return false;
  }
  return !values.empty();
}

Field composed_flux(const FluxModel& flux, double t, const Field& conv) {
  const Grid& g = conv.grid();
  std::vector<double> f(g.n_nodes());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = flux(t, g.node(static_cast<std::ptrdiff_t>(i)), conv[i]);
  return Field(g, std::move(f), t);
}

Field commutator_field(const Field& u, const Field& conv, const FluxModel& flux, double t, double epsilon) {
  if (!(u.grid() == conv.grid())) throw InvalidArgument("commutator_field: u and conv live on different grids");
  return commutator_with(u, conv, flux, t, mollifier_weights(epsilon, u.grid()));
}

std::vector<double> commutator_squares(const PathSolution& sol, const FluxModel& flux,
                                       std::span<const double> epsilons) {
  if (sol.snapshots.size() != sol.path.n_steps() + 1 || sol.conv_history.size() != sol.snapshots.size()) {
    throw InvalidArgument("commutator needs snapshots at every path time");
  }
  const Grid& g = sol.snapshots.front().grid();
  std::vector<DiscreteKernel> kernels;
  for (double e : epsilons) kernels.push_back(mollifier_weights(e, g));
  std::vector<double> out(epsilons.size(), 0.0);
  for (std::size_t k = 0; k < sol.path.n_steps(); ++k) {
    const Field& u = sol.snapshots[k];
    if (std::all_of(u.values().begin(), u.values().end(), [](double v) { return v == 0.0; })) continue;
    for (std::size_t e = 0; e < kernels.size(); ++e) {
      const Field r = commutator_with(u, sol.conv_history[k], flux, sol.path.time(k), kernels[e]);
      out[e] += sol.path.step(k) * trapezoid_square(r);
    }
  }
  return out;
}

CommutatorStudy reduce_commutator(std::span<const double> epsilons, std::span<const std::vector<double>> per_path) {
  CommutatorStudy s;
  s.epsilons.assign(epsilons.begin(), epsilons.end());
  s.values.assign(epsilons.size(), 0.0);
  s.n_paths = per_path.size();
  if (per_path.empty()) throw InvalidArgument("commutator study over an empty ensemble");
  for (const auto& p : per_path) {
    if (p.size() != epsilons.size()) throw InvalidArgument("commutator study: ladder size mismatch");
    for (std::size_t e = 0; e < p.size(); ++e) s.values[e] += p[e];
  }
  for (double& v : s.values) v = std::sqrt(v / static_cast<double>(per_path.size()));
  s.orders = empirical_orders(s.values, s.epsilons);
  s.fitted_order = fitted_order(s.values, s.epsilons);
  s.decreasing = strictly_decreasing(s.values);
  return s;
}

// ---------------------------------------------------------------------------

PathSummary summarize(const PathSolution& sol, const FluxModel& flux, const EnsembleHooks& hooks) {
  PathSummary s;
  s.path_index = sol.path.path_index();
  for (std::size_t j = 0; j < sol.output_indices.size(); ++j) {
    const std::size_t k = sol.output_indices[j];
    s.output_times.push_back(sol.path.time(k));
    s.outputs.push_back(sol.snapshots[k]);
    s.l2_squared.push_back(sol.snapshot_norms[k].l2 * sol.snapshot_norms[k].l2);
    const auto& jac = sol.flows.at(j).jacobians;
    std::vector<double> inv(jac.size());
    for (std::size_t i = 0; i < jac.size(); ++i) {
      inv[i] = 1.0 / jac[i];
      s.min_jacobian = std::min(s.min_jacobian, jac[i]);
    }
    s.inverse_jacobians.push_back(std::move(inv));
  }
  s.mass_drift = *std::max_element(sol.iterate_mass_drift.begin(), sol.iterate_mass_drift.end());
  s.iterate_mass_drift = sol.iterate_mass_drift;
  s.min_value = sol.min_value;
  s.boundary_excursions = sol.boundary_excursions;
  s.iterations_used = sol.iterations_used;
  s.converged = sol.converged;
  s.distances = sol.distances;
  s.max_slope.reserve(sol.snapshots.size());
  for (const auto& u : sol.snapshots) {
    double m = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) m = std::max(m, std::abs(central_slope(u, i)));
    s.max_slope.push_back(m);
  }
  if (!hooks.commutator_eps.empty()) s.commutator_squares = commutator_squares(sol, flux, hooks.commutator_eps);
  if (hooks.test_function) s.residual = weak_residual(sol, *hooks.test_function, flux).series.back();
  return s;
}

bool BoundsReport::all_within() const {
  return std::all_of(within.begin(), within.end(), [](bool b) { return b; });
}

MeanEstimate mean_estimate(std::span<const double> samples) {
  if (samples.empty()) return {};
  const auto n = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  if (samples.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

BoundsReport track_bounds(std::span<const PathSummary> ensemble, const Field& u0) {
  if (ensemble.empty()) throw InvalidArgument("track_bounds over an empty ensemble");
  BoundsReport r;
  r.n_paths = ensemble.size();
  r.initial_l2_squared = trapezoid_square(u0);
  r.min_value = std::numeric_limits<double>::infinity();
  r.times = ensemble.front().output_times;
  for (const auto& p : ensemble) {
    if (p.output_times.size() != r.times.size()) throw InvalidArgument("track_bounds: output times differ by path");
    r.max_mass_drift = std::max(r.max_mass_drift, p.mass_drift);
    r.min_value = std::min(r.min_value, p.min_value);
    r.min_jacobian = std::min(r.min_jacobian, p.min_jacobian);
    r.boundary_excursions += p.boundary_excursions;
  }
  for (std::size_t j = 0; j < r.times.size(); ++j) {
    std::vector<double> l2(ensemble.size());
    std::vector<std::vector<double>> inv;
    inv.reserve(ensemble.size());
    for (std::size_t p = 0; p < ensemble.size(); ++p) {
      l2[p] = ensemble[p].l2_squared[j];
      inv.push_back(ensemble[p].inverse_jacobians[j]);
    }
    const MeanEstimate est = mean_estimate(l2);
    r.mean_l2_squared.push_back(est.mean);
    r.std_error.push_back(est.std_error);
    if (ensemble.size() >= 2) {
      const MomentField m = inverse_moment_from_samples(u0.grid(), inv);
      const std::size_t at = m.argmax();
      r.moment_max.push_back(m.mean[at]);
      r.moment_max_std_error.push_back(m.std_error[at]);
    } else {
      const auto& v = inv.front();
      r.moment_max.push_back(*std::max_element(v.begin(), v.end()));
      r.moment_max_std_error.push_back(0.0);
    }
    r.bound.push_back(r.moment_max.back() * r.initial_l2_squared);
    r.within.push_back(est.mean <= r.bound.back() + 3.0 * est.std_error);
  }
  return r;
}

// ---------------------------------------------------------------------------

std::vector<BrownianPath> shared_paths(std::uint64_t seed, std::size_t n_paths, std::span<const double> fine_times) {
  std::vector<BrownianPath> out;
  out.reserve(n_paths);
  for (std::size_t i = 0; i < n_paths; ++i) out.push_back(sample_path(seed, i, fine_times));
  return out;
}

BrownianPath restrict_path(const BrownianPath& fine, const SolverConfig& cfg) { return fine.restrict_to(cfg.times); }

EnsembleResult run_ensemble(const SolverConfig& cfg, std::uint64_t seed, std::size_t n_paths,
                            const EnsembleHooks& hooks, unsigned threads) {
  if (n_paths == 0) throw InvalidArgument("ensemble needs at least one path");
  cfg.validate();
  auto paths = map_paths(
      n_paths,
      [&](std::size_t i) {
        const PathSolution sol = solve_picard(cfg, sample_path(seed, i, cfg.times));
        return summarize(sol, cfg.flux, hooks);
      },
      threads);
  Field u0 = regularized_initial(cfg);
  BoundsReport bounds = track_bounds(paths, u0);
  return EnsembleResult{std::move(paths), std::move(bounds), std::move(u0)};
}

MomentStability moment_stability(const SolverConfig& cfg, std::span<const double> epsilons, std::uint64_t seed,
                                 std::size_t n_paths, unsigned threads) {
  if (epsilons.empty()) throw InvalidArgument("moment_stability needs at least one width");
  if (n_paths < 2) throw InvalidArgument("moment_stability needs at least two paths");
  SolverConfig run = cfg;
  run.output_indices.clear();
  auto final_moment = [&](const SolverConfig& c) {
    const auto ens = run_ensemble(c, seed, n_paths, {}, threads);
    std::vector<std::vector<double>> inv;
    for (const auto& p : ens.paths) inv.push_back(p.inverse_jacobians.back());
    return inverse_moment_from_samples(c.grid, inv);
  };
  MomentStability s;
  s.n_paths = n_paths;
  for (double e : epsilons) {
    run.eps_flux = e;
    const MomentField m = final_moment(run);
    s.epsilons.push_back(e);
    s.max_moment.push_back(m.max_mean());
    s.max_std_error.push_back(m.std_error[m.argmax()]);
  }
  const auto [lo, hi] = std::minmax_element(s.max_moment.begin(), s.max_moment.end());
  s.ratio = *hi / *lo;

  SolverConfig control = run;
  control.flux = make_builtin("zero_flux");
  control.eps_flux = epsilons.front();
  const MomentField m = final_moment(control);
  const auto v = m.mean.values();
  s.control_max = *std::max_element(v.begin(), v.end());
  s.control_min = *std::min_element(v.begin(), v.end());
  s.control_std_error = *std::max_element(m.std_error.begin(), m.std_error.end());
  return s;
}

double solution_distance(const PathSolution& a, const PathSolution& b) {
  const Grid& ga = a.snapshots.front().grid();
  const Grid& gb = b.snapshots.front().grid();
  bool found = false;
  double d = 0.0;
  for (std::size_t ka : a.output_indices) {
    const double t = a.path.time(ka);
    for (std::size_t kb : b.output_indices) {
      if (std::abs(b.path.time(kb) - t) > 1e-12 * std::max(1.0, t)) continue;
      found = true;
      const Field& ua = a.snapshots[ka];
      const Field& ub = b.snapshots[kb];
      if (ga == gb) {
        d = std::max(d, l1_distance(ua, ub));
      } else if (ga.refines(gb)) {
        d = std::max(d, l1_distance(restrict_to(ua, gb), ub));
      } else if (gb.refines(ga)) {
        d = std::max(d, l1_distance(ua, restrict_to(ub, ga)));
      } else {
        throw InvalidArgument("solution_distance: spatial grids are not nested");
      }
    }
  }
  if (!found) throw InvalidArgument("solution_distance: no shared output time");
  return d;
}

UniquenessStudy uniqueness_proxy(std::span<const SolverConfig> ladder, std::uint64_t seed, std::size_t n_paths,
                                 unsigned threads) {
  if (ladder.size() < 2) throw InvalidArgument("uniqueness_proxy needs at least two configurations");
  if (n_paths == 0) throw InvalidArgument("uniqueness_proxy needs at least one path");
  const auto fine = finest_times(ladder);
  for (const auto& c : ladder) c.validate();
  const auto per_path = map_paths(
      n_paths,
      [&](std::size_t i) {
        const BrownianPath path = sample_path(seed, i, fine);
        std::vector<double> d;
        PathSolution prev = solve_picard(ladder[0], restrict_path(path, ladder[0]));
        for (std::size_t l = 1; l < ladder.size(); ++l) {
          PathSolution next = solve_picard(ladder[l], restrict_path(path, ladder[l]));
          d.push_back(solution_distance(prev, next));
          prev = std::move(next);
        }
        return d;
      },
      threads);
  UniquenessStudy s;
  s.n_paths = n_paths;
  std::vector<double> widths;
  for (std::size_t l = 0; l + 1 < ladder.size(); ++l) {
    std::vector<double> samples;
    for (const auto& p : per_path) samples.push_back(p[l]);
    const MeanEstimate est = mean_estimate(samples);
    s.distances.push_back(est.mean);
    s.std_errors.push_back(est.std_error);
    widths.push_back(ladder[l].eps_flux);
  }
  s.orders = empirical_orders(s.distances, widths);
  s.decreasing = strictly_decreasing(s.distances);
  s.note = "distances between successive approximations on shared paths; collapse of one approximation "
           "sequence, not a comparison of two independently constructed weak solutions";
  return s;
}

double translation_error(const PathSolution& sol, const InitialDatum& initial, double speed) {
  double err = 0.0;
  for (std::size_t k : sol.output_indices) {
    const Field& u = sol.snapshots[k];
    const Grid& g = u.grid();
    const double shift = speed * sol.path.time(k) + sol.path.value(k);
    for (std::size_t i = 0; i < u.size(); ++i) {
      err = std::max(err, std::abs(u[i] - initial(g.node(static_cast<std::ptrdiff_t>(i)) - shift)));
    }
  }
  return err;
}

ConvergenceStudy convergence_study(std::span<const SolverConfig> ladder, const ConvergenceOptions& options,
                                   std::uint64_t seed, std::size_t n_paths, unsigned threads) {
  if (n_paths == 0) throw InvalidArgument("convergence_study needs at least one path");
  const auto fine = finest_times(ladder);
  for (const auto& c : ladder) c.validate();
  const auto per_path = map_paths(
      n_paths,
      [&](std::size_t i) {
        const BrownianPath path = sample_path(seed, i, fine);
        std::vector<ConvergenceLevel> levels;
        for (const auto& cfg : ladder) {
          const BrownianPath p = restrict_path(path, cfg);
          const PathSolution sol = solve_picard(cfg, p);
          ConvergenceLevel lv;
          lv.max_mass_drift = sol.mass_drift();
          lv.boundary_excursions = sol.boundary_excursions;
          if (options.translation_speed) lv.translation_error = translation_error(sol, cfg.initial, *options.translation_speed);
          if (options.marching_gap) lv.marching_gap = solution_distance(sol, solve_marching(cfg, p));
          if (options.test_function) lv.residual_rms = weak_residual(sol, *options.test_function, cfg.flux).series.back();
          levels.push_back(lv);
        }
        return levels;
      },
      threads);

  ConvergenceStudy s;
  s.n_paths = n_paths;
  const auto n = static_cast<double>(n_paths);
  for (std::size_t l = 0; l < ladder.size(); ++l) {
    ConvergenceLevel lv;
    lv.dx = ladder[l].grid.dx();
    lv.dt = ladder[l].times[1] - ladder[l].times[0];
    lv.eps_flux = ladder[l].eps_flux;
    lv.eps_initial = ladder[l].eps_initial;
    double tr2 = 0.0, res2 = 0.0, gap = 0.0;
    for (const auto& p : per_path) {
      lv.max_mass_drift = std::max(lv.max_mass_drift, p[l].max_mass_drift);
      lv.boundary_excursions += p[l].boundary_excursions;
      tr2 += p[l].translation_error * p[l].translation_error;
      res2 += p[l].residual_rms * p[l].residual_rms;
      gap += p[l].marching_gap;
    }
    lv.translation_error = std::sqrt(tr2 / n);
    lv.residual_rms = std::sqrt(res2 / n);
    lv.marching_gap = gap / n;
    s.levels.push_back(lv);
  }
  std::vector<double> dx, dt, tr, gap, res;
  for (const auto& lv : s.levels) {
    dx.push_back(lv.dx);
    dt.push_back(lv.dt);
    tr.push_back(lv.translation_error);
    gap.push_back(lv.marching_gap);
    res.push_back(lv.residual_rms);
  }
  if (options.translation_speed) {
    s.translation_orders = empirical_orders(tr, dx);
    s.translation_fitted_order = fitted_order(tr, dx);
  }
  if (options.marching_gap) {
    s.gap_orders = empirical_orders(gap, dt);
    s.gap_fitted_order = fitted_order(gap, dt);
  }
  if (options.test_function) s.residual_decreasing = strictly_decreasing(res);
  return s;
}

SteepeningReport burgers_steepening(const SolverConfig& cfg, std::uint64_t seed, std::uint64_t path_index) {
  SteepeningReport r;
  try {
    const PathSolution sol = solve_picard(cfg, sample_path(seed, path_index, cfg.times));
    const PathSummary s = summarize(sol, cfg.flux);
    r.times.assign(sol.path.times().begin(), sol.path.times().end());
    r.max_slope = s.max_slope;
    const auto peak = std::max_element(r.max_slope.begin(), r.max_slope.end());
    r.growth = r.max_slope.front() > 0.0 ? *peak / r.max_slope.front() : 0.0;
    r.time_of_max = r.times[static_cast<std::size_t>(peak - r.max_slope.begin())];
  } catch (const StepSizeError& e) {
    r.completed = false;
    r.failure = e.what();
  }
  return r;
}

// ---------------------------------------------------------------------------

nlohmann::json describe(const CommutatorStudy& s) {
  return {{"epsilons", numbers(s.epsilons)}, {"values", numbers(s.values)},   {"orders", numbers(s.orders)},
          {"fitted_order", s.fitted_order},   {"strictly_decreasing", s.decreasing}, {"n_paths", s.n_paths}};
}

nlohmann::json describe(const BoundsReport& s) {
  return {{"times", numbers(s.times)},
          {"mean_l2_squared", numbers(s.mean_l2_squared)},
          {"std_error", numbers(s.std_error)},
          {"moment_max", numbers(s.moment_max)},
          {"moment_max_std_error", numbers(s.moment_max_std_error)},
          {"bound", numbers(s.bound)},
          {"within_bound", s.within},
          {"all_within_bound", s.all_within()},
          {"initial_l2_squared", s.initial_l2_squared},
          {"max_mass_drift", s.max_mass_drift},
          {"min_value", s.min_value},
          {"min_jacobian", s.min_jacobian},
          {"boundary_excursions", s.boundary_excursions},
          {"n_paths", s.n_paths}};
}

nlohmann::json describe(const MomentStability& s) {
  return {{"epsilons", numbers(s.epsilons)},
          {"max_moment", numbers(s.max_moment)},
          {"max_std_error", numbers(s.max_std_error)},
          {"ratio", s.ratio},
          {"zero_drift_control", {{"max", s.control_max}, {"min", s.control_min}, {"std_error", s.control_std_error}}},
          {"n_paths", s.n_paths}};
}

nlohmann::json describe(const UniquenessStudy& s) {
  return {{"distances", numbers(s.distances)}, {"std_errors", numbers(s.std_errors)},
          {"orders", numbers(s.orders)},       {"strictly_decreasing", s.decreasing},
          {"n_paths", s.n_paths},              {"note", s.note}};
}

nlohmann::json describe(const ConvergenceStudy& s) {
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& lv : s.levels) {
    levels.push_back({{"dx", lv.dx},
                      {"dt", lv.dt},
                      {"eps_flux", lv.eps_flux},
                      {"eps_initial", lv.eps_initial},
                      {"max_mass_drift", lv.max_mass_drift},
                      {"translation_error", lv.translation_error},
                      {"marching_gap", lv.marching_gap},
                      {"residual_rms", lv.residual_rms},
                      {"boundary_excursions", lv.boundary_excursions}});
  }
  return {{"levels", levels},
          {"translation_orders", numbers(s.translation_orders)},
          {"translation_fitted_order", s.translation_fitted_order},
          {"gap_orders", numbers(s.gap_orders)},
          {"gap_fitted_order", s.gap_fitted_order},
          {"residual_decreasing", s.residual_decreasing},
          {"n_paths", s.n_paths}};
}

nlohmann::json describe(const SteepeningReport& s) {
  nlohmann::json j = {{"growth", s.growth}, {"time_of_max", s.time_of_max}, {"completed", s.completed}};
  if (!s.max_slope.empty()) {
    j["initial_max_slope"] = s.max_slope.front();
    j["peak_max_slope"] = *std::max_element(s.max_slope.begin(), s.max_slope.end());
  }
  if (!s.completed) j["failure"] = s.failure;
  return j;
}

nlohmann::json describe(const HypothesisReport& s) {
  nlohmann::json j = {{"flux_l1_sup", s.flux_l1_sup},
                      {"flux_sup", s.flux_sup},
                      {"time_rate_l1_sup", s.time_rate_l1_sup},
                      {"z_slope_sup", s.z_slope_sup},
                      {"z_curvature_l2_l1_sup", s.z_curv_l2_l1_sup},
                      {"all_finite", s.all_finite()},
                      {"resolution", {{"n_t", s.resolution.n_t}, {"n_x", s.resolution.n_x}, {"n_z", s.resolution.n_z}}},
                      {"box",
                       {{"t", {s.box.t_min, s.box.t_max}},
                        {"x", {s.box.x_min, s.box.x_max}},
                        {"z", {s.box.z_min, s.box.z_max}}}}};
  if (s.non_finite) {
    j["non_finite"] = {{"quantity", s.non_finite->quantity}, {"t", s.non_finite->t}, {"x", s.non_finite->x},
                       {"z", s.non_finite->z}};
  }
  return j;
}

}  // namespace snlcl
