#include "snlcl/flux.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "snlcl/errors.hpp"

namespace snlcl {

FluxModel FluxModel::separable(std::string name, SeparableParts parts, FluxTraits traits) {
  if (!parts.space || !parts.time || !parts.time_rate || !parts.z || !parts.z_slope || !parts.z_curvature) {
    throw InvalidArgument("separable flux '" + name + "' is missing a factor");
  }
  FluxModel m;
  m.name_ = std::move(name);
  m.traits_ = std::move(traits);
  m.f_ = [p = parts](double t, double x, double z) { return p.time(t) * p.space(x) * p.z(z); };
  m.f_t_ = [p = parts](double t, double x, double z) { return p.time_rate(t) * p.space(x) * p.z(z); };
  m.f_z_ = [p = parts](double t, double x, double z) { return p.time(t) * p.space(x) * p.z_slope(z); };
  m.f_zz_ = [p = parts](double t, double x, double z) { return p.time(t) * p.space(x) * p.z_curvature(z); };
  m.parts_ = std::move(parts);
  return m;
}

FluxModel FluxModel::general(std::string name, FluxFn f, FluxFn f_t, FluxFn f_z, FluxFn f_zz, FluxTraits traits) {
  if (!f || !f_t || !f_z || !f_zz) throw InvalidArgument("flux '" + name + "' is missing an evaluator");
  FluxModel m;
  m.name_ = std::move(name);
  m.traits_ = std::move(traits);
  m.f_ = std::move(f);
  m.f_t_ = std::move(f_t);
  m.f_z_ = std::move(f_z);
  m.f_zz_ = std::move(f_zz);
  return m;
}

// ---------------------------------------------------------------------------

RegularizedFlux::RegularizedFlux(FluxModel base, double epsilon, Grid grid)
    : base_(std::move(base)), epsilon_(epsilon), grid_(grid), mollifier_(epsilon), weights_() {
  if (epsilon < 4.0 * grid_.dx() * (1.0 - 1e-12)) {
    throw ResolutionError("flux mollification width " + std::to_string(epsilon) + " is below 4 dx = " +
                          std::to_string(4.0 * grid_.dx()));
  }
  weights_ = discretize(mollifier_, grid_.dx());
  if (const auto& parts = base_.parts()) {
    const auto n = static_cast<std::ptrdiff_t>(grid_.n_nodes());
    space_table_.resize(static_cast<std::size_t>(n + 2));
    for (std::ptrdiff_t i = -1; i <= n; ++i) {
      double acc = 0.0;
      for (std::size_t k = 0; k < weights_.weights.size(); ++k) {
        const std::ptrdiff_t m = weights_.first_offset + static_cast<std::ptrdiff_t>(k);
        acc += weights_.weights[k] * parts->space(grid_.node(i - m));
      }
      space_table_[static_cast<std::size_t>(i + 1)] = acc;
    }
  }
}

template <class Sampler>
double RegularizedFlux::lattice_average(double x, Sampler&& sample) const {
  const double h = grid_.dx();
  const auto j_lo = static_cast<std::ptrdiff_t>(std::ceil((x - epsilon_ - grid_.x_min()) / h));
  const auto j_hi = static_cast<std::ptrdiff_t>(std::floor((x + epsilon_ - grid_.x_min()) / h));
  double num = 0.0;
  double den = 0.0;
  for (std::ptrdiff_t j = j_lo; j <= j_hi; ++j) {
    const double xj = grid_.node(j);
    const double w = mollifier_(x - xj);
    if (w == 0.0) continue;
    num += w * sample(xj);
    den += w;
  }
  return den > 0.0 ? num / den : 0.0;
}

double RegularizedFlux::value(double t, double x, double z) const {
  if (const auto& parts = base_.parts()) {
    const double scale = parts->time(t) * parts->z(z);
    if (scale == 0.0) return 0.0;
    return scale * lattice_average(x, [&](double xj) { return parts->space(xj); });
  }
  return lattice_average(x, [&](double xj) { return base_(t, xj, z); });
}

double RegularizedFlux::dz(double t, double x, double z) const {
  if (const auto& parts = base_.parts()) {
    const double scale = parts->time(t) * parts->z_slope(z);
    if (scale == 0.0) return 0.0;
    return scale * lattice_average(x, [&](double xj) { return parts->space(xj); });
  }
  return lattice_average(x, [&](double xj) { return base_.dz(t, xj, z); });
}

double RegularizedFlux::dx(double t, double x, double z) const {
  const double h = grid_.dx();
  return (value(t, x + h, z) - value(t, x - h, z)) / (2.0 * h);
}

DriftField RegularizedFlux::drift_field(double t, const Field& conv) const {
  DriftField out;
  drift_field(t, conv, out);
  return out;
}

void RegularizedFlux::drift_field(double t, const Field& conv, DriftField& out) const {
  if (!(conv.grid() == grid_)) throw InvalidArgument("drift_field: conv lives on a different grid");
  const std::size_t n = grid_.n_nodes();
  out.time = t;
  out.drift.resize(n);
  out.rate.resize(n);
  const double inv_2h = 1.0 / (2.0 * grid_.dx());

  if (const auto& parts = base_.parts()) {
    const double a = parts->time(t);
    if (!base_.nonlocal()) {
      const double g = parts->z(0.0);
      for (std::size_t i = 0; i < n; ++i) {
        out.drift[i] = a * space_table_[i + 1] * g;
        out.rate[i] = a * (space_table_[i + 2] - space_table_[i]) * inv_2h * g;
      }
      return;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double z = conv[i];
      const double g = parts->z(z);
      const double b = space_table_[i + 1];
      const double b_slope = (space_table_[i + 2] - space_table_[i]) * inv_2h;
      out.drift[i] = a * b * g;
      out.rate[i] = a * (b_slope * g + b * parts->z_slope(z) * central_slope(conv, i));
    }
    return;
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid_.node(static_cast<std::ptrdiff_t>(i));
    const double z = conv[i];
    out.drift[i] = value(t, x, z);
    out.rate[i] = dx(t, x, z) + dz(t, x, z) * central_slope(conv, i);
  }
}

double RegularizedFlux::max_rate(double horizon, double z_bound, double slope_bound) const {
  constexpr int kTimeSamples = 17;
  constexpr int kZSamples = 65;
  auto time_at = [&](int k) { return horizon * static_cast<double>(k) / (kTimeSamples - 1); };
  auto z_at = [&](int k) { return z_bound * (2.0 * static_cast<double>(k) / (kZSamples - 1) - 1.0); };

  if (const auto& parts = base_.parts()) {
    double a_max = 0.0;
    for (int k = 0; k < kTimeSamples; ++k) a_max = std::max(a_max, std::abs(parts->time(time_at(k))));
    double g_max = 0.0;
    double g_slope_max = 0.0;
    for (int k = 0; k < kZSamples; ++k) {
      g_max = std::max(g_max, std::abs(parts->z(z_at(k))));
      g_slope_max = std::max(g_slope_max, std::abs(parts->z_slope(z_at(k))));
    }
    double b_max = 0.0;
    double b_slope_max = 0.0;
    const double inv_2h = 1.0 / (2.0 * grid_.dx());
    for (std::size_t i = 0; i < grid_.n_nodes(); ++i) {
      b_max = std::max(b_max, std::abs(space_table_[i + 1]));
      b_slope_max = std::max(b_slope_max, std::abs(space_table_[i + 2] - space_table_[i]) * inv_2h);
    }
    if (!base_.nonlocal()) g_slope_max = 0.0;
    return a_max * (b_slope_max * g_max + b_max * g_slope_max * slope_bound);
  }

  constexpr int kCoarseT = 5;
  constexpr int kCoarseZ = 9;
  double rate = 0.0;
  for (int kt = 0; kt < kCoarseT; ++kt) {
    const double t = horizon * kt / (kCoarseT - 1);
    for (int kz = 0; kz < kCoarseZ; ++kz) {
      const double z = z_bound * (2.0 * kz / (kCoarseZ - 1) - 1.0);
      for (std::size_t i = 0; i < grid_.n_nodes(); ++i) {
        const double x = grid_.node(static_cast<std::ptrdiff_t>(i));
        rate = std::max(rate, std::abs(dx(t, x, z)) + std::abs(dz(t, x, z)) * slope_bound);
      }
    }
  }
  return rate;
}

double total_spatial_derivative(const RegularizedFlux& flux, double t, double x, const Field& conv) {
  const Grid& g = conv.grid();
  const double h = g.dx();
  const double slack = 1e-12 * h;
  if (x - h < g.x_min() - slack || x + h > g.x_max() + slack) {
    throw DomainError("total_spatial_derivative: x = " + std::to_string(x) + " is too close to the grid edge");
  }
  const double z = interpolate(conv, x);
  const double conv_slope = (interpolate(conv, x + h) - interpolate(conv, x - h)) / (2.0 * h);
  return flux.dx(t, x, z) + flux.dz(t, x, z) * conv_slope;
}

// ---------------------------------------------------------------------------

bool HypothesisReport::all_finite() const noexcept {
  return !non_finite && std::isfinite(flux_l1_sup) && std::isfinite(flux_sup) && std::isfinite(time_rate_l1_sup) &&
         std::isfinite(z_slope_sup) && std::isfinite(z_curv_l2_l1_sup);
}

namespace {

double axis_point(double lo, double hi, std::size_t k, std::size_t n) {
  if (n < 2) return lo;
  return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
}

double trapezoid(const std::vector<double>& v, double h) {
  if (v.size() < 2) return 0.0;
  double sum = 0.5 * (v.front() + v.back());
  for (std::size_t i = 1; i + 1 < v.size(); ++i) sum += v[i];
  return sum * h;
}

}  // namespace

HypothesisReport verify_hypothesis(const FluxModel& flux, const HypothesisBox& box,
                                   const HypothesisResolution& res) {
  if (res.n_x < 2 || res.n_z < 1 || res.n_t < 1) throw InvalidArgument("verify_hypothesis: resolution too coarse");
  if (!(box.x_min < box.x_max) || box.z_min > box.z_max || box.t_min > box.t_max) {
    throw InvalidArgument("verify_hypothesis: malformed box");
  }
  HypothesisReport rep;
  rep.box = box;
  rep.resolution = res;

  const double hx = (box.x_max - box.x_min) / static_cast<double>(res.n_x - 1);
  std::vector<double> sup_f(res.n_x), sup_ft(res.n_x), sup_fzz(res.n_x);
  std::vector<double> curv_l1_by_t(res.n_t, 0.0);

  auto check = [&](double v, const char* what, double t, double x, double z) {
    if (std::isfinite(v)) return std::abs(v);
    if (!rep.non_finite) rep.non_finite = NonFiniteSample{what, t, x, z};
    return 0.0;
  };

  for (std::size_t kt = 0; kt < res.n_t; ++kt) {
    const double t = axis_point(box.t_min, box.t_max, kt, res.n_t);
    for (std::size_t kx = 0; kx < res.n_x; ++kx) {
      const double x = box.x_min + hx * static_cast<double>(kx);
      double mf = 0.0, mft = 0.0, mfzz = 0.0;
      for (std::size_t kz = 0; kz < res.n_z; ++kz) {
        const double z = axis_point(box.z_min, box.z_max, kz, res.n_z);
        const double f = check(flux(t, x, z), "F", t, x, z);
        const double ft = check(flux.dt(t, x, z), "F1", t, x, z);
        const double fz = check(flux.dz(t, x, z), "F3", t, x, z);
        const double fzz = check(flux.dzz(t, x, z), "F33", t, x, z);
        mf = std::max(mf, f);
        mft = std::max(mft, ft);
        mfzz = std::max(mfzz, fzz);
        rep.flux_sup = std::max(rep.flux_sup, f);
        rep.z_slope_sup = std::max(rep.z_slope_sup, fz);
      }
      sup_f[kx] = mf;
      sup_ft[kx] = mft;
      sup_fzz[kx] = mfzz;
    }
    rep.flux_l1_sup = std::max(rep.flux_l1_sup, trapezoid(sup_f, hx));
    rep.time_rate_l1_sup = std::max(rep.time_rate_l1_sup, trapezoid(sup_ft, hx));
    const double c = trapezoid(sup_fzz, hx);
    curv_l1_by_t[kt] = c * c;
  }
  const double ht = res.n_t < 2 ? 0.0 : (box.t_max - box.t_min) / static_cast<double>(res.n_t - 1);
  rep.z_curv_l2_l1_sup = std::sqrt(trapezoid(curv_l1_by_t, ht));
  return rep;
}

// ---------------------------------------------------------------------------

std::vector<ModelInfo> builtin_models() {
  return {
      {"zero_flux", "F = 0", false},
      {"constant_drift", "F = c", false},
      {"linear_irregular", "F = b(x), b = A tanh(x/w) on |x| < L, zero outside: jumps at +-L", false},
      {"discontinuous_flux", "F = A 1{|x| < L} / (1 + z^2), only meaningful after mollification", false},
      {"smooth_nonlocal", "F = A K_R(x) / (1 + z^2), K_R a unit-mass bump of radius R", false},
      {"burgers_like", "F = A z, violates spatial integrability; shock demonstration only", true},
  };
}

FluxModel make_builtin(const std::string& name, const FluxParams& p) {
  const double amp = p.amplitude;
  const double half = p.half_width;

  if (name == "zero_flux") {
    SeparableParts parts;
    parts.space = [](double) { return 0.0; };
    return FluxModel::separable(name, std::move(parts), FluxTraits{.nonlocal = false});
  }
  if (name == "constant_drift") {
    SeparableParts parts;
    parts.space = [c = p.speed](double) { return c; };
    return FluxModel::separable(name, std::move(parts), FluxTraits{.nonlocal = false});
  }
  if (name == "linear_irregular") {
    if (!(p.step_width > 0.0) || !(half > 0.0)) throw InvalidArgument("linear_irregular needs step_width, half_width > 0");
    SeparableParts parts;
    parts.space = [amp, half, w = p.step_width](double x) {
      return std::abs(x) < half ? amp * std::tanh(x / w) : 0.0;
    };
    return FluxModel::separable(name, std::move(parts),
                                FluxTraits{.spatially_smooth = false, .nonlocal = false, .jumps = {-half, half}});
  }
  if (name == "discontinuous_flux") {
    if (!(half > 0.0)) throw InvalidArgument("discontinuous_flux needs half_width > 0");
    SeparableParts parts;
    parts.space = [amp, half](double x) { return std::abs(x) < half ? amp : 0.0; };
    parts.z = [](double z) { return 1.0 / (1.0 + z * z); };
    parts.z_slope = [](double z) {
      const double q = 1.0 + z * z;
      return -2.0 * z / (q * q);
    };
    parts.z_curvature = [](double z) {
      const double q = 1.0 + z * z;
      return (6.0 * z * z - 2.0) / (q * q * q);
    };
    return FluxModel::separable(
        name, std::move(parts),
        FluxTraits{.spatially_smooth = false, .requires_regularization = true, .jumps = {-half, half}});
  }
  if (name == "smooth_nonlocal") {
    const BumpKernel bump(0.0, p.bump_radius);
    SeparableParts parts;
    parts.space = [amp, bump](double x) { return amp * bump(x); };
    parts.z = [](double z) { return 1.0 / (1.0 + z * z); };
    parts.z_slope = [](double z) {
      const double q = 1.0 + z * z;
      return -2.0 * z / (q * q);
    };
    parts.z_curvature = [](double z) {
      const double q = 1.0 + z * z;
      return (6.0 * z * z - 2.0) / (q * q * q);
    };
    return FluxModel::separable(name, std::move(parts));
  }
  if (name == "burgers_like") {
    SeparableParts parts;
    parts.space = [amp](double) { return amp; };
    parts.z = [](double z) { return z; };
    parts.z_slope = [](double) { return 1.0; };
    return FluxModel::separable(name, std::move(parts), FluxTraits{.demo_only = true});
  }
  throw InvalidArgument("unknown flux model '" + name + "'");
}

}  // namespace snlcl
