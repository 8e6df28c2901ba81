#include <doctest.h>

#include <cmath>

#include "snlcl/errors.hpp"
#include "snlcl/solver.hpp"

using namespace snlcl;

namespace {

SolverConfig small(const std::string& flux, std::size_t cells = 256, std::size_t steps = 64) {
  SolverConfig c;
  c.grid = Grid(-8.0, 8.0, cells);
  c.times = uniform_time_grid(0.5, steps);
  c.flux = make_builtin(flux);
  c.eps_flux = 8 * c.grid.dx();
  c.eps_initial = 4 * c.grid.dx();
  c.output_indices = {steps / 2, steps};
  return c;
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("smooth step") {
  CHECK(smooth_step(-0.3) == 0.0);
  CHECK(smooth_step(1.2) == 1.0);
  CHECK(smooth_step(0.5) == doctest::Approx(0.5));
  double prev = 0.0;
  for (double s = 0.01; s < 1.0; s += 0.01) {
    CHECK(smooth_step(s) + smooth_step(1.0 - s) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(smooth_step(s) >= prev);
    prev = smooth_step(s);
  }
}

TEST_CASE("initial data") {
  InitialDatum bump{InitialDatum::Shape::bump, 0.5, 2.0, 3.0};
  Grid g(-4.0, 4.0, 4096);
  CHECK(integral(Field::sample(g, [&](double x) { return bump(x); })) == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(bump.support_lo() == -1.5);
  CHECK(bump(2.6) == 0.0);

  InitialDatum plateau{InitialDatum::Shape::plateau, 0.0, 1.5, 2.0, 1.0};
  CHECK(plateau(0.0) == 2.0);
  CHECK(plateau(1.5) == doctest::Approx(1.0));
  CHECK(plateau(-1.5) == doctest::Approx(1.0));
  CHECK(plateau(2.01) == 0.0);
  // half-height width times height
  CHECK(integral(Field::sample(g, [&](double x) { return plateau(x); })) == doctest::Approx(6.0).epsilon(1e-9));
}

TEST_CASE("config validation") {
  auto c = small("smooth_nonlocal");
  CHECK(c.violations().empty());
  c.eps_flux = c.grid.dx();
  CHECK_FALSE(c.violations().empty());
  CHECK_THROWS_AS(c.validate(), ConfigError);

  auto d = small("smooth_nonlocal");
  d.initial.center = 7.0;
  CHECK_FALSE(d.violations().empty());

  auto e = small("burgers_like", 256, 2);
  CHECK(max_stable_step(e) < 0.25);
  CHECK_FALSE(e.violations().empty());

  auto f = small("zero_flux");
  f.output_indices = {65};
  CHECK_FALSE(f.violations().empty());
}

TEST_CASE("regularized initial datum keeps its mass") {
  auto c = small("zero_flux", 512);
  auto u0 = regularized_initial(c);
  CHECK(integral(u0) == doctest::Approx(c.initial.scale).epsilon(1e-9));
}

TEST_CASE("zero flux: one sweep, exact translation, marching agrees bitwise") {
  auto c = small("zero_flux");
  auto path = sample_path(3, 0, c.times);
  auto sol = solve_picard(c, path);
  CHECK(sol.iterations_used == 1);
  CHECK(sol.converged);
  CHECK(sol.mass_drift() < 1e-12);
  auto u0 = regularized_initial(c);
  const double b = path.value(64);
  auto shifted = Field::sample(c.grid, [&](double x) { return interpolate(u0, x - b); });
  auto& uT = sol.snapshots.back();
  for (std::size_t i = 0; i < uT.size(); ++i) CHECK(std::abs(uT[i] - shifted[i]) < 1e-12);

  auto m = solve_marching(c, path);
  REQUIRE(m.snapshots.size() == sol.snapshots.size());
  for (std::size_t k = 0; k < m.snapshots.size(); ++k)
    for (std::size_t i = 0; i < m.snapshots[k].size(); ++i) CHECK(m.snapshots[k][i] == sol.snapshots[k][i]);
}

TEST_CASE("picard sweeps contract for the smooth nonlocal flux") {
  auto c = small("smooth_nonlocal", 512, 128);
  c.flux = make_builtin("smooth_nonlocal", FluxParams{.amplitude = 2.0});
  c.initial.scale = 2.0;
  c.picard_tol = 1e-12;
  c.picard_max_iters = 8;
  auto sol = solve_picard(c, sample_path(4, 1, c.times));
  REQUIRE(sol.distances.size() >= 3);
  for (std::size_t k = 1; k + 1 < sol.distances.size(); ++k) {
    if (sol.distances[k] < 1e-13) break;
    CHECK(sol.distances[k + 1] <= 0.9 * sol.distances[k]);
  }
  CHECK(sol.min_value >= 0.0);
  for (double d : sol.iterate_mass_drift) CHECK(d < 1e-3);
  CHECK(sol.flows.size() == sol.output_indices.size());
  CHECK(sol.conv_history.size() == c.times.size());
}

TEST_CASE("marching stays close to picard") {
  auto c = small("smooth_nonlocal", 512, 128);
  c.picard_tol = 1e-12;
  auto path = sample_path(4, 2, c.times);
  auto p = solve_picard(c, path);
  auto m = solve_marching(c, path);
  CHECK(l1_distance(p.snapshots.back(), m.snapshots.back()) < 1e-2);
  CHECK(m.min_value >= 0.0);
}

TEST_CASE("path on another time grid is rejected") {
  auto c = small("zero_flux");
  CHECK_THROWS_AS(solve_picard(c, sample_path(1, 0, uniform_time_grid(0.5, 32))), InvalidArgument);
}

TEST_CASE("weak residual") {
  auto c = small("zero_flux", 512, 128);
  auto sol = solve_picard(c, sample_path(8, 0, c.times));
  auto r = weak_residual(sol, BumpKernel(0.0, 4.0), c.flux);
  CHECK(r.series.size() == c.times.size() - 1);
  CHECK(r.values.size() == sol.output_indices.size());
  CHECK(std::abs(r.final_value()) < 5e-3);
  CHECK(r.values.back() == r.series.back());
  CHECK_THROWS_AS(weak_residual(sol, BumpKernel(7.0, 2.0), c.flux), DomainError);
}

}  // TEST_SUITE
