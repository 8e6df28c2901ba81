#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "snlcl/brownian.hpp"
#include "snlcl/ensemble.hpp"
#include "snlcl/errors.hpp"
#include "snlcl/flow.hpp"

using namespace snlcl;

namespace {

FluxModel linear_drift(double a) {
  SeparableParts parts;
  parts.space = [a](double x) { return a * x; };
  return FluxModel::separable("linear", parts, FluxTraits{.nonlocal = false});
}

}  // namespace

TEST_SUITE("stochastic_flow") {

TEST_CASE("counter normals obey the law of large numbers") {
  const int n = 100000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = counter_normal(7, 3, static_cast<std::uint64_t>(i));
    s += z;
    s2 += z * z;
  }
  const double mean = s / n, var = s2 / n - mean * mean;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(double(n)));
  CHECK(std::abs(var - 1.0) < 0.05);
  CHECK(counter_normal(7, 3, 11) == counter_normal(7, 3, 11));
  CHECK(counter_normal(7, 3, 11) != counter_normal(7, 4, 11));
  CHECK(counter_normal(7, 3, 11) != counter_normal(8, 3, 11));
}

TEST_CASE("brownian increments have the right variance and distinct paths decorrelate") {
  auto times = uniform_time_grid(1.0, 1000);
  double sq = 0.0, cross = 0.0;
  const int paths = 200;
  for (int p = 0; p < paths; ++p) {
    auto a = sample_path(11, p, times);
    auto b = sample_path(11, p + 1000, times);
    CHECK(a.value(0) == 0.0);
    sq += a.value(1000) * a.value(1000);
    cross += a.value(1000) * b.value(1000);
  }
  // E B_1^2 = 1, sample SE of the mean of chi^2_1 is sqrt(2/200) = 0.1
  CHECK(std::abs(sq / paths - 1.0) < 0.4);
  CHECK(std::abs(cross / paths) < 0.3);
}

TEST_CASE("paths are reproducible and restrict exactly") {
  auto fine = uniform_time_grid(0.5, 64);
  auto a = sample_path(5, 2, fine), b = sample_path(5, 2, fine);
  for (std::size_t k = 0; k <= 64; ++k) CHECK(a.value(k) == b.value(k));
  auto c = a.coarsen(4);
  CHECK(c.n_steps() == 16);
  for (std::size_t k = 0; k <= 16; ++k) {
    CHECK(c.value(k) == a.value(4 * k));
    CHECK(c.time(k) == a.time(4 * k));
  }
  auto coarse_times = uniform_time_grid(0.5, 8);
  CHECK(nested_in(coarse_times, fine));
  CHECK_FALSE(nested_in(uniform_time_grid(0.5, 6), fine));
  auto r = a.restrict_to(coarse_times);
  for (std::size_t k = 0; k <= 8; ++k) CHECK(r.value(k) == a.value(8 * k));
  CHECK_THROWS_AS(a.restrict_to(uniform_time_grid(0.5, 6)), InvalidArgument);
  CHECK_THROWS_AS(a.coarsen(5), InvalidArgument);
}

TEST_CASE("zero drift flow is the Brownian shift") {
  Grid g(-4.0, 4.0, 128);
  RegularizedFlux rf(make_builtin("zero_flux"), 0.25, g);
  auto path = sample_path(1, 0, uniform_time_grid(0.5, 32));
  std::vector<Field> conv{Field::zeros(g)};
  auto map = forward_flow(rf, conv, path, 0, 32);
  for (std::size_t i = 0; i < g.n_nodes(); ++i) {
    CHECK(map.positions[i] == doctest::Approx(g.node(i) + path.value(32)).epsilon(1e-13));
    CHECK(map.jacobians[i] == 1.0);
  }
}

TEST_CASE("constant drift flow is exact") {
  Grid g(-4.0, 4.0, 128);
  FluxParams p;
  p.speed = 0.75;
  RegularizedFlux rf(make_builtin("constant_drift", p), 0.25, g);
  auto path = sample_path(2, 3, uniform_time_grid(1.0, 50));
  std::vector<Field> conv{Field::zeros(g)};
  auto map = forward_flow(rf, conv, path, 10, 50);
  for (std::size_t i = 0; i < g.n_nodes(); i += 5) {
    const double exact = g.node(i) + 0.75 * 0.8 + path.value(50) - path.value(10);
    CHECK(std::abs(map.positions[i] - exact) < 1e-12);
  }
  auto back = backward_flow(rf, conv, path, 10, 50, map.positions);
  for (std::size_t i = 0; i < g.n_nodes(); i += 5) CHECK(std::abs(back[i] - g.node(i)) < 1e-12);
}

TEST_CASE("linear drift Jacobian tracks exp(aT)") {
  const double a = 0.5, T = 1.0;
  Grid g(-2.0, 2.0, 64);
  RegularizedFlux rf(linear_drift(a), 0.25, g);
  std::vector<Field> conv{Field::zeros(g)};
  for (std::size_t n : {64, 128, 256}) {
    auto path = sample_path(3, 0, uniform_time_grid(T, n));
    auto map = forward_flow(rf, conv, path, 0, n);
    const double dt = T / n;
    // |(1 + a dt)^n - e^{aT}| <= a^2 T dt / 2 e^{aT}
    const double bound = a * a * T * dt / 2.0 * std::exp(a * T);
    for (std::size_t i = 20; i < 45; ++i) CHECK(std::abs(map.jacobians[i] - std::exp(a * T)) <= bound);
  }
}

TEST_CASE("inverse flow undoes the forward map") {
  Grid g(-6.0, 6.0, 256);
  auto flux = make_builtin("smooth_nonlocal");
  RegularizedFlux rf(flux, 0.2, g);
  auto conv = Field::sample(g, [](double x) { return 0.5 * std::exp(-x * x); });
  std::vector<Field> hist{conv};
  auto path = sample_path(9, 1, uniform_time_grid(0.5, 64));
  auto map = forward_flow(rf, hist, path, 0, 64);
  InverseFlow inv(map);
  for (std::size_t i = 30; i < 220; i += 9) {
    auto pre = inv(map.positions[i]);
    CHECK(pre.position == doctest::Approx(g.node(i)).epsilon(1e-12));
    CHECK(pre.jacobian == doctest::Approx(1.0 / map.jacobians[i]).epsilon(1e-9));
    CHECK(pre.inside);
  }
  ExcursionCounter out;
  auto far = inv(map.positions.back() + 1.0, &out);
  CHECK_FALSE(far.inside);
  CHECK(out.count == 1);

  // backward SDE from X(x) lands back on x up to the time-discretization error
  std::vector<double> q(map.positions.begin() + 60, map.positions.begin() + 200);
  auto back = backward_flow(rf, hist, path, 0, 64, q);
  for (std::size_t j = 0; j < q.size(); j += 7) CHECK(std::abs(back[j] - g.node(60 + j)) < 0.02);
}

TEST_CASE("push forward of a shift preserves mass and shape") {
  Grid g(-6.0, 6.0, 600);
  auto u0 = Field::sample(g, [](double x) { return std::exp(-4 * x * x); });
  RegularizedFlux rf(make_builtin("zero_flux"), 0.2, g);
  std::vector<Field> conv{Field::zeros(g)};
  auto path = sample_path(4, 0, uniform_time_grid(0.25, 16));
  auto map = forward_flow(rf, conv, path, 0, 16);
  auto u = push_forward(u0, map, 0.25);
  CHECK(integral(u) == doctest::Approx(integral(u0)).epsilon(1e-6));
  const double b = path.value(16);
  for (std::size_t i = 200; i < 400; i += 10) CHECK(std::abs(u[i] - std::exp(-4 * (g.node(i) - b) * (g.node(i) - b))) < 1e-3);
}

TEST_CASE("compressing drift that crosses characteristics is rejected") {
  Grid g(-2.0, 2.0, 64);
  RegularizedFlux rf(linear_drift(-40.0), 0.25, g);
  std::vector<Field> conv{Field::zeros(g)};
  auto path = sample_path(3, 0, uniform_time_grid(1.0, 8));
  CHECK_THROWS_AS(forward_flow(rf, conv, path, 0, 8), StepSizeError);
}

TEST_CASE("inverse Jacobian moment without drift is one with zero error") {
  Grid g(-4.0, 4.0, 64);
  RegularizedFlux rf(make_builtin("zero_flux"), 0.5, g);
  std::vector<Field> conv{Field::zeros(g)};
  std::vector<FlowMap> maps;
  for (int p = 0; p < 5; ++p) maps.push_back(forward_flow(rf, conv, sample_path(1, p, uniform_time_grid(0.5, 8)), 0, 8));
  auto m = jacobian_inverse_moment(maps);
  CHECK(m.max_mean() == 1.0);
  for (double se : m.std_error) CHECK(se == 0.0);
  CHECK(m.n_paths == 5);
  CHECK_THROWS_AS(jacobian_inverse_moment(std::span<const FlowMap>(maps.data(), 1)), InvalidArgument);
}

TEST_CASE("map_paths keeps index order and reports the first failure") {
  auto sq = map_paths(50, [](std::size_t i) { return i * i; }, 4);
  for (std::size_t i = 0; i < 50; ++i) CHECK(sq[i] == i * i);
  auto boom = [](std::size_t i) -> int {
    if (i == 7 || i == 31) throw std::runtime_error(std::to_string(i));
    return 0;
  };
  try {
    map_paths(40, boom, 3);
    FAIL("expected a throw");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "7");
  }
}

}  // TEST_SUITE
