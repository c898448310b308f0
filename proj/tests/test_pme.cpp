#include <cmath>

#include "doctest.h"
#include "pmm/errors.hpp"
#include "pmm/pme.hpp"

using namespace pmm;

namespace {

double linf(const DensityGrid& a, const DensityGrid& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

// Coarse-grid L-infinity distance of a finer solution sampled at the coarse nodes.
double restricted_distance(const DensityGrid& coarse, const DensityGrid& fine) {
  double m = 0.0;
  for (int i = 0; i <= coarse.J(); ++i)
    m = std::max(m, std::abs(coarse.values[static_cast<std::size_t>(i)] - fine.at(coarse.node(i))));
  return m;
}

TestFunction sine_test() {
  return {[](double, double u) { return std::sin(M_PI * u); },
          [](double, double) { return 0.0; },
          [](double, double u) { return M_PI * std::cos(M_PI * u); },
          [](double, double u) { return -M_PI * M_PI * std::sin(M_PI * u); },
          true,
          "sin(pi u)"};
}

}  // namespace

TEST_CASE("stationary profile examples") {
  const auto d = BoundaryCondition::dirichlet(0.2, 0.8);
  CHECK(stationary_profile(d, 0.0) == doctest::Approx(0.2));
  CHECK(stationary_profile(d, 1.0) == doctest::Approx(0.8));
  const BoundaryCondition d01{BoundaryCondition::Kind::Dirichlet, 0.0, 0.0, 1.0};
  CHECK(stationary_profile(d01, 0.25) == doctest::Approx(0.5));
  const auto n = BoundaryCondition::neumann(0.2, 0.8);
  for (double u : {0.0, 0.3, 1.0}) CHECK(stationary_profile(n, u) == doctest::Approx(0.5));
  for (double kappa : {0.3, 1.0, 7.0}) {
    const auto r = BoundaryCondition::robin(kappa, 0.4, 0.4);
    for (double u : {0.0, 0.5, 1.0}) CHECK(stationary_profile(r, u) == doctest::Approx(0.4));
  }
  CHECK_THROWS_AS(stationary_profile(d, 1.5), InputError);
}

TEST_CASE("Robin stationary profile satisfies both boundary relations") {
  const double kappa = 1.7, alpha = 0.15, beta = 0.85;
  const auto bc = BoundaryCondition::robin(kappa, alpha, beta);
  const double b = std::pow((kappa * alpha + (alpha + beta) * (alpha + beta)) / (2 * (alpha + beta) + kappa), 2);
  const double a = kappa * (std::sqrt(b) - alpha);
  // rho^2 = a u + b, so d_u rho^2 = a everywhere.
  const double r0 = stationary_profile(bc, 0.0), r1 = stationary_profile(bc, 1.0);
  CHECK(r0 * r0 == doctest::Approx(b));
  CHECK(a == doctest::Approx(kappa * (r0 - alpha)));
  CHECK(a == doctest::Approx(kappa * (beta - r1)));
}

TEST_CASE("boundary condition validation") {
  CHECK_THROWS_AS(BoundaryCondition::dirichlet(1.2, 0.5).validate(), InputError);
  CHECK_THROWS_AS(BoundaryCondition::robin(-1.0, 0.5, 0.5).validate(), InputError);
  CHECK_NOTHROW(BoundaryCondition::neumann(0.0, 1.0).validate());
  CHECK(BoundaryCondition::neumann().is_neumann());
}

TEST_CASE("constant density is a Neumann fixed point") {
  const auto bc = BoundaryCondition::neumann();
  const DensityGrid g = initial_grid([](double) { return 0.37; }, 64, bc);
  const DensityGrid next = pde_step(g, default_time_step(g.du, bc), bc);
  for (double v : next.values) CHECK(v == 0.37);
}

TEST_CASE("scheme errors") {
  const auto bc = BoundaryCondition::dirichlet(0.2, 0.8);
  const DensityGrid g = initial_grid([](double) { return 0.5; }, 32, bc);
  CHECK_THROWS_AS(pde_step(g, 1.01 * cfl_limit(g.du), bc), InputError);
  CHECK_THROWS_AS(initial_grid([](double) { return 1.2; }, 32, bc), InputError);
  DensityGrid out_of_range = g;
  out_of_range.values[3] = -0.5;
  CHECK_THROWS_AS(pde_step(out_of_range, cfl_limit(g.du), bc), NumericalInstability);
}

TEST_CASE("stationary profiles are discrete fixed points to O(du^2)") {
  for (const auto& bc : {BoundaryCondition::dirichlet(0.2, 0.8), BoundaryCondition::robin(1.0, 0.2, 0.8),
                         BoundaryCondition::robin(3.5, 0.7, 0.1), BoundaryCondition::neumann(0.2, 0.8)}) {
    CAPTURE(bc.describe());
    for (int J : {32, 64, 128, 256}) {
      const DensityGrid g = stationary_grid(bc, J);
      double worst = 0.0;
      for (double v : discrete_operator(g, bc)) worst = std::max(worst, std::abs(v));
      CHECK(worst <= 1.0 * g.du * g.du);
      // per-node change of one step is at most C du^2 dt
      const double dt = default_time_step(g.du, bc);
      CHECK(linf(pde_step(g, dt, bc), g) <= 1.0 * g.du * g.du * dt);
    }
  }
}

TEST_CASE("Robin flux consistency at stationarity") {
  const auto bc = BoundaryCondition::robin(2.0, 0.3, 0.6);
  for (int J : {64, 256}) {
    const Field f = solve([](double) { return 0.45; }, bc, 3.0, J);
    const auto& r = f.samples.back().values;
    const double du = f.du;
    // Second-order one-sided derivative of rho^2 at u = 0.
    const double d0 = (-3 * r[0] * r[0] + 4 * r[1] * r[1] - r[2] * r[2]) / (2 * du);
    CHECK(std::abs(d0 - bc.kappa * (r[0] - bc.alpha)) <= du * du);
  }
}

TEST_CASE("Neumann scheme conserves mass") {
  const auto bc = BoundaryCondition::neumann();
  DensityGrid g = initial_grid([](double u) { return 0.1 + 0.8 * std::exp(-200 * (u - 0.4) * (u - 0.4)); }, 200, bc);
  const double m0 = g.mass();
  const double dt = default_time_step(g.du, bc);
  for (int k = 0; k < 2000; ++k) {
    const double before = g.mass();
    g = pde_step(g, dt, bc);
    REQUIRE(std::abs(g.mass() - before) <= 1e-12);
  }
  CHECK(std::abs(g.mass() - m0) <= 1e-10);
}

TEST_CASE("Dirichlet with g equal to both reservoirs stays constant") {
  const auto bc = BoundaryCondition::dirichlet(0.3, 0.3);
  const Field f = solve([](double) { return 0.3; }, bc, 0.5, 64, {0.0, 0.25, 0.5});
  for (const auto& s : f.samples)
    for (double v : s.values) CHECK(v == doctest::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("solve lands exactly on the sample times") {
  const auto bc = BoundaryCondition::robin(1.0, 0.2, 0.8);
  const Field f = solve([](double) { return 0.5; }, bc, 0.3, 32, {0.0, 0.1, 0.2, 0.3});
  CHECK(f.times() == std::vector<double>{0.0, 0.1, 0.2, 0.3});
  CHECK(uniform_times(1.0, 4) == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK_THROWS_AS(solve([](double) { return 0.5; }, bc, 0.3, 32, {0.0, 0.5}), InputError);
}

TEST_CASE("stationary initial data stays within twice the truncation error") {
  const auto bc = BoundaryCondition::dirichlet(0.2, 0.8);
  const int J = 128;
  const Field f = solve([&](double u) { return stationary_profile(bc, u); }, bc, 1.0, J, uniform_times(1.0, 10));
  const DensityGrid exact = stationary_grid(bc, J);
  double trunc = 0.0;
  for (double v : discrete_operator(exact, bc)) trunc = std::max(trunc, std::abs(v));
  for (const auto& s : f.samples) CHECK(linf(s, exact) <= 2.0 * std::max(trunc, 1e-15) * 1.0 + 1e-15);
}

TEST_CASE("self-convergence, Dirichlet g = 0.5") {
  const auto bc = BoundaryCondition::dirichlet(0.2, 0.8);
  const auto g = [](double) { return 0.5; };
  const Field f256 = solve(g, bc, 2.0, 256);
  const Field f512 = solve(g, bc, 2.0, 512);
  CHECK(restricted_distance(f256.samples.back(), f512.samples.back()) <= 1e-3);
}

TEST_CASE("self-convergence order for smooth data") {
  const auto bc = BoundaryCondition::dirichlet(0.2, 0.8);
  const auto g = [](double u) { return 0.2 + 0.6 * u + 0.3 * std::sin(M_PI * u); };
  const Field f1 = solve(g, bc, 0.05, 64);
  const Field f2 = solve(g, bc, 0.05, 128);
  const Field f3 = solve(g, bc, 0.05, 256);
  const double e1 = restricted_distance(f1.samples.back(), f2.samples.back());
  const double e2 = restricted_distance(f2.samples.back(), f3.samples.back());
  CHECK(std::log2(e1 / e2) >= 1.9);
}

TEST_CASE("maximum principle and Lipschitz dependence on data") {
  const auto bc = BoundaryCondition::robin(1.0, 0.1, 0.9);
  const auto g = [](double u) { return u < 0.5 ? 0.05 : 0.95; };
  const Field f = solve(g, bc, 0.2, 128, uniform_times(0.2, 4));
  for (const auto& s : f.samples)
    for (double v : s.values) {
      CHECK(v >= 0.05 - 1e-12);
      CHECK(v <= 0.95 + 1e-12);
    }
  double prev = 1.0;
  for (double delta : {0.1, 0.01, 0.001}) {
    const Field p = solve([&](double u) { return g(u) + delta * std::sin(M_PI * u) * (u < 0.5 ? 1 : -1); },
                          bc, 0.2, 128);
    double l1 = 0.0;
    const auto& a = f.samples.back().values;
    const auto& b = p.samples.back().values;
    for (std::size_t i = 0; i < a.size(); ++i) l1 += std::abs(a[i] - b[i]) * f.du;
    CHECK(l1 <= delta);
    CHECK(l1 < prev);
    prev = l1;
  }
}

TEST_CASE("weak-form residual examples") {
  const auto bc = BoundaryCondition::dirichlet(0.4, 0.4);
  const auto g = [](double) { return 0.4; };
  // Every term cancels except the trapezoid error of the integral of G'' against
  // the constant rho^2, t rho^2 du^2 |G'''(1) - G'''(0)| / 12 to leading order.
  double prev = 1.0;
  for (int J : {8, 16, 32}) {
    const Field f = solve(g, bc, 0.5, J, uniform_times(0.5, 5));
    const double r = std::abs(weak_form_residual(f, g, sine_test(), 0.5));
    const double bound = 0.5 * 0.16 * f.du * f.du * 2.0 * std::pow(M_PI, 3) / 12.0;
    CHECK(r <= 1.01 * bound);
    CHECK(r < prev);
    prev = r;
  }
  const Field f = solve(g, bc, 0.5, 16, uniform_times(0.5, 5));
  CHECK(weak_form_residual(f, g, sine_test(), 0.0) == 0.0);

  TestFunction free = sine_test();
  free.value = [](double, double u) { return 1.0 + u; };
  free.vanishes_at_boundary = false;
  CHECK_THROWS_AS(weak_form_residual(f, g, free, 0.5), InputError);
  CHECK_THROWS_AS(weak_form_residual(f, g, sine_test(), 0.25), InputError);
}

TEST_CASE("weak-form residual shrinks under refinement") {
  const auto bc = BoundaryCondition::dirichlet(0.2, 0.8);
  const auto g = [](double) { return 0.5; };
  double prev = 1e9;
  for (int J : {32, 64, 128}) {
    const Field f = solve(g, bc, 0.5, J, uniform_times(0.5, 2 * J));
    const double r = std::abs(weak_form_residual(f, g, sine_test(), 0.5));
    CHECK(r < prev);
    prev = r;
  }
}
