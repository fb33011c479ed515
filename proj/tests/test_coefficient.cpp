#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "eip/coefficient.hpp"
#include "eip/errors.hpp"

using namespace eip;

namespace {
MotionMap sep() { return MotionMap::separable_flow(0.1, 2.0 * M_PI, 0.5, 1.0); }
} // namespace

TEST_CASE("constant branches evaluate with branch selection") {
  auto coeff = PiecewiseCoefficient::constants(MotionMap::identity(0.5, 1.0), 1.0, 2.0);
  const BranchEval l = coeff.evaluate_branch(0.2, 0.3);
  CHECK(l.side == 1);
  CHECK(l.value == doctest::Approx(1.0));
  CHECK(l.dt_value == doctest::Approx(0.0));
  CHECK(l.dx_value == doctest::Approx(0.0));
  const BranchEval r = coeff.evaluate_branch(0.8, 0.3);
  CHECK(r.side == 2);
  CHECK(r.value == doctest::Approx(2.0));
}

TEST_CASE("degenerate branch evaluates to zero") {
  auto coeff = PiecewiseCoefficient::constants(MotionMap::identity(0.5, 1.0), 1.0, 0.0);
  const BranchEval r = coeff.evaluate_branch(0.8, 0.1);
  CHECK(r.side == 2);
  CHECK(r.value == 0.0);
  CHECK(r.dt_value == 0.0);
  CHECK(r.dx_value == 0.0);
  CHECK(coeff.support_contains(0.8, 0.1) == false);
  CHECK(coeff.support_contains(0.2, 0.1) == true);
}

TEST_CASE("both branches active means support everywhere off the interface") {
  auto coeff = PiecewiseCoefficient::constants(sep(), 1.0, 2.0);
  for (double x : {0.05, 0.3, 0.7, 0.95})
    CHECK(coeff.support_contains(x, 0.4) == true);
}

TEST_CASE("lagrangian linear-in-time branch") {
  BranchFn lag;
  lag.value = [](double, double t) { return 1.0 + t; };
  lag.dt = [](double, double) { return 1.0; };
  lag.dx = [](double, double) { return 0.0; };
  PiecewiseCoefficient coeff(MotionMap::identity(0.5, 1.0), lag, true,
                             constant_branch(2.0), true, 1.0);
  const BranchEval e = coeff.evaluate_branch(0.2, 0.5);
  CHECK(e.value == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(e.dt_value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e.dx_value == doctest::Approx(0.0));
  CHECK(e.side == 1);
}

TEST_CASE("interface trace is rejected") {
  auto coeff = PiecewiseCoefficient::constants(sep(), 1.0, 2.0);
  const double g = sep().interface_position(0.3);
  CHECK_THROWS_AS(coeff.evaluate_branch(g, 0.3), std::domain_error);
  CHECK_THROWS_AS(coeff.support_contains(g + 5e-15, 0.3), std::domain_error);
  CHECK_NOTHROW(coeff.evaluate_branch(g + 1e-10, 0.3));
}

TEST_CASE("global constants for static constant branches") {
  const MotionMap id = MotionMap::identity(0.5, 1.0);
  auto coeff = PiecewiseCoefficient::constants(id, 1.0, 2.0);
  const GlobalConstants gc = coeff.global_constants(id);
  CHECK(gc.C_alpha >= 2.0);
  CHECK(gc.C_alpha <= 2.0 * 1.01 + 1e-12); // sampled max with the 1% inflation
  CHECK(gc.C_v == 0.0);
  CHECK(gc.alpha0 == doctest::Approx(1.0));

  auto degen = PiecewiseCoefficient::constants(id, 1.0, 0.0);
  const GlobalConstants gd = degen.global_constants(id);
  CHECK(gd.C_alpha >= 1.0);
  CHECK(gd.C_alpha <= 1.01 + 1e-12);
  CHECK(gd.C_v == 0.0);
  CHECK(gd.alpha0 == doctest::Approx(1.0));
}

TEST_CASE("global constants capture the velocity amplitude") {
  // independent dense-sampling oracle for max(|v|, |dt v|, |dx v|)
  const MotionMap m = sep();
  double oracle = 0.0;
  for (int i = 0; i <= 300; ++i)
    for (int j = 0; j <= 300; ++j) {
      const double x = i / 300.0, t = j / 300.0;
      oracle = std::max({oracle, std::abs(m.velocity(x, t)),
                         std::abs(m.velocity_dx(x, t)), std::abs(m.velocity_dt(x, t))});
    }
  CHECK(oracle == doctest::Approx(0.1 * 4 * M_PI * M_PI).epsilon(1e-3)); // a w^2

  auto coeff = PiecewiseCoefficient::constants(m, 1.0, 2.0);
  const GlobalConstants gc = coeff.global_constants(m);
  CHECK(gc.C_v >= oracle * 0.999);
  CHECK(gc.C_v <= oracle * 1.011);
}

TEST_CASE("branch selection is consistent with the motion") {
  const MotionMap m = sep();
  auto coeff = PiecewiseCoefficient::constants(m, 1.0, 2.0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(0.01, 0.99), ut(0.0, 1.0);
  for (int it = 0; it < 1000; ++it) {
    const double x0 = ux(rng), t = ut(rng);
    if (std::abs(x0 - 0.5) < 1e-6) continue;
    const double x = m.forward_map(x0, t);
    if (std::abs(x - m.interface_position(t)) < 1e-12) continue;
    const int expected = x0 < 0.5 ? 1 : 2;
    CHECK(coeff.evaluate_branch(x, t).side == expected);
  }
}

TEST_CASE("returned derivatives match finite differences") {
  const MotionMap m = sep();
  BranchFn lag;
  lag.value = [](double x0, double t) { return (1.0 + 0.5 * std::sin(M_PI * x0)) * (1.0 + 0.3 * t); };
  lag.dt = [](double x0, double) { return (1.0 + 0.5 * std::sin(M_PI * x0)) * 0.3; };
  lag.dx = [](double x0, double t) { return 0.5 * M_PI * std::cos(M_PI * x0) * (1.0 + 0.3 * t); };
  PiecewiseCoefficient coeff(m, lag, true, constant_branch(2.0), true, 0.9);
  const double h = 1e-5;
  for (double x : {0.1, 0.25, 0.35})
    for (double t : {0.2, 0.5, 0.8}) {
      const BranchEval e = coeff.evaluate_branch(x, t);
      REQUIRE(e.side == 1);
      const double fd_t =
          (coeff.value(x, t + h, 1) - coeff.value(x, t - h, 1)) / (2 * h);
      const double fd_x =
          (coeff.value(x + h, t, 1) - coeff.value(x - h, t, 1)) / (2 * h);
      CHECK(e.dt_value == doctest::Approx(fd_t).epsilon(1e-6));
      CHECK(e.dx_value == doctest::Approx(fd_x).epsilon(1e-6));
    }
}

TEST_CASE("configuration errors") {
  const MotionMap id = MotionMap::identity(0.5, 1.0);
  CHECK_THROWS_AS(
      PiecewiseCoefficient(id, zero_branch(), false, zero_branch(), false, 1.0),
      ValidationError);
  // active branch below alpha0 is rejected when constants are certified
  PiecewiseCoefficient low(id, constant_branch(0.5), true, constant_branch(2.0), true, 1.0);
  CHECK_THROWS_AS(low.global_constants(id), ValidationError);
}
