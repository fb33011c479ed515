#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "eip/motion.hpp"

using namespace eip;

namespace {

MotionMap sep() { return MotionMap::separable_flow(0.1, 2.0 * M_PI, 0.5, 1.0); }

TimeDependentField const_field(double v) {
  return TimeDependentField(constant_branch(v));
}

TimeDependentField x_1pt_field() {
  BranchFn b;
  b.value = [](double x, double t) { return x * (1.0 + t); };
  b.dt = [](double x, double) { return x; };
  b.dx = [](double, double t) { return 1.0 + t; };
  return TimeDependentField(b);
}

TimeDependentField smooth_field() {
  // strong third time derivative, to expose the O(dt^2) term
  BranchFn b;
  b.value = [](double x, double t) { return std::sin(M_PI * x) * std::cos(2 * M_PI * t); };
  b.dt = [](double x, double t) {
    return -2 * M_PI * std::sin(M_PI * x) * std::sin(2 * M_PI * t);
  };
  b.dx = [](double x, double t) {
    return M_PI * std::cos(M_PI * x) * std::cos(2 * M_PI * t);
  };
  return TimeDependentField(b);
}

} // namespace

TEST_CASE("forward map is the identity at t = 0") {
  CHECK(MotionMap::identity(0.5, 1.0).forward_map(0.3, 0.0) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(sep().forward_map(0.3, 0.0) == doctest::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("endpoints stay fixed") {
  MotionMap m = sep();
  CHECK(m.forward_map(0.0, 0.7) == 0.0);
  CHECK(m.forward_map(1.0, 0.7) == 1.0);
  CHECK(m.velocity(1.0, 0.33) == 0.0);
  CHECK(m.velocity(0.0, 0.33) == 0.0);
}

TEST_CASE("closed-form flow value at G = 0.1") {
  // G(t) = 0.1 sin(2 pi t) = 0.1 at t = 1/4; frozen from an independent
  // high-precision evaluation of (2/pi) atan(tan(pi/4) exp(0.1 pi))
  MotionMap m = sep();
  CHECK(m.forward_map(0.5, 0.25) == doctest::Approx(0.598394524536568).epsilon(1e-12));
  CHECK(m.interface_position(0.25) == doctest::Approx(0.598394524536568).epsilon(1e-12));
  CHECK(m.inverse_map(0.598394524536568, 0.25) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("inverse identity") {
  MotionMap m = sep();
  CHECK(m.inverse_map(0.42, 0.3) != doctest::Approx(0.42).epsilon(1e-15)); // flow moves
  CHECK(MotionMap::identity(0.5, 1.0).inverse_map(0.42, 0.3) == doctest::Approx(0.42));
  for (int i = 1; i < 40; ++i)
    for (int j = 0; j <= 10; ++j) {
      const double x = i / 40.0, t = j / 10.0;
      CHECK(m.inverse_map(m.forward_map(x, t), t) == doctest::Approx(x).epsilon(1e-12));
    }
  CHECK(m.inverse_map(m.forward_map(0.37, 0.6), 0.6) == doctest::Approx(0.37).epsilon(1e-12));
}

TEST_CASE("velocity closed form and defining composition") {
  MotionMap m = sep();
  CHECK(MotionMap::identity(0.3, 2.0).velocity(0.77, 1.3) == 0.0);
  CHECK(m.velocity(0.5, 0.0) == doctest::Approx(0.1 * 2 * M_PI).epsilon(1e-12));

  // |v - FD of the flow| = O(h^2) on a grid
  for (double h : {1e-3, 1e-4}) {
    double worst = 0.0;
    for (int i = 1; i < 50; ++i)
      for (int j = 1; j < 50; ++j) {
        const double x = i / 50.0;
        const double t = 0.1 + 0.8 * j / 50.0;
        const double x0 = m.inverse_map(x, t);
        const double fd = (m.forward_map(x0, t + h) - m.forward_map(x0, t - h)) / (2 * h);
        worst = std::max(worst, std::abs(m.velocity(x, t) - fd));
      }
    CHECK(worst <= 30.0 * h * h);
  }
}

TEST_CASE("monotonicity and positive Jacobian") {
  MotionMap m = sep();
  for (double t : {0.0, 0.25, 0.6, 1.0}) {
    double prev = m.forward_map(0.0, t);
    for (int i = 1; i <= 1000; ++i) {
      const double cur = m.forward_map(i / 1000.0, t);
      CHECK(cur > prev);
      prev = cur;
    }
    for (int i = 0; i <= 20; ++i) CHECK(m.dx_forward(i / 20.0, t) > 0.0);
  }
}

TEST_CASE("domain violations") {
  MotionMap m = sep();
  CHECK_THROWS_AS(m.forward_map(-0.1, 0.5), std::domain_error);
  CHECK_THROWS_AS(m.forward_map(0.5, 1.5), std::domain_error);
  CHECK_THROWS_AS(m.velocity(1.2, 0.0), std::domain_error);
}

TEST_CASE("reynolds residual vanishes for constants") {
  CHECK(MotionMap::identity(0.5, 1.0).reynolds_residual(const_field(1.0), 0.5, 1e-3) <= 1e-12);
  CHECK(sep().reynolds_residual(const_field(1.0), 0.5, 1e-3) <= 1e-10);
}

TEST_CASE("reynolds residual for x(1+t)") {
  CHECK(sep().reynolds_residual(x_1pt_field(), 0.37, 1e-4) <= 1e-6);
}

TEST_CASE("reynolds residual converges at order two") {
  MotionMap m = sep();
  const TimeDependentField f = smooth_field();
  const double r1 = m.reynolds_residual(f, 0.4, 1e-2);
  const double r2 = m.reynolds_residual(f, 0.4, 1e-3);
  const double r3 = m.reynolds_residual(f, 0.4, 1e-4);
  const double slope12 = std::log10(r1 / r2);
  CHECK(slope12 >= 1.9);
  CHECK(slope12 <= 2.1);
  CHECK(r3 <= 1.1e-2 * r2); // still quadratic down to dt = 1e-4
}

TEST_CASE("reynolds residual with a branch-discontinuous field") {
  BranchFn left = constant_branch(1.0);
  left.value = [](double, double t) { return 1.0 + t; };
  left.dt = [](double, double) { return 1.0; };
  BranchFn right;
  right.value = [](double x, double t) { return (2.0 + t) * (1.0 + x); };
  right.dt = [](double x, double) { return 1.0 + x; };
  right.dx = [](double, double t) { return 2.0 + t; };
  const TimeDependentField f(left, right);
  CHECK(sep().reynolds_residual(f, 0.5, 1e-4) <= 1e-6);
}

TEST_CASE("reynolds residual rejects an oversized step") {
  CHECK_THROWS_AS(sep().reynolds_residual(const_field(1.0), 0.0, 1e-3), std::domain_error);
  CHECK_THROWS_AS(sep().reynolds_residual(const_field(1.0), 1.0, 1e-3), std::domain_error);
}

TEST_CASE("custom motion uses the Newton fallback inverse") {
  // flow with a non-closed-form inverse along a cubic-in-x profile
  auto fwd = [](double x, double t) { return x + 0.1 * t * x * (1.0 - x) * (1.0 + x); };
  MotionMap m = MotionMap::custom(
      fwd, [](double x, double t) { (void)t; return 0.1 * x * (1.0 - x) * (1.0 + x); },
      [](double x, double) { return 0.1 * (1.0 - 3.0 * x * x + 2.0 * 0.0); },
      [](double, double) { return 0.0; }, 0.5, 1.0);
  for (double x : {0.1, 0.37, 0.5, 0.9})
    for (double t : {0.2, 0.8})
      CHECK(m.inverse_map(m.forward_map(x, t), t) == doctest::Approx(x).epsilon(1e-12));
}

TEST_CASE("interface position stays inside the domain") {
  MotionMap m = sep();
  for (int j = 0; j <= 50; ++j) {
    const double g = m.interface_position(j / 50.0);
    CHECK(g > 0.0);
    CHECK(g < 1.0);
  }
  CHECK(m.interface_position(0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(MotionMap::identity(0.31, 1.0).interface_position(0.8) == doctest::Approx(0.31));
}
