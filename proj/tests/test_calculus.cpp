#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "eip/calculus.hpp"
#include "eip/errors.hpp"
#include "eip/quadrature.hpp"

using namespace eip;

namespace {

MotionMap sep() { return MotionMap::separable_flow(0.1, 2.0 * M_PI, 0.5, 1.0); }

TimeDependentField sinpx_1pt() {
  BranchFn b;
  b.value = [](double x, double t) { return std::sin(M_PI * x) * (1.0 + t); };
  b.dt = [](double x, double) { return std::sin(M_PI * x); };
  b.dx = [](double x, double t) { return M_PI * std::cos(M_PI * x) * (1.0 + t); };
  return TimeDependentField(b);
}

TimeDependentField sinpx_sinpt() {
  BranchFn b;
  b.value = [](double x, double t) { return std::sin(M_PI * x) * std::sin(M_PI * t); };
  b.dt = [](double x, double t) { return M_PI * std::sin(M_PI * x) * std::cos(M_PI * t); };
  b.dx = [](double x, double t) { return M_PI * std::cos(M_PI * x) * std::sin(M_PI * t); };
  return TimeDependentField(b);
}

TimeDependentField kinked_field() {
  // sin(pi x) |t - 1/2|: W^{1,inf} kink at t = 1/2
  BranchFn b;
  b.value = [](double x, double t) { return std::sin(M_PI * x) * std::abs(t - 0.5); };
  b.dt = [](double x, double t) { return std::sin(M_PI * x) * (t < 0.5 ? -1.0 : 1.0); };
  b.dx = [](double x, double t) {
    return M_PI * std::cos(M_PI * x) * std::abs(t - 0.5);
  };
  return TimeDependentField(b, {0.5});
}

SpatialField poly_bubble() {
  return SpatialField{[](double x) { return x * (1.0 - x); },
                      [](double x) { return 1.0 - 2.0 * x; }};
}

// independent quadrature of  int int phi alpha dt(u) w dx dt, split at gamma(t)
double classical_pairing(const TimeDependentField& u, const TimeBump& phi,
                         const SpatialField& w, const PiecewiseCoefficient& coeff,
                         const MotionMap& motion) {
  const double lo = std::max(0.0, phi.support_lo);
  const double hi = std::min(motion.horizon(), phi.support_hi);
  return integrate(
      [&](double t) {
        const double g = motion.interface_position(t);
        return phi.value(t) * integrate_fitted(
                                  [&](double x, int side) {
                                    return coeff.value(x, t, side) * u.dt(x, t, side) *
                                           w.value(x);
                                  },
                                  g, 10, 24);
      },
      lo, hi, 10, 64);
}

} // namespace

TEST_CASE("mollifier kernel basics") {
  CHECK(mollifier_kernel(0.1, 0.1) == 0.0);
  CHECK(mollifier_kernel(0.1, -0.1) == 0.0);
  CHECK(mollifier_kernel(0.1, 0.11) == 0.0);
  CHECK(mollifier_kernel(0.1, 0.0999) > 0.0);
  for (double tau : {0.01, 0.03, 0.07})
    CHECK(mollifier_kernel(0.1, tau) == mollifier_kernel(0.1, -tau)); // even
  for (int i = 0; i <= 40; ++i)
    CHECK(mollifier_kernel(0.1, -0.12 + 0.24 * i / 40.0) >= 0.0);
  // frozen from an independent high-precision quadrature of 1/int exp(t^2/(t^2-1))
  CHECK(mollifier_constant() == doctest::Approx(0.82856883986910515).epsilon(1e-12));
  // normalization, checked by an in-test adaptive quadrature
  for (double eps : {0.1, 0.01}) {
    const double mass =
        adaptive_simpson([&](double t) { return mollifier_kernel(eps, t); }, -eps, eps, 1e-13);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("kernel shift endpoints") {
  CHECK(kernel_shift(0.05, 0.0, 1.0) == doctest::Approx(0.05));
  CHECK(kernel_shift(0.05, 0.5, 1.0) == doctest::Approx(0.0));
  CHECK(kernel_shift(0.05, 1.0, 1.0) == doctest::Approx(-0.05));
  CHECK(kernel_shift(0.2, 0.25, 2.0) == doctest::Approx(0.2 * 1.5 / 2.0));
}

TEST_CASE("mollify reproduces constants and linear fields") {
  const MotionMap m = MotionMap::identity(0.5, 1.0);
  CHECK(mollify(TimeDependentField(constant_branch(3.5)), 0.1, 0.4, 0.37, m) ==
        doctest::Approx(3.5).epsilon(1e-10));
  BranchFn lin;
  lin.value = [](double, double t) { return t; };
  lin.dt = [](double, double) { return 1.0; };
  lin.dx = [](double, double) { return 0.0; };
  // at t = T/2 the shift vanishes and the even kernel is exact on linears
  CHECK(mollify(TimeDependentField(lin), 0.05, 0.2, 0.5, m) ==
        doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("mollify matches the high-precision oracle") {
  const MotionMap m = MotionMap::identity(0.5, 1.0);
  BranchFn b;
  b.value = [](double, double t) { return std::sin(M_PI * t); };
  b.dt = [](double, double t) { return M_PI * std::cos(M_PI * t); };
  b.dx = [](double, double) { return 0.0; };
  // frozen oracle value of int rho_eps(0.32 - s) sin(pi s) ds
  CHECK(mollify(TimeDependentField(b), 0.05, 0.7, 0.3, m, 8) ==
        doctest::Approx(0.8426820726066883).epsilon(1e-9));
  CHECK_THROWS_AS(mollify(TimeDependentField(b), 0.3, 0.7, 0.3, m), std::invalid_argument);
}

TEST_CASE("density study: errors decrease, observed orders match the oracle") {
  NormContext ctx;
  ctx.h_ref = 1.0 / 64;
  ctx.quad_space = 4;
  ctx.quad_time = 4;
  const MotionMap m = MotionMap::identity(0.5, 1.0);
  const std::vector<double> eps = {0.1, 0.05, 0.025, 0.0125};

  // The shifted kernel evaluates u at t + xi_eps(t), so even smooth fields
  // converge at first order (the xi * dt(u) term); the kink does not degrade
  // that. Oracle-measured slopes: 0.97 (smooth), 1.00 (kinked).
  auto rows_smooth = density_study(sinpx_sinpt(), eps, m, ctx);
  std::vector<double> errs;
  for (const auto& r : rows_smooth) errs.push_back(r.error);
  for (std::size_t i = 0; i + 1 < errs.size(); ++i) CHECK(errs[i + 1] < errs[i]);
  const double slope_smooth =
      std::log2(errs.front() / errs.back()) / std::log2(8.0);
  CHECK(slope_smooth == doctest::Approx(0.97).epsilon(0.08));

  auto rows_kink = density_study(kinked_field(), eps, m, ctx);
  errs.clear();
  for (const auto& r : rows_kink) errs.push_back(r.error);
  for (std::size_t i = 0; i + 1 < errs.size(); ++i) CHECK(errs[i + 1] < errs[i]);
  const double slope_kink = std::log2(errs.front() / errs.back()) / std::log2(8.0);
  CHECK(slope_kink >= 0.95);
  CHECK(slope_kink <= 1.1);

  CHECK_THROWS_AS(density_study(sinpx_sinpt(), {0.1, 0.2}, m, ctx), ValidationError);
}

TEST_CASE("weighted pairing vanishes for static data") {
  const MotionMap m = MotionMap::identity(0.5, 1.0);
  auto coeff = PiecewiseCoefficient::constants(m, 1.0, 2.0);
  NormContext ctx;
  BranchFn u_static;
  u_static.value = [](double x, double) { return std::sin(M_PI * x); };
  u_static.dt = [](double, double) { return 0.0; };
  u_static.dx = [](double x, double) { return M_PI * std::cos(M_PI * x); };
  const double val = weighted_pairing(TimeDependentField(u_static), bump(0.5, 0.3),
                                      poly_bubble(), coeff, m, ctx);
  CHECK(std::abs(val) <= 1e-10);
}

TEST_CASE("weighted pairing rejects a bump violating the support condition") {
  const MotionMap m = MotionMap::identity(0.5, 1.0);
  auto coeff = PiecewiseCoefficient::constants(m, 1.0, 2.0);
  NormContext ctx;
  TimeBump bad;
  bad.value = [](double) { return 1.0; };
  bad.dt = [](double) { return 0.0; };
  CHECK_THROWS_AS(
      weighted_pairing(sinpx_1pt(), bad, poly_bubble(), coeff, m, ctx),
      std::domain_error);
}

TEST_CASE("weighted pairing agrees with the classical product for smooth fields") {
  const MotionMap m = sep();
  auto coeff = PiecewiseCoefficient::constants(m, 1.0, 2.0);
  NormContext ctx;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uc(0.3, 0.7), uw(0.12, 0.2), ua(-1.0, 1.0);
  for (const TimeDependentField& u : {sinpx_1pt(), sinpx_sinpt()}) {
    for (int rep = 0; rep < 6; ++rep) {
      const TimeBump phi = bump(uc(rng), uw(rng));
      const double a1 = ua(rng), a2 = ua(rng);
      SpatialField w{[=](double x) { return a1 * std::sin(M_PI * x) + a2 * x * (1 - x); },
                     [=](double x) {
                       return a1 * M_PI * std::cos(M_PI * x) + a2 * (1 - 2 * x);
                     }};
      const double lhs = weighted_pairing(u, phi, w, coeff, m, ctx);
      const double rhs = classical_pairing(u, phi, w, coeff, m);
      CHECK(std::abs(lhs - rhs) <= 1e-8);
    }
  }
}

TEST_CASE("prior-work equivalence for piecewise-constant alpha") {
  const MotionMap m = sep();
  auto coeff = PiecewiseCoefficient::constants(m, 1.0, 2.0);
  NormContext ctx;
  const TimeDependentField u = sinpx_1pt();
  const TimeBump phi = bump(0.5, 0.25);
  const SpatialField w = poly_bubble();

  auto alpha_inner = [&](double t) { // (alpha(t) u(t), w)
    const double g = m.interface_position(t);
    return integrate_fitted(
        [&](double x, int side) {
          return coeff.value(x, t, side) * u.value(x, t, side) * w.value(x);
        },
        g, 8, 24);
  };
  const double fd = 1e-5;
  const double oracle = integrate(
      [&](double t) {
        const double ddt = (alpha_inner(t + fd) - alpha_inner(t - fd)) / (2 * fd);
        const double g = m.interface_position(t);
        const double corr = integrate_fitted(
            [&](double x, int side) {
              const double v = m.velocity(x, t), vx = m.velocity_dx(x, t);
              const double div_uwv =
                  (u.dx(x, t, side) * w.value(x) + u.value(x, t, side) * w.dx(x)) * v +
                  u.value(x, t, side) * w.value(x) * vx;
              return coeff.value(x, t, side) * div_uwv;
            },
            g, 8, 24);
        return phi.value(t) * (ddt - corr);
      },
      0.22, 0.78, 8, 56); // phi supported in [0.25, 0.75]
  const double lhs = weighted_pairing(u, phi, w, coeff, m, ctx);
  CHECK(std::abs(lhs - oracle) <= 1e-6);
}

TEST_CASE("material pairing identities") {
  NormContext ctx;
  const MotionMap id = MotionMap::identity(0.5, 1.0);
  auto coeff_id = PiecewiseCoefficient::constants(id, 1.0, 2.0);
  const TimeBump phi = bump(0.5, 0.3);
  const SpatialField w = poly_bubble();

  // identity motion: v = 0 kills the extra terms
  const double a = weighted_pairing(sinpx_1pt(), phi, w, coeff_id, id, ctx);
  const double b = material_pairing(sinpx_1pt(), phi, w, coeff_id, id, ctx);
  CHECK(a == doctest::Approx(b).epsilon(1e-12));

  // moving case: material - weighted = int int phi alpha v dx(u) w
  const MotionMap m = sep();
  auto coeff = PiecewiseCoefficient::constants(m, 1.0, 2.0);
  const TimeDependentField u = sinpx_sinpt();
  const double wp = weighted_pairing(u, phi, w, coeff, m, ctx);
  const double mp = material_pairing(u, phi, w, coeff, m, ctx);
  const double extra = integrate(
      [&](double t) {
        const double g = m.interface_position(t);
        return phi.value(t) * integrate_fitted(
                                  [&](double x, int side) {
                                    return coeff.value(x, t, side) * m.velocity(x, t) *
                                           u.dx(x, t, side) * w.value(x);
                                  },
                                  g, 8, 24);
      },
      phi.support_lo, phi.support_hi, 8, 64);
  CHECK(mp - wp == doctest::Approx(extra).epsilon(1e-8));

  // u constant in x: the advective term vanishes
  BranchFn cx;
  cx.value = [](double, double t) { return 1.0 + 0.5 * t; };
  cx.dt = [](double, double) { return 0.5; };
  cx.dx = [](double, double) { return 0.0; };
  const double wp2 = weighted_pairing(TimeDependentField(cx), phi, w, coeff, m, ctx);
  const double mp2 = material_pairing(TimeDependentField(cx), phi, w, coeff, m, ctx);
  CHECK(std::abs(mp2 - wp2) <= 1e-10);
}

TEST_CASE("ibp residual vanishes for static data and identity motion") {
  const MotionMap id = MotionMap::identity(0.5, 1.0);
  auto coeff = PiecewiseCoefficient::constants(id, 1.0, 2.0);
  NormContext ctx;
  BranchFn u_static;
  u_static.value = [](double x, double) { return std::sin(M_PI * x); };
  u_static.dt = [](double, double) { return 0.0; };
  u_static.dx = [](double x, double) { return M_PI * std::cos(M_PI * x); };
  const TimeDependentField u(u_static);
  CHECK(ibp_residual(u, u, 0.0, 1.0, coeff, id, ctx) <= 1e-12);
}

TEST_CASE("ibp residual small for the jump case, symmetric, continuous in t2") {
  const MotionMap m = sep();
  auto coeff = PiecewiseCoefficient::constants(m, 1.0, 2.0);
  NormContext ctx;
  ctx.quad_space = 8;
  ctx.quad_time = 8;
  const TimeDependentField u = sinpx_1pt();
  const TimeDependentField z = sinpx_sinpt();
  CHECK(ibp_residual(u, u, 0.0, 1.0, coeff, m, ctx) <= 1e-8);
  CHECK(ibp_residual(u, z, 0.2, 0.7, coeff, m, ctx) <= 1e-8);
  CHECK(ibp_residual(u, z, 0.2, 0.7, coeff, m, ctx) ==
        ibp_residual(z, u, 0.2, 0.7, coeff, m, ctx)); // exact symmetry
  // t2 -> t1: residual shrinks continuously to zero (it can sit on the
  // quadrature floor for tiny intervals)
  double prev = 1e9;
  for (double d : {0.2, 0.02, 0.002}) {
    const double r = ibp_residual(u, z, 0.3, 0.3 + d, coeff, m, ctx);
    CHECK((r < prev || r <= 1e-12));
    prev = std::max(r, 1e-12);
  }
  CHECK(prev <= 1e-9);
  CHECK_THROWS_AS(ibp_residual(u, z, 0.5, 0.5, coeff, m, ctx), std::invalid_argument);
}

TEST_CASE("embedding constant formula") {
  CHECK(embedding_constant(2.0, {1.0, 2.0, 1.0}, 1.0) == std::sqrt(7.0)); // exact
  CHECK(embedding_constant(2.0, {0.0, 1.0, 1.0}, 1.0) ==
        doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
  // (C_v+1+1/T) C_alpha C_emb^2 T^{(p-2)/p} + 1 = 2.25*2*2 + 1 = 10 at p = 4, T = 4
  CHECK(embedding_constant(4.0, {1.0, 2.0, 1.0}, 4.0) ==
        doctest::Approx(std::sqrt(10.0)).epsilon(1e-15));
  CHECK_THROWS_AS(embedding_constant(1.5, {1.0, 1.0, 1.0}, 1.0), std::invalid_argument);
}

TEST_CASE("embedding ratio stays below the bound") {
  NormContext ctx;
  ctx.h_ref = 1.0 / 256;
  const MotionMap id = MotionMap::identity(0.5, 1.0);
  auto unit = PiecewiseCoefficient::constants(id, 1.0, 1.0);

  // u = 0: ratio reported as zero
  const EmbeddingReport zero = embedding_ratio(TimeDependentField(), unit, id, ctx);
  CHECK(zero.ratio == 0.0);
  CHECK(zero.bound > 0.0);

  // static sin(pi x): alpha dt u = 0, bound with C_v=0, C_alpha~1, T=1 is ~sqrt(3)
  BranchFn stat;
  stat.value = [](double x, double) { return std::sin(M_PI * x); };
  stat.dt = [](double, double) { return 0.0; };
  stat.dx = [](double x, double) { return M_PI * std::cos(M_PI * x); };
  const EmbeddingReport r1 = embedding_ratio(TimeDependentField(stat), unit, id, ctx);
  CHECK(r1.ratio > 0.0);
  CHECK(r1.ratio <= std::sqrt(3.0) * 1.01);
  CHECK(r1.ratio <= r1.bound);
  // trace norm of sin(pi x) is sqrt(1/2); graph norm is ||u||_{L2(J,V)}
  CHECK(r1.max_trace_norm == doctest::Approx(std::sqrt(0.5)).epsilon(1e-10));
  CHECK(r1.graph_norm == doctest::Approx(std::sqrt(0.5 + M_PI * M_PI / 2)).epsilon(1e-8));

  // jump coefficient, moving interface
  const MotionMap m = sep();
  auto coeff = PiecewiseCoefficient::constants(m, 1.0, 2.0);
  const EmbeddingReport r2 = embedding_ratio(sinpx_1pt(), coeff, m, ctx);
  CHECK(r2.ratio <= r2.bound);
  CHECK(r2.graph_norm > 0.0);
}

TEST_CASE("fitted segments split at the interface with the boundary tie-break") {
  using Segs = std::vector<std::pair<double, double>>;
  const Segs plain = fitted_segments(0.0, 1.0, 0.4);
  REQUIRE(plain.size() == 2);
  CHECK(plain[0].second == 0.4);
  CHECK(plain[1].first == 0.4);

  // outside (a, b): interval stays whole
  CHECK(fitted_segments(0.2, 0.4, 0.5).size() == 1);
  CHECK(fitted_segments(0.2, 0.4, 0.2).size() == 1);

  // collision with an endpoint within 1e-14 nudges 1e-12 toward the larger side
  const Segs nudged = fitted_segments(0.0, 1.0, 5e-15);
  REQUIRE(nudged.size() == 2);
  CHECK(nudged[0].second == doctest::Approx(5e-15 + 1e-12).epsilon(1e-3));
  const Segs nudged_hi = fitted_segments(0.0, 1.0, 1.0 - 5e-15);
  REQUIRE(nudged_hi.size() == 2);
  CHECK(nudged_hi[1].first < 1.0 - 5e-15);
}

TEST_CASE("context and argument validation") {
  const MotionMap id = MotionMap::identity(0.5, 1.0);
  auto coeff = PiecewiseCoefficient::constants(id, 1.0, 1.0);
  NormContext bad;
  bad.p = 1.5;
  CHECK_THROWS_AS(weighted_pairing(TimeDependentField(), bump(0.5, 0.2), zero_spatial(),
                                   coeff, id, bad),
                  ValidationError);
  bad = NormContext{};
  bad.quad_space = 1;
  CHECK_THROWS_AS(l2jv_norm(TimeDependentField(), id, bad), ValidationError);
  CHECK_THROWS_AS(mollifier_kernel(-0.1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(mollify(TimeDependentField(), -0.1, 0.5, 0.5, id),
                  std::invalid_argument);
}

TEST_CASE("riesz dual norm reproduces the closed form") {
  RieszSolver riesz(512, SpaceKind::Dirichlet);
  const Eigen::VectorXd r =
      riesz.load([](double x, int) { return std::sin(M_PI * x); }, -1.0, 6);
  // || sin(pi x) ||^2_{V'} = 0.5 / (1 + pi^2)
  CHECK(riesz.dual_norm_sq(r) == doctest::Approx(0.045999834175187616).epsilon(1e-4));
}
