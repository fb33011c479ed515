#include "eip/spatial_operator.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "eip/errors.hpp"
#include "eip/quadrature.hpp"

namespace eip {

namespace {
constexpr int kSpacePanels = 24;

Fn2 const_fn(double v) {
  return [v](double, double) { return v; };
}
} // namespace

double lambda1(double C_alpha, double C_emb, double C_v, double c_A, double alpha0) {
  if (!(C_alpha > 0.0) || !(C_emb > 0.0) || !(C_v >= 0.0) || !(c_A > 0.0) || !(alpha0 > 0.0))
    throw std::invalid_argument("lambda1: nonpositive input");
  const double s = C_alpha * C_emb * (C_v + 1.0);
  return s * s / (2.0 * c_A * alpha0);
}

std::pair<double, double> poincare_eigenvalue_bracket(int cells) {
  const double h = 1.0 / cells;
  const int n = cells - 1; // interior nodes
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd Ml = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    K(i, i) = 2.0 / h;
    M(i, i) = 4.0 * h / 6.0;
    Ml(i, i) = h;
    if (i + 1 < n) {
      K(i, i + 1) = K(i + 1, i) = -1.0 / h;
      M(i, i + 1) = M(i + 1, i) = h / 6.0;
    }
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> upper(K, M);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> lower(K, Ml);
  return {lower.eigenvalues()(0), upper.eigenvalues()(0)};
}

SpatialOperator::SpatialOperator()
    : SpatialOperator(const_fn(1.0), const_fn(1.0), const_fn(0.0), const_fn(0.0),
                      const_fn(0.0), const_fn(0.0), SpaceKind::Dirichlet) {}

SpatialOperator::SpatialOperator(Fn2 k1, Fn2 k2, Fn2 b1, Fn2 b2, Fn2 c1, Fn2 c2,
                                 SpaceKind space)
    : m_k1(std::move(k1)), m_k2(std::move(k2)), m_b1(std::move(b1)), m_b2(std::move(b2)),
      m_c1(std::move(c1)), m_c2(std::move(c2)), m_space(space) {}

SpatialOperator SpatialOperator::diffusion(double k1, double k2, SpaceKind space) {
  return SpatialOperator(const_fn(k1), const_fn(k2), const_fn(0.0), const_fn(0.0),
                         const_fn(0.0), const_fn(0.0), space);
}

double SpatialOperator::k(double x, double t, int side) const {
  return side == 1 ? m_k1(x, t) : m_k2(x, t);
}
double SpatialOperator::b(double x, double t, int side) const {
  return side == 1 ? m_b1(x, t) : m_b2(x, t);
}
double SpatialOperator::c(double x, double t, int side) const {
  return side == 1 ? m_c1(x, t) : m_c2(x, t);
}

double SpatialOperator::apply_form(double t, const SpatialField& w, const SpatialField& psi,
                                   const MotionMap& motion, const NormContext& ctx) const {
  if (m_space == SpaceKind::Dirichlet) {
    for (const SpatialField* f : {&w, &psi})
      if (std::abs(f->value(0.0)) > 1e-10 || std::abs(f->value(1.0)) > 1e-10)
        throw std::domain_error("apply_form: field violates Dirichlet boundary conditions");
  }
  const double g = motion.interface_position(t);
  return integrate_fitted(
      [&](double x, int side) {
        const double wx = w.dx(x), wv = w.value(x);
        const double px = psi.dx(x), pv = psi.value(x);
        return k(x, t, side) * wx * px + b(x, t, side) * wx * pv + c(x, t, side) * wv * pv;
      },
      g, ctx.quad_space, kSpacePanels);
}

double SpatialOperator::coercivity_margin(double t, const SpatialField& w,
                                          const PiecewiseCoefficient& coeff,
                                          const NormContext& ctx) const {
  bool nonzero = false;
  for (int i = 0; i <= 16; ++i)
    if (std::abs(w.value(i / 16.0)) > 1e-14) { nonzero = true; break; }
  if (!nonzero) throw std::invalid_argument("coercivity_margin: zero field");

  const double g = coeff.motion().interface_position(t);
  const double a_ww = apply_form(t, w, w, coeff.motion(), ctx);
  const double alpha_mass = integrate_fitted(
      [&](double x, int side) {
        const double wv = w.value(x);
        return coeff.value(x, t, side) * wv * wv;
      },
      g, ctx.quad_space, kSpacePanels);
  const double vnorm_sq = integrate_fitted(
      [&](double x, int) {
        const double wv = w.value(x), wx = w.dx(x);
        return wv * wv + wx * wx;
      },
      g, ctx.quad_space, kSpacePanels);

  const GlobalConstants gc = coeff.cached_constants();
  const OperatorConstants& oc = constants();
  const double l1 = lambda1(gc.C_alpha, 1.0, gc.C_v, oc.c_A, gc.alpha0);
  return a_ww + (oc.lambda0 - l1) * alpha_mass - oc.c_A * vnorm_sq;
}

SpatialOperator SpatialOperator::shifted(const PiecewiseCoefficient& coeff) const {
  const OperatorConstants& oc = constants();
  const double l0 = oc.lambda0;
  auto shift_reaction = [&](Fn2 base, int side) -> Fn2 {
    return [base, l0, coeff, side](double x, double t) {
      return base(x, t) + l0 * coeff.value(x, t, side);
    };
  };
  SpatialOperator out(m_k1, m_k2, m_b1, m_b2, shift_reaction(m_c1, 1),
                      shift_reaction(m_c2, 2), m_space);
  const GlobalConstants gc = coeff.cached_constants();
  out.m_horizon = coeff.motion().horizon();
  out.sample_coefficients();
  out.m_constants = OperatorConstants{oc.c_A, oc.C_A + std::abs(l0) * gc.C_alpha, 0.0};
  return out;
}

void SpatialOperator::sample_coefficients() {
  const int n = 200;
  m_k_min = 1e300;
  m_k_max = m_b_max = m_c_max = 0.0;
  m_c_min = 1e300;
  for (int it = 0; it < n; ++it) {
    const double t = m_horizon * it / (n - 1.0);
    for (int ix = 0; ix < n; ++ix) {
      const double x = ix / (n - 1.0);
      for (int side : {1, 2}) {
        const double kv = k(x, t, side);
        m_k_min = std::fmin(m_k_min, kv);
        m_k_max = std::fmax(m_k_max, kv);
        m_b_max = std::fmax(m_b_max, std::abs(b(x, t, side)));
        const double cv = c(x, t, side);
        m_c_min = std::fmin(m_c_min, cv);
        m_c_max = std::fmax(m_c_max, std::abs(cv));
      }
    }
  }
  if (!(m_k_min > 0.0)) throw ValidationError("operator: diffusion must stay positive");
}

void SpatialOperator::certify(const PiecewiseCoefficient& coeff,
                              std::optional<OperatorConstants> declared, unsigned seed) {
  m_horizon = coeff.motion().horizon();
  sample_coefficients();

  // constant diffusion is certified sharp; variable diffusion gets a 1% safety margin
  const bool k_const = (m_k_max - m_k_min) < 1e-12;
  const double k_lo = k_const ? m_k_min : 0.99 * m_k_min;

  const GlobalConstants gc = coeff.cached_constants();
  OperatorConstants oc;
  oc.C_A = 1.01 * (m_k_max + m_b_max + m_c_max);

  if (m_space == SpaceKind::Dirichlet) {
    // sharp Poincare constant, validated by the P1 eigenvalue bracket
    const auto [lo, hi] = poincare_eigenvalue_bracket(64);
    const double pi2 = M_PI * M_PI;
    if (!(lo <= pi2 && pi2 <= hi && hi - lo < 1e-1))
      throw NumericalError("operator: Poincare eigenvalue bracket failed");
    oc.c_A = k_lo * pi2 / (1.0 + pi2) + std::fmin(0.0, m_c_min);
    if (!(oc.c_A > 0.0)) throw ValidationError("operator: reaction too negative for coercivity");
    oc.lambda0 = lambda1(gc.C_alpha, 1.0, gc.C_v, oc.c_A, gc.alpha0);
  } else {
    if (m_b_max > 0.0)
      throw ValidationError("operator: advection requires Dirichlet boundary conditions");
    if (m_c_min > 0.0) {
      const bool c_const = (m_c_max - m_c_min) < 1e-12;
      oc.c_A = std::fmin(k_lo, c_const ? m_c_min : 0.99 * m_c_min);
      oc.lambda0 = lambda1(gc.C_alpha, 1.0, gc.C_v, oc.c_A, gc.alpha0);
    } else {
      // H1-semi-coercive: close the L2 part through the alpha-weighted shift
      if (coeff.degenerate())
        throw ValidationError("operator: Neumann with degenerate alpha is not coercive");
      oc.c_A = 0.5 * k_lo;
      oc.lambda0 = lambda1(gc.C_alpha, 1.0, gc.C_v, oc.c_A, gc.alpha0) + oc.c_A / gc.alpha0;
    }
  }

  if (declared) oc = *declared;
  m_constants = oc;

  // validate against random discrete fields at sampled times
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  NormContext ctx;
  for (int it = 0; it < 10; ++it) {
    const double t = m_horizon * it / 9.0;
    for (int rep = 0; rep < 10; ++rep) {
      double a1 = unif(rng), a2 = unif(rng), a3 = unif(rng);
      SpatialField w;
      if (m_space == SpaceKind::Dirichlet) {
        w.value = [=](double x) {
          return a1 * std::sin(M_PI * x) + a2 * std::sin(2 * M_PI * x) +
                 a3 * std::sin(3 * M_PI * x);
        };
        w.dx = [=](double x) {
          return M_PI * (a1 * std::cos(M_PI * x) + 2 * a2 * std::cos(2 * M_PI * x) +
                         3 * a3 * std::cos(3 * M_PI * x));
        };
      } else {
        w.value = [=](double x) {
          return a1 + a2 * std::cos(M_PI * x) + a3 * std::cos(2 * M_PI * x);
        };
        w.dx = [=](double x) {
          return -M_PI * (a2 * std::sin(M_PI * x) + 2 * a3 * std::sin(2 * M_PI * x));
        };
      }
      if (coercivity_margin(t, w, coeff, ctx) < -1e-10)
        throw ValidationError("operator: declared constants violate coercivity on samples");
    }
  }
}

const OperatorConstants& SpatialOperator::constants() const {
  if (!m_constants)
    throw ValidationError("operator: constants not certified; call certify() first");
  return *m_constants;
}

} // namespace eip
