#include "eip/coefficient.hpp"

#include <cmath>
#include <stdexcept>

#include "eip/errors.hpp"

namespace eip {

PiecewiseCoefficient::PiecewiseCoefficient(MotionMap motion, BranchFn lagrangian1,
                                           bool active1, BranchFn lagrangian2,
                                           bool active2, double alpha0)
    : m_motion(std::move(motion)), m_lag1(std::move(lagrangian1)),
      m_lag2(std::move(lagrangian2)), m_active1(active1), m_active2(active2),
      m_alpha0(alpha0) {
  if (!active1 && !active2)
    throw ValidationError("coefficient: at least one branch must be active");
  if (!(alpha0 > 0.0)) throw ValidationError("coefficient: alpha0 must be positive");
}

PiecewiseCoefficient::PiecewiseCoefficient()
    : PiecewiseCoefficient(MotionMap{}, constant_branch(1.0), true, constant_branch(1.0),
                           true, 1.0) {}

PiecewiseCoefficient::PiecewiseCoefficient(const PiecewiseCoefficient& other)
    : m_motion(other.m_motion), m_lag1(other.m_lag1), m_lag2(other.m_lag2),
      m_active1(other.m_active1), m_active2(other.m_active2), m_alpha0(other.m_alpha0) {
  std::lock_guard<std::mutex> lock(other.m_const_mutex);
  m_cached = other.m_cached;
}

PiecewiseCoefficient& PiecewiseCoefficient::operator=(const PiecewiseCoefficient& other) {
  if (this == &other) return *this;
  m_motion = other.m_motion;
  m_lag1 = other.m_lag1;
  m_lag2 = other.m_lag2;
  m_active1 = other.m_active1;
  m_active2 = other.m_active2;
  m_alpha0 = other.m_alpha0;
  std::scoped_lock lock(m_const_mutex, other.m_const_mutex);
  m_cached = other.m_cached;
  return *this;
}

PiecewiseCoefficient PiecewiseCoefficient::constants(MotionMap motion, double a1, double a2) {
  const bool act1 = a1 != 0.0, act2 = a2 != 0.0;
  const double lo = std::fmin(act1 ? a1 : 1e300, act2 ? a2 : 1e300);
  return PiecewiseCoefficient(std::move(motion), constant_branch(a1), act1,
                              constant_branch(a2), act2, lo);
}

BranchEval PiecewiseCoefficient::eval_lagrangian(double x, double t, int side) const {
  if (!active(side)) return {0.0, 0.0, 0.0, side};
  const BranchFn& A = (side == 1) ? m_lag1 : m_lag2;
  const double x0 = m_motion.inverse_map(x, t);
  const double J = m_motion.dx_forward(x0, t);
  const double Ax = A.dx(x0, t);
  BranchEval out;
  out.side = side;
  out.value = A.value(x0, t);
  out.dx_value = Ax / J;
  out.dt_value = A.dt(x0, t) - Ax * m_motion.velocity(x, t) / J;
  return out;
}

BranchEval PiecewiseCoefficient::evaluate_branch(double x, double t) const {
  const double g = m_motion.interface_position(t);
  if (std::abs(x - g) <= 1e-14)
    throw std::domain_error("interface-trace: alpha is multivalued on Gamma(t)");
  return eval_lagrangian(x, t, x < g ? 1 : 2);
}

bool PiecewiseCoefficient::support_contains(double x, double t) const {
  const double g = m_motion.interface_position(t);
  if (std::abs(x - g) <= 1e-14)
    throw std::domain_error("interface-trace: alpha is multivalued on Gamma(t)");
  return active(x < g ? 1 : 2);
}

double PiecewiseCoefficient::value(double x, double t, int side) const {
  return eval_lagrangian(x, t, side).value;
}
double PiecewiseCoefficient::dt(double x, double t, int side) const {
  return eval_lagrangian(x, t, side).dt_value;
}
double PiecewiseCoefficient::dx(double x, double t, int side) const {
  return eval_lagrangian(x, t, side).dx_value;
}

GlobalConstants PiecewiseCoefficient::global_constants(const MotionMap& motion) const {
  const int n = 200;
  const double T = m_motion.horizon();
  double ca = 0.0, cv = 0.0;
  for (int it = 0; it < n; ++it) {
    const double t = T * it / (n - 1.0);
    const double g = m_motion.interface_position(t);
    for (int ix = 0; ix < n; ++ix) {
      // one Lagrangian grid per branch so each sample stays on its closure
      const double x0l = m_gamma0_sample(ix, n, true);
      const double x0r = m_gamma0_sample(ix, n, false);
      for (const auto& [x0, side] : {std::pair{x0l, 1}, std::pair{x0r, 2}}) {
        if (!active(side)) continue;
        const double x = m_motion.forward_map(x0, t);
        // keep strictly off the interface trace
        const double xs = (side == 1) ? std::fmin(x, g - 1e-13) : std::fmax(x, g + 1e-13);
        const BranchEval e = eval_lagrangian(std::fmin(1.0, std::fmax(0.0, xs)), t, side);
        ca = std::fmax(ca, std::fmax(std::abs(e.value),
                                     std::fmax(std::abs(e.dt_value), std::abs(e.dx_value))));
        if (e.value < m_alpha0 - 1e-9)
          throw ValidationError("coefficient: active branch drops below alpha0");
      }
      const double x = ix / (n - 1.0);
      cv = std::fmax(cv, std::fmax(std::abs(motion.velocity(x, t)),
                                   std::fmax(std::abs(motion.velocity_dx(x, t)),
                                             std::abs(motion.velocity_dt(x, t)))));
    }
  }
  return GlobalConstants{1.01 * ca, 1.01 * cv, m_alpha0};
}

const GlobalConstants& PiecewiseCoefficient::cached_constants() const {
  std::lock_guard<std::mutex> lock(m_const_mutex);
  if (!m_cached) m_cached = global_constants(m_motion);
  return *m_cached;
}

double PiecewiseCoefficient::m_gamma0_sample(int i, int n, bool left) const {
  const double g0 = m_motion.gamma0();
  const double u = i / (n - 1.0);
  return left ? g0 * u : g0 + (1.0 - g0) * u;
}

} // namespace eip
