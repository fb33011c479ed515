#include "eip/motion.hpp"

#include <cmath>
#include <stdexcept>

#include "eip/errors.hpp"
#include "eip/quadrature.hpp"

namespace eip {

namespace {
constexpr double kDomainSlack = 1e-12;

// Phi for the separable flow with exponent factor K = exp(pi*G). Uses the
// reflection Phi(x, K) = 1 - Phi(1-x, 1/K) for x > 1/2 to stay well conditioned
// near the right endpoint.
double separable_phi(double x, double K) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  if (x > 0.5) return 1.0 - separable_phi(1.0 - x, 1.0 / K);
  return (2.0 / M_PI) * std::atan(std::tan(0.5 * M_PI * x) * K);
}

double separable_dphi(double x, double K) {
  if (x > 0.5) return separable_dphi(1.0 - x, 1.0 / K);
  const double c = std::cos(0.5 * M_PI * x);
  const double s = std::sin(0.5 * M_PI * x);
  return K / (c * c + K * K * s * s);
}
} // namespace

MotionMap MotionMap::identity(double gamma0, double horizon) {
  MotionMap m;
  m.m_family = MotionFamily::Identity;
  m.m_gamma0 = gamma0;
  m.m_horizon = horizon;
  if (!(gamma0 > 0.0 && gamma0 < 1.0)) throw std::invalid_argument("gamma0 outside (0,1)");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  return m;
}

MotionMap MotionMap::separable_flow(double amplitude, double frequency, double gamma0,
                                    double horizon) {
  MotionMap m = identity(gamma0, horizon);
  m.m_family = MotionFamily::SeparableFlow;
  m.m_amplitude = amplitude;
  m.m_frequency = frequency;
  return m;
}

MotionMap MotionMap::custom(Fn2 forward, Fn2 velocity, Fn2 velocity_dx, Fn2 velocity_dt,
                            double gamma0, double horizon) {
  MotionMap m = identity(gamma0, horizon);
  m.m_family = MotionFamily::Custom;
  m.m_forward = std::move(forward);
  m.m_velocity = std::move(velocity);
  m.m_velocity_dx = std::move(velocity_dx);
  m.m_velocity_dt = std::move(velocity_dt);
  return m;
}

void MotionMap::check_domain(double x, double t) const {
  if (x < -kDomainSlack || x > 1.0 + kDomainSlack)
    throw std::domain_error("motion: position outside [0,1]");
  if (t < -kDomainSlack || t > m_horizon + kDomainSlack)
    throw std::domain_error("motion: time outside [0,T]");
}

double MotionMap::forward_map(double x, double t) const {
  check_domain(x, t);
  x = std::fmin(1.0, std::fmax(0.0, x));
  switch (m_family) {
    case MotionFamily::Identity:
      return x;
    case MotionFamily::SeparableFlow: {
      const double G = m_amplitude * std::sin(m_frequency * t);
      return separable_phi(x, std::exp(M_PI * G));
    }
    case MotionFamily::Custom:
      return m_forward(x, t);
  }
  return x;
}

double MotionMap::inverse_map(double x, double t) const {
  check_domain(x, t);
  x = std::fmin(1.0, std::fmax(0.0, x));
  switch (m_family) {
    case MotionFamily::Identity:
      return x;
    case MotionFamily::SeparableFlow: {
      const double G = m_amplitude * std::sin(m_frequency * t);
      return separable_phi(x, std::exp(-M_PI * G));
    }
    case MotionFamily::Custom:
      return invert_increasing([&](double x0) { return m_forward(x0, t); }, x, 0.0, 1.0);
  }
  return x;
}

double MotionMap::velocity(double x, double t) const {
  check_domain(x, t);
  switch (m_family) {
    case MotionFamily::Identity:
      return 0.0;
    case MotionFamily::SeparableFlow:
      if (x <= 0.0 || x >= 1.0) return 0.0; // endpoints are fixed
      return m_amplitude * m_frequency * std::cos(m_frequency * t) * std::sin(M_PI * x);
    case MotionFamily::Custom:
      return m_velocity(x, t);
  }
  return 0.0;
}

double MotionMap::velocity_dx(double x, double t) const {
  check_domain(x, t);
  switch (m_family) {
    case MotionFamily::Identity:
      return 0.0;
    case MotionFamily::SeparableFlow:
      return m_amplitude * m_frequency * std::cos(m_frequency * t) * M_PI *
             std::cos(M_PI * x);
    case MotionFamily::Custom:
      return m_velocity_dx(x, t);
  }
  return 0.0;
}

double MotionMap::velocity_dt(double x, double t) const {
  check_domain(x, t);
  switch (m_family) {
    case MotionFamily::Identity:
      return 0.0;
    case MotionFamily::SeparableFlow:
      return -m_amplitude * m_frequency * m_frequency * std::sin(m_frequency * t) *
             std::sin(M_PI * x);
    case MotionFamily::Custom:
      return m_velocity_dt(x, t);
  }
  return 0.0;
}

double MotionMap::dx_forward(double x0, double t) const {
  check_domain(x0, t);
  switch (m_family) {
    case MotionFamily::Identity:
      return 1.0;
    case MotionFamily::SeparableFlow: {
      const double G = m_amplitude * std::sin(m_frequency * t);
      return separable_dphi(x0, std::exp(M_PI * G));
    }
    case MotionFamily::Custom: {
      // central difference; custom motions carry no closed-form Jacobian
      const double h = 1e-6;
      const double lo = std::fmax(0.0, x0 - h), hi = std::fmin(1.0, x0 + h);
      return (m_forward(hi, t) - m_forward(lo, t)) / (hi - lo);
    }
  }
  return 1.0;
}

double MotionMap::interface_position(double t) const {
  const double g = forward_map(m_gamma0, t);
  if (!(g > 0.0 && g < 1.0))
    throw NumericalError("interface_position left (0,1)");
  return g;
}

double MotionMap::reynolds_residual(const TimeDependentField& f, double t,
                                    double dt_step) const {
  if (!(dt_step > 0.0)) throw std::invalid_argument("reynolds_residual: step must be positive");
  if (t - dt_step < -kDomainSlack || t + dt_step > m_horizon + kDomainSlack)
    throw std::domain_error("reynolds_residual: step too large, t +/- dt leaves [0,T]");

  const int order = 12, panels = 16;
  auto total = [&](double s) {
    const double g = interface_position(s);
    return integrate_fitted([&](double x, int side) { return f.value(x, s, side); }, g,
                            order, panels);
  };
  const double lhs = (total(t + dt_step) - total(t - dt_step)) / (2.0 * dt_step);
  const double g = interface_position(t);
  const double rhs = integrate_fitted(
      [&](double x, int side) {
        const double v = velocity(x, t);
        const double vx = velocity_dx(x, t);
        return f.dt(x, t, side) + f.dx(x, t, side) * v + f.value(x, t, side) * vx;
      },
      g, order, panels);
  return std::abs(lhs - rhs);
}

double invert_increasing(const std::function<double(double)>& forward, double y,
                         double a, double b, double tol, int max_iter) {
  double fa = forward(a) - y, fb = forward(b) - y;
  if (fa > 0.0 || fb < 0.0) throw std::domain_error("invert_increasing: target outside range");
  double x = 0.5 * (a + b);
  for (int it = 0; it < max_iter; ++it) {
    const double fx = forward(x) - y;
    if (std::abs(fx) < tol) return x;
    if (fx > 0.0) b = x; else a = x;
    const double h = std::fmax(1e-9, 0.5 * (b - a));
    const double slope = (forward(std::fmin(x + h, b)) - forward(std::fmax(x - h, a))) /
                         (std::fmin(x + h, b) - std::fmax(x - h, a));
    double next = x - fx / slope;
    if (!(next > a && next < b)) next = 0.5 * (a + b); // bisection safeguard
    x = next;
    if (b - a < tol) return 0.5 * (a + b);
  }
  return x;
}

int side_of(const MotionMap& motion, double x, double t) {
  return x < motion.interface_position(t) ? 1 : 2;
}

} // namespace eip
