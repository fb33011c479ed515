#ifndef EIP_MOTION_HPP
#define EIP_MOTION_HPP

#include <functional>
#include <string>

#include "eip/field.hpp"

namespace eip {

enum class MotionFamily { Identity, SeparableFlow, Custom };

// Interface kinematics on the fixed domain (0,1): the diffeomorphism family
// Phi(.,t), its inverse, the velocity field and the transported interface.
// SeparableFlow is the exact flow of v(x,t) = a*w*cos(w*t)*sin(pi*x):
//   Phi(x0,t) = (2/pi) * atan( tan(pi*x0/2) * exp(pi*G(t)) ),  G(t) = a*sin(w*t).
class MotionMap {
public:
  MotionMap() = default; // identity, gamma0 = 0.5, horizon = 1

  static MotionMap identity(double gamma0, double horizon);
  static MotionMap separable_flow(double amplitude, double frequency, double gamma0,
                                  double horizon);
  // User-supplied motion; the inverse runs a safeguarded Newton iteration
  // (tol 1e-13, max 50 iterations).
  static MotionMap custom(Fn2 forward, Fn2 velocity, Fn2 velocity_dx, Fn2 velocity_dt,
                          double gamma0, double horizon);

  MotionFamily family() const { return m_family; }
  double gamma0() const { return m_gamma0; }
  double horizon() const { return m_horizon; }
  double amplitude() const { return m_amplitude; }
  double frequency() const { return m_frequency; }

  double forward_map(double x, double t) const;
  double inverse_map(double x, double t) const;
  double velocity(double x, double t) const;
  double velocity_dx(double x, double t) const;
  double velocity_dt(double x, double t) const;
  // d Phi / d x0 > 0
  double dx_forward(double x0, double t) const;
  double interface_position(double t) const;

  // |d/dt int_{Omega~(t)} f dx  -  int_{Omega~(t)} (dt f + d/dx (f v)) dx|
  // with the time derivative by central differences of step `dt_step` and the
  // spatial integrals split at the interface.
  double reynolds_residual(const TimeDependentField& f, double t, double dt_step) const;

private:
  void check_domain(double x, double t) const;

  MotionFamily m_family = MotionFamily::Identity;
  double m_amplitude = 0.0;
  double m_frequency = 0.0;
  double m_gamma0 = 0.5;
  double m_horizon = 1.0;
  Fn2 m_forward, m_velocity, m_velocity_dx, m_velocity_dt;
};

// Solve forward(x0) = y for x0 in [a,b], forward strictly increasing.
// Newton with bisection safeguard; tol on the residual and the bracket.
double invert_increasing(const std::function<double(double)>& forward, double y,
                         double a, double b, double tol = 1e-13, int max_iter = 50);

int side_of(const MotionMap& motion, double x, double t);

} // namespace eip

#endif
