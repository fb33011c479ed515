#ifndef EIP_FIELD_HPP
#define EIP_FIELD_HPP

#include <functional>
#include <string>
#include <vector>

namespace eip {

using Fn2 = std::function<double(double, double)>;

// Choice of V: H^1_0(0,1) (Dirichlet) or H^1(0,1) (Neumann). The V-norm is the
// full H^1 norm in both cases.
enum class SpaceKind { Dirichlet, Neumann };

// One smooth branch of a space-time scalar field: value and first partial
// derivatives, defined on the closure of its (moving) subdomain.
struct BranchFn {
  Fn2 value;
  Fn2 dt;
  Fn2 dx;
};

BranchFn zero_branch();
BranchFn constant_branch(double v);

// Scalar field on [0,1] x [0,T], smooth on each side of the interface.
// Side 1 is left of the interface, side 2 right of it.
class TimeDependentField {
public:
  TimeDependentField(); // zero field
  explicit TimeDependentField(BranchFn global, std::vector<double> time_kinks = {});
  TimeDependentField(BranchFn side1, BranchFn side2);

  bool globally_smooth() const { return m_globally_smooth; }
  const std::vector<double>& time_kinks() const { return m_time_kinks; }
  const BranchFn& branch(int side) const { return side == 1 ? m_side1 : m_side2; }

  double value(double x, double t, int side) const { return branch(side).value(x, t); }
  double dt(double x, double t, int side) const { return branch(side).dt(x, t); }
  double dx(double x, double t, int side) const { return branch(side).dx(x, t); }

private:
  BranchFn m_side1;
  BranchFn m_side2;
  bool m_globally_smooth = true;
  std::vector<double> m_time_kinks;
};

// Time-only bump, compactly supported in (0, T). The support bounds let
// quadrature concentrate its panels where the bump lives.
struct TimeBump {
  std::function<double(double)> value;
  std::function<double(double)> dt;
  double support_lo = 0.0;
  double support_hi = 1e300;
};

// Smooth bump supported on (center-width, center+width), C^inf, max value 1.
TimeBump bump(double center, double width);

// A spatial field in V (value and derivative).
struct SpatialField {
  std::function<double(double)> value;
  std::function<double(double)> dx;
};

SpatialField zero_spatial();
SpatialField sine_mode(int k, double amplitude); // amplitude*sin(k pi x)

// u(x,t) * exp(rate * t), with derivatives transformed accordingly.
TimeDependentField scale_by_exp(const TimeDependentField& u, double rate);

// Fill dt/dx by central differences of the value callable (data fields).
BranchFn with_fd_derivatives(Fn2 value, double h = 1e-6);

} // namespace eip

#endif
