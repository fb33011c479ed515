#include "eip/field.hpp"

#include <cmath>

namespace eip {

BranchFn zero_branch() {
  auto z = [](double, double) { return 0.0; };
  return BranchFn{z, z, z};
}

BranchFn constant_branch(double v) {
  auto z = [](double, double) { return 0.0; };
  return BranchFn{[v](double, double) { return v; }, z, z};
}

TimeDependentField::TimeDependentField() : TimeDependentField(zero_branch()) {}

TimeDependentField::TimeDependentField(BranchFn global, std::vector<double> time_kinks)
    : m_side1(global), m_side2(global), m_globally_smooth(true),
      m_time_kinks(std::move(time_kinks)) {}

TimeDependentField::TimeDependentField(BranchFn side1, BranchFn side2)
    : m_side1(std::move(side1)), m_side2(std::move(side2)), m_globally_smooth(false) {}

TimeBump bump(double center, double width) {
  auto val = [center, width](double t) {
    const double s = (t - center) / width;
    if (std::abs(s) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
  };
  auto der = [center, width](double t) {
    const double s = (t - center) / width;
    if (std::abs(s) >= 1.0) return 0.0;
    const double d = 1.0 - s * s;
    return std::exp(1.0 - 1.0 / d) * (-2.0 * s / (d * d)) / width;
  };
  return TimeBump{val, der, center - width, center + width};
}

SpatialField zero_spatial() {
  auto z = [](double) { return 0.0; };
  return SpatialField{z, z};
}

SpatialField sine_mode(int k, double amplitude) {
  const double w = k * M_PI;
  return SpatialField{[amplitude, w](double x) { return amplitude * std::sin(w * x); },
                      [amplitude, w](double x) { return amplitude * w * std::cos(w * x); }};
}

namespace {
BranchFn scale_branch_by_exp(const BranchFn& b, double rate) {
  BranchFn out;
  out.value = [b, rate](double x, double t) { return b.value(x, t) * std::exp(rate * t); };
  out.dt = [b, rate](double x, double t) {
    return (b.dt(x, t) + rate * b.value(x, t)) * std::exp(rate * t);
  };
  out.dx = [b, rate](double x, double t) { return b.dx(x, t) * std::exp(rate * t); };
  return out;
}
} // namespace

TimeDependentField scale_by_exp(const TimeDependentField& u, double rate) {
  if (u.globally_smooth())
    return TimeDependentField(scale_branch_by_exp(u.branch(1), rate), u.time_kinks());
  return TimeDependentField(scale_branch_by_exp(u.branch(1), rate),
                            scale_branch_by_exp(u.branch(2), rate));
}

BranchFn with_fd_derivatives(Fn2 value, double h) {
  BranchFn out;
  out.value = value;
  out.dt = [value, h](double x, double t) {
    return (value(x, t + h) - value(x, t - h)) / (2.0 * h);
  };
  out.dx = [value, h](double x, double t) {
    return (value(x + h, t) - value(x - h, t)) / (2.0 * h);
  };
  return out;
}

} // namespace eip
