#ifndef EIP_COEFFICIENT_HPP
#define EIP_COEFFICIENT_HPP

#include <mutex>
#include <optional>

#include "eip/field.hpp"
#include "eip/motion.hpp"

namespace eip {

struct BranchEval {
  double value;
  double dt_value;
  double dx_value;
  int side;
};

struct GlobalConstants {
  double C_alpha;
  double C_v;
  double alpha0;
};

// Two-branch coefficient alpha. Branches are supplied in Lagrangian form
// A_i(x0, t) and composed with the inverse motion, so each branch is C^1 on
// the closure of its moving subdomain by construction. alpha is undefined
// exactly on the interface.
class PiecewiseCoefficient {
public:
  PiecewiseCoefficient(); // alpha = 1 on both branches, identity motion
  PiecewiseCoefficient(MotionMap motion, BranchFn lagrangian1, bool active1,
                       BranchFn lagrangian2, bool active2, double alpha0);
  PiecewiseCoefficient(const PiecewiseCoefficient& other);
  PiecewiseCoefficient& operator=(const PiecewiseCoefficient& other);

  static PiecewiseCoefficient constants(MotionMap motion, double a1, double a2);

  BranchEval evaluate_branch(double x, double t) const;
  bool support_contains(double x, double t) const;
  GlobalConstants global_constants(const MotionMap& motion) const;
  const GlobalConstants& cached_constants() const; // memoized global_constants(own motion)

  // Fast paths used by quadrature loops where the side is already known.
  double value(double x, double t, int side) const;
  double dt(double x, double t, int side) const;
  double dx(double x, double t, int side) const;
  // all three at once (single inverse-map evaluation)
  BranchEval eval(double x, double t, int side) const { return eval_lagrangian(x, t, side); }

  bool active(int side) const { return side == 1 ? m_active1 : m_active2; }
  double alpha0() const { return m_alpha0; }
  const MotionMap& motion() const { return m_motion; }
  bool degenerate() const { return !(m_active1 && m_active2); }

private:
  BranchEval eval_lagrangian(double x, double t, int side) const;
  double m_gamma0_sample(int i, int n, bool left) const;

  MotionMap m_motion;
  BranchFn m_lag1, m_lag2;
  bool m_active1 = true, m_active2 = true;
  double m_alpha0 = 1.0;

  mutable std::mutex m_const_mutex;
  mutable std::optional<GlobalConstants> m_cached;
};

} // namespace eip

#endif
