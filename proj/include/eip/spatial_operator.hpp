#ifndef EIP_SPATIAL_OPERATOR_HPP
#define EIP_SPATIAL_OPERATOR_HPP

#include <optional>

#include "eip/calculus.hpp"
#include "eip/coefficient.hpp"
#include "eip/field.hpp"
#include "eip/motion.hpp"

namespace eip {

struct OperatorConstants {
  double c_A;
  double C_A;
  double lambda0;
};

// lambda_1 = C_alpha^2 C_emb^2 (C_v + 1)^2 / (2 c_A alpha0)
double lambda1(double C_alpha, double C_emb, double C_v, double c_A, double alpha0);

// Bracket of the first Dirichlet eigenvalue of -u'' on (0,1) from P1 elements:
// lumped mass gives a lower bound, consistent mass an upper bound.
std::pair<double, double> poincare_eigenvalue_bracket(int cells);

// Time-dependent bilinear form a(t; w, psi) = int k w' psi' + b w' psi + c w psi dx
// with per-branch smooth coefficients, interface-fitted.
class SpatialOperator {
public:
  SpatialOperator(Fn2 k1, Fn2 k2, Fn2 b1, Fn2 b2, Fn2 c1, Fn2 c2, SpaceKind space);
  SpatialOperator(); // k = 1, b = c = 0, Dirichlet

  static SpatialOperator diffusion(double k1, double k2, SpaceKind space);

  double k(double x, double t, int side) const;
  double b(double x, double t, int side) const;
  double c(double x, double t, int side) const;
  SpaceKind space() const { return m_space; }

  double apply_form(double t, const SpatialField& w, const SpatialField& psi,
                    const MotionMap& motion, const NormContext& ctx) const;

  // a(t;w,w) + (lambda0 - lambda1) ||sqrt(alpha(t)) w||^2 - c_A ||w||_V^2
  double coercivity_margin(double t, const SpatialField& w,
                           const PiecewiseCoefficient& coeff,
                           const NormContext& ctx) const;

  // A^ = A + lambda0 * alpha-mass, with constants (c_A, C_A + |l0| C_alpha C_emb^2, 0).
  SpatialOperator shifted(const PiecewiseCoefficient& coeff) const;

  // Certify (c_A, C_A) by coefficient sampling and default lambda0; declared
  // constants, when given, are validated against random discrete fields and
  // rejected on violation.
  void certify(const PiecewiseCoefficient& coeff,
               std::optional<OperatorConstants> declared = {}, unsigned seed = 0);

  const OperatorConstants& constants() const;
  void set_lambda0(double l0) { m_constants->lambda0 = l0; }
  double k_min() const { return m_k_min; }

private:
  void sample_coefficients();

  Fn2 m_k1, m_k2, m_b1, m_b2, m_c1, m_c2;
  SpaceKind m_space = SpaceKind::Dirichlet;
  double m_k_min = 0.0, m_k_max = 0.0, m_b_max = 0.0, m_c_min = 0.0, m_c_max = 0.0;
  double m_horizon = 1.0;
  std::optional<OperatorConstants> m_constants;
};

} // namespace eip

#endif
