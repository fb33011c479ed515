#ifndef EIP_SOLVER_HPP
#define EIP_SOLVER_HPP

#include <memory>
#include <vector>

#include "eip/assembly.hpp"
#include "eip/mesh.hpp"

namespace eip {

struct Scenario; // scenario.hpp

// Trial-space coefficient field with per-slab evaluation. Nodal values at the
// mesh levels reproduce the stored coefficients exactly.
class SolutionField {
public:
  SolutionField(SpaceTimeMesh mesh, Eigen::VectorXd coeffs);

  double value(double x, double t) const;
  double dx_value(double x, double t) const;
  double dt_value(double x, double t) const; // Eulerian frame
  double coeff(int level, int dof) const;
  double nodal(int level, int node) const; // 0 on constrained nodes
  const Eigen::VectorXd& coeffs() const { return m_u; }
  const SpaceTimeMesh& mesh() const { return m_mesh; }

  // View as a branch-smooth field (sides agree; u_h is continuous).
  TimeDependentField as_field() const;

private:
  int locate_slab(double t) const;

  SpaceTimeMesh m_mesh;
  Eigen::VectorXd m_u;
};

// Sparse direct solve with one step of iterative refinement; relative residual
// must reach 1e-10.
SolutionField solve(const DiscreteSystem& sys, const SpaceTimeMesh& mesh);

// Smallest generalized singular value of B against (MX, MY): sqrt of the least
// eigenvalue of the pencil (B' MY^-1 B, MX). Dense up to `dense_cap` trial
// dofs, inverse iteration beyond (tol 1e-8, 500 iterations).
double discrete_inf_sup(const DiscreteSystem& sys, int dense_cap = 2000);

struct AprioriReport {
  double lhs;
  double rhs;
  bool satisfied;
};
AprioriReport apriori_check(const SolutionField& sol, const DiscreteSystem& sys,
                            double c_Bh);

struct ConvergenceRow {
  int n_x, n_t;
  double err_l2q;    // L2(Q)
  double err_l2jv;   // L2(J,V)
  double err_trace;  // max_t || sqrt(alpha) (u_h - u)(t) ||_{L2}
  double c_Bh;
  double apriori_lhs, apriori_rhs;
};
struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  double order_l2q = 0.0;
  double order_l2jv = 0.0;
};
ConvergenceTable convergence_study(const Scenario& scenario,
                                   const std::vector<std::pair<int, int>>& levels,
                                   bool with_stability = false);

struct ShiftReport {
  double max_pointwise_gap;
};
ShiftReport shift_equivalence(const Scenario& scenario, double lambda0);

struct StabilityRow {
  int n_x, n_t, trial_dim;
  double c_Bh;
  double apriori_lhs, apriori_rhs;
  bool satisfied;
};
struct StabilityReport {
  std::vector<StabilityRow> rows;
  double ratio = 0.0; // max/min c_Bh across levels
};
// Inf-sup and a priori study over the scenario's levels; parallel over levels
// when the scenario asks for jobs > 1, with deterministic row ordering.
StabilityReport stability_study(const Scenario& scenario,
                                const std::vector<std::pair<int, int>>& levels);

// Least-squares slope of log(err) against log(h); h halves between rows.
double fitted_order(const std::vector<double>& errors);

// Errors of a discrete solution against an exact field (quadrature per slab).
struct ErrorNorms {
  double l2q, l2jv, trace_alpha;
};
ErrorNorms solution_errors(const SolutionField& u_h, const TimeDependentField& exact,
                           const PiecewiseCoefficient& coeff, int quad_space = 6,
                           int quad_time = 4);

} // namespace eip

#endif
