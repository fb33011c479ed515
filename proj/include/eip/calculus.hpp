#ifndef EIP_CALCULUS_HPP
#define EIP_CALCULUS_HPP

#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "eip/coefficient.hpp"
#include "eip/field.hpp"
#include "eip/motion.hpp"

namespace eip {

// Quadrature and norm conventions shared by the function-space diagnostics.
struct NormContext {
  double h_ref = 1.0 / 512; // reference mesh size for discrete dual norms
  int quad_space = 6;
  int quad_time = 6;
  SpaceKind space = SpaceKind::Dirichlet;
  double p = 2.0;

  void validate() const;
  int ref_cells() const { return static_cast<int>(std::lround(1.0 / h_ref)); }
};

//------------------------------------------------------------------------------
// Discrete Riesz machinery on a uniform reference mesh: realizes the dual norm
// ||z||_{V',h}^2 = r' M_V^{-1} r with r the load vector against the P1 V-basis.
//------------------------------------------------------------------------------
class RieszSolver {
public:
  RieszSolver(int cells, SpaceKind space);

  int dim() const { return m_dim; }
  // r_i = int z(x, side(x)) phi_i dx, element integrals split at gamma.
  Eigen::VectorXd load(const std::function<double(double, int)>& z, double gamma,
                       int qorder) const;
  double dual_norm_sq(const Eigen::VectorXd& r) const;
  // || w ||_V^2 by quadrature on the reference mesh, split at gamma.
  double vnorm_sq(const std::function<double(double, int)>& w,
                  const std::function<double(double, int)>& dw, double gamma,
                  int qorder) const;

private:
  int m_cells;
  int m_dim;
  SpaceKind m_space;
  Eigen::SparseMatrix<double> m_gram;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> m_llt;
};

//------------------------------------------------------------------------------
// Mollification
//------------------------------------------------------------------------------

// Normalization constant c with int_R rho_1 = 1 (computed once, cached).
double mollifier_constant();
// rho_eps(tau) = c/eps * exp(tau^2/(tau^2 - eps^2)) on |tau| < eps, 0 elsewhere.
double mollifier_kernel(double eps, double tau);
// xi_eps(t) = eps (T - 2t)/T, keeps the convolution window inside [0, T].
double kernel_shift(double eps, double t, double T);
// u_eps(x,t) = int_0^T rho_eps(t + xi_eps(t) - s) u(x,s) ds.
double mollify(const TimeDependentField& u, double eps, double x, double t,
               const MotionMap& motion, int qorder = 8);

struct DensityRow {
  double eps;
  double error; // || u_eps - u ||_{L2(J,V)}
};
std::vector<DensityRow> density_study(const TimeDependentField& u,
                                      const std::vector<double>& eps_list,
                                      const MotionMap& motion, const NormContext& ctx);

//------------------------------------------------------------------------------
// Weighted weak time derivative pairings and the IBP identity
//------------------------------------------------------------------------------

// <(alpha dt u)(phi), w> = -int int (alpha u w phi' + u phi w dt(alpha)
//                                    + phi d/dx(alpha u w v)) dx dt
double weighted_pairing(const TimeDependentField& u, const TimeBump& phi,
                        const SpatialField& w, const PiecewiseCoefficient& coeff,
                        const MotionMap& motion, const NormContext& ctx);

// Material-derivative pairing:
// -int int (alpha u (w phi' + phi v w') + u phi w dt(alpha) + phi u w d/dx(alpha v)) dx dt
double material_pairing(const TimeDependentField& u, const TimeBump& phi,
                        const SpatialField& w, const PiecewiseCoefficient& coeff,
                        const MotionMap& motion, const NormContext& ctx);

// |LHS - RHS| of the integration-by-parts identity on [t1, t2], with
// alpha dt u taken as the pointwise product (smooth inputs).
double ibp_residual(const TimeDependentField& u, const TimeDependentField& z,
                    double t1, double t2, const PiecewiseCoefficient& coeff,
                    const MotionMap& motion, const NormContext& ctx);

//------------------------------------------------------------------------------
// Embedding
//------------------------------------------------------------------------------

struct EmbeddingConstants {
  double C_v;
  double C_alpha;
  double C_emb;
};

// C~_{emb,p} = sqrt((C_v + 1 + 1/T) C_alpha C_emb^2 T^{(p-2)/p} + 1)
double embedding_constant(double p, const EmbeddingConstants& c, double T);

struct EmbeddingReport {
  double max_trace_norm; // max_t || u(t) ||_{L2(Sigma(t))} over 200 samples
  double graph_norm;     // || u ||_{L2(J,V)} + || alpha dt u ||_{L2(J,V'),h}
  double ratio;
  double bound; // C~_{emb,2} / sqrt(alpha0)
};
EmbeddingReport embedding_ratio(const TimeDependentField& u,
                                const PiecewiseCoefficient& coeff,
                                const MotionMap& motion, const NormContext& ctx);

// || u ||_{L2(J,V)} of a field by space-time quadrature (interface-fitted).
double l2jv_norm(const TimeDependentField& u, const MotionMap& motion,
                 const NormContext& ctx);

} // namespace eip

#endif
