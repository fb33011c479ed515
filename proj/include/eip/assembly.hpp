#ifndef EIP_ASSEMBLY_HPP
#define EIP_ASSEMBLY_HPP

#include <iosfwd>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "eip/coefficient.hpp"
#include "eip/field.hpp"
#include "eip/mesh.hpp"
#include "eip/spatial_operator.hpp"

namespace eip {

struct AssemblyOptions {
  int quad_space = 4; // Gauss order per sub-element
  int quad_time = 3;  // Gauss order per slab
  int jobs = 1;       // slab-parallel assembly; bitwise identical to serial
};

// Assembled Petrov-Galerkin system for the space-time variational problem.
// Row layout: y1 rows slab-major (n * n_dof + j), then the initial block
// (Sigma0 mass rows; for degenerate alpha the remaining t=0 freedoms are closed
// by the elliptic equation on the inactive branch). Columns are trial dofs,
// level-major (m * n_dof + i).
struct DiscreteSystem {
  Eigen::SparseMatrix<double> B;
  Eigen::VectorXd f;
  Eigen::MatrixXd MX; // trial-space norm: ||u||^2_{L2(J,V)} + ||alpha dt u||^2_{L2(J,V'),h}
  Eigen::MatrixXd MY; // test-space norm: ||y1||^2_{L2(J,V)} + ||y2||^2_{L2(Sigma0)}
  bool has_norms = false;
  std::vector<bool> y2_elliptic; // per y2 dof: closed by the elliptic row
  double g1_dual_norm = 0.0;     // || g1 ||_{L2(J,V'),h} on this mesh
  double g2_norm = 0.0;          // || g2 ||_{L2(Sigma0)}
  int n_x = 0, n_t = 0, n_dof = 0;
  int trial_dim() const { return static_cast<int>(B.cols()); }
  int test_dim() const { return static_cast<int>(B.rows()); }
};

DiscreteSystem assemble_system(const SpaceTimeMesh& mesh, const PiecewiseCoefficient& coeff,
                               const SpatialOperator& op, const TimeDependentField& g1,
                               const SpatialField& g2, const AssemblyOptions& opt = {});

struct NormMatrices {
  Eigen::MatrixXd MX;
  Eigen::MatrixXd MY;
};
NormMatrices norm_matrices(const SpaceTimeMesh& mesh, const PiecewiseCoefficient& coeff,
                           const AssemblyOptions& opt = {});

// Attach MX/MY to the system (convenience for drivers).
void attach_norms(DiscreteSystem& sys, const SpaceTimeMesh& mesh,
                  const PiecewiseCoefficient& coeff, const AssemblyOptions& opt = {});

// Plain-text sparse triplet dump: header "# rows cols nnz", then "row col value".
void dump_triplets(const Eigen::SparseMatrix<double>& A, std::ostream& os);

} // namespace eip

#endif
