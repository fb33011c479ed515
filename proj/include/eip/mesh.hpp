#ifndef EIP_MESH_HPP
#define EIP_MESH_HPP

#include <vector>

#include "eip/field.hpp"
#include "eip/motion.hpp"

namespace eip {

// Interface-fitted moving space-time mesh: a uniform time partition and, per
// level, spatial nodes transported from the initial grid by Phi. The initial
// grid is the union of uniform partitions of [0, gamma0] and [gamma0, 1], so
// the interface is a mesh node at every time.
//
// Trial space: continuous piecewise-linear in time (nodal at levels) tensor
// piecewise-linear in space on the moving nodes. Test space: piecewise-constant
// in time per slab tensor piecewise-linear in space (y1), plus the nodal basis
// at t = 0 for the initial block (y2).
class SpaceTimeMesh {
public:
  SpaceTimeMesh(int n_x, int n_t, MotionMap motion, SpaceKind space = SpaceKind::Dirichlet);

  int n_cells() const { return m_n_x; }
  int n_slabs() const { return m_n_t; }
  int n_nodes() const { return m_n_x + 1; }
  double time(int level) const { return m_horizon * level / m_n_t; }
  double slab_dt() const { return m_horizon / m_n_t; }
  double horizon() const { return m_horizon; }

  double node0(int i) const { return m_nodes0[i]; }
  double node(int i, double t) const { return m_motion.forward_map(m_nodes0[i], t); }
  double node_velocity(int i, double t) const {
    return m_motion.velocity(node(i, t), t);
  }
  double level_node(int level, int i) const { return m_levels[level][i]; }
  int interface_index() const { return m_igamma; }

  SpaceKind space() const { return m_space; }
  int n_dof() const { return m_n_dof; } // spatial dofs per level
  // -1 when the node is constrained (Dirichlet endpoints)
  int dof_of_node(int node) const;
  int node_of_dof(int dof) const;

  int trial_dim() const { return (m_n_t + 1) * m_n_dof; }
  int y1_dim() const { return m_n_t * m_n_dof; }
  int y2_dim() const { return m_n_dof; }
  int test_dim() const { return y1_dim() + y2_dim(); }

  const MotionMap& motion() const { return m_motion; }

private:
  int m_n_x, m_n_t;
  MotionMap m_motion;
  SpaceKind m_space;
  double m_horizon;
  std::vector<double> m_nodes0;
  std::vector<std::vector<double>> m_levels;
  int m_igamma = 0;
  int m_n_dof = 0;
};

// Convenience builder; gamma0 must match the motion's interface seed.
SpaceTimeMesh build_mesh(int n_x, int n_t, const MotionMap& motion, double gamma0,
                         SpaceKind space = SpaceKind::Dirichlet);

} // namespace eip

#endif
