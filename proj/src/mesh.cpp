#include "eip/mesh.hpp"

#include <cmath>
#include <stdexcept>

#include "eip/errors.hpp"

namespace eip {

SpaceTimeMesh::SpaceTimeMesh(int n_x, int n_t, MotionMap motion, SpaceKind space)
    : m_n_x(n_x), m_n_t(n_t), m_motion(std::move(motion)), m_space(space) {
  if (n_x < 2) throw ValidationError("mesh: need at least 2 cells");
  if (n_t < 1) throw ValidationError("mesh: need at least 1 slab");
  m_horizon = m_motion.horizon();

  const double g0 = m_motion.gamma0();
  int n_left = static_cast<int>(std::lround(n_x * g0));
  n_left = std::max(1, std::min(n_x - 1, n_left));
  const int n_right = n_x - n_left;
  m_igamma = n_left;
  m_nodes0.resize(n_x + 1);
  for (int i = 0; i <= n_left; ++i) m_nodes0[i] = g0 * i / n_left;
  for (int i = 1; i <= n_right; ++i) m_nodes0[n_left + i] = g0 + (1.0 - g0) * i / n_right;

  m_levels.assign(n_t + 1, std::vector<double>(n_x + 1));
  for (int n = 0; n <= n_t; ++n) {
    const double t = time(n);
    for (int i = 0; i <= n_x; ++i) m_levels[n][i] = m_motion.forward_map(m_nodes0[i], t);
    for (int i = 0; i < n_x; ++i)
      if (!(m_levels[n][i + 1] - m_levels[n][i] >= 1e-6))
        throw NumericalError("mesh: degenerate element (length < 1e-6) at level " +
                             std::to_string(n));
  }

  m_n_dof = (m_space == SpaceKind::Dirichlet) ? n_x - 1 : n_x + 1;
}

int SpaceTimeMesh::dof_of_node(int node) const {
  if (m_space == SpaceKind::Neumann) return node;
  if (node <= 0 || node >= m_n_x) return -1;
  return node - 1;
}

int SpaceTimeMesh::node_of_dof(int dof) const {
  return (m_space == SpaceKind::Neumann) ? dof : dof + 1;
}

SpaceTimeMesh build_mesh(int n_x, int n_t, const MotionMap& motion, double gamma0,
                         SpaceKind space) {
  if (std::abs(gamma0 - motion.gamma0()) > 1e-15)
    throw ValidationError("build_mesh: gamma0 does not match the motion's interface seed");
  return SpaceTimeMesh(n_x, n_t, motion, space);
}

} // namespace eip
