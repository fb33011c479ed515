#include "eip/assembly.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include "eip/errors.hpp"
#include "eip/quadrature.hpp"

namespace eip {

namespace {

struct SlabWork {
  std::vector<Eigen::Triplet<double>> trips;
  std::vector<std::pair<int, double>> rhs;
  double g1_dual_sq = 0.0;
};

// V-Gram (full H1 inner product) on the spatial mesh at time t, dense.
Eigen::MatrixXd v_gram(const SpaceTimeMesh& mesh, const std::vector<double>& xs) {
  const int M = mesh.n_dof();
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(M, M);
  for (int e = 0; e < mesh.n_cells(); ++e) {
    const double h = xs[e + 1] - xs[e];
    const double mass[2][2] = {{2 * h / 6, h / 6}, {h / 6, 2 * h / 6}};
    const double stiff[2][2] = {{1 / h, -1 / h}, {-1 / h, 1 / h}};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const int i = mesh.dof_of_node(e + a), j = mesh.dof_of_node(e + b);
        if (i >= 0 && j >= 0) G(i, j) += mass[a][b] + stiff[a][b];
      }
  }
  return G;
}

SlabWork assemble_slab(const SpaceTimeMesh& mesh, const PiecewiseCoefficient& coeff,
                       const SpatialOperator& op, const TimeDependentField& g1,
                       const AssemblyOptions& opt, int n) {
  SlabWork work;
  const MotionMap& motion = mesh.motion();
  const int M = mesh.n_dof();
  const int nx = mesh.n_cells();
  const int ig = mesh.interface_index();
  const double t0 = mesh.time(n), t1 = mesh.time(n + 1);
  const double dt = t1 - t0;
  const GaussRule& tr = gauss_rule(opt.quad_time);
  const GaussRule& xr = gauss_rule(opt.quad_space);

  std::vector<double> xs(nx + 1), vs(nx + 1);
  Eigen::VectorXd g1_load = Eigen::VectorXd::Zero(M);

  work.trips.reserve(static_cast<std::size_t>(nx) * tr.nodes.size() * 8);

  for (std::size_t q = 0; q < tr.nodes.size(); ++q) {
    const double t = 0.5 * (t0 + t1) + 0.5 * dt * tr.nodes[q];
    const double wq = 0.5 * dt * tr.weights[q];
    for (int i = 0; i <= nx; ++i) {
      xs[i] = mesh.node(i, t);
      vs[i] = motion.velocity(xs[i], t);
    }
    const double lam[2] = {(t1 - t) / dt, (t - t0) / dt};
    const double dlam[2] = {-1.0 / dt, 1.0 / dt};

    g1_load.setZero();
    for (int e = 0; e < nx; ++e) {
      const double xl = xs[e], h = xs[e + 1] - xl;
      if (!(h > 0.0))
        throw NumericalError("assembly: singular geometry in slab " + std::to_string(n));
      const int side = (e < ig) ? 1 : 2;
      for (std::size_t p = 0; p < xr.nodes.size(); ++p) {
        const double xi = 0.5 + 0.5 * xr.nodes[p];
        const double x = xl + xi * h;
        const double wx = 0.5 * h * xr.weights[p];
        const double alpha = coeff.value(x, t, side);
        const double kv = op.k(x, t, side), bv = op.b(x, t, side), cv = op.c(x, t, side);
        const double wmesh = vs[e] * (1.0 - xi) + vs[e + 1] * xi;
        const double N[2] = {1.0 - xi, xi};
        const double dN[2] = {-1.0 / h, 1.0 / h};
        for (int b = 0; b < 2; ++b) {
          const int jd = mesh.dof_of_node(e + b);
          if (jd < 0) continue;
          const int row = n * M + jd;
          for (int m = 0; m < 2; ++m)
            for (int a = 0; a < 2; ++a) {
              const int id = mesh.dof_of_node(e + a);
              if (id < 0) continue;
              const double phi = lam[m] * N[a];
              const double dphix = lam[m] * dN[a];
              const double dphit = dlam[m] * N[a] - lam[m] * wmesh * dN[a];
              const double val =
                  wq * wx *
                  (alpha * dphit * N[b] + kv * dphix * dN[b] + bv * dphix * N[b] +
                   cv * phi * N[b]);
              work.trips.emplace_back(row, (n + m) * M + id, val);
            }
          const double g1v = g1.value(x, t, side);
          work.rhs.emplace_back(row, wq * wx * g1v * N[b]);
          g1_load[jd] += wx * g1v * N[b];
        }
      }
    }
    // || g1(t) ||^2_{V'_h} on the moving mesh
    const Eigen::MatrixXd G = v_gram(mesh, xs);
    work.g1_dual_sq += wq * g1_load.dot(G.llt().solve(g1_load));
  }
  return work;
}

} // namespace

DiscreteSystem assemble_system(const SpaceTimeMesh& mesh, const PiecewiseCoefficient& coeff,
                               const SpatialOperator& op, const TimeDependentField& g1,
                               const SpatialField& g2, const AssemblyOptions& opt) {
  const int M = mesh.n_dof();
  const int N = mesh.n_slabs();
  const int nx = mesh.n_cells();
  const int ig = mesh.interface_index();

  DiscreteSystem sys;
  sys.n_x = nx;
  sys.n_t = N;
  sys.n_dof = M;
  sys.f = Eigen::VectorXd::Zero(mesh.test_dim());

  // slab-parallel with a fixed reduction order
  std::vector<SlabWork> works(N);
  const int jobs = std::max(1, opt.jobs);
  if (jobs == 1) {
    for (int n = 0; n < N; ++n) works[n] = assemble_slab(mesh, coeff, op, g1, opt, n);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < jobs; ++w)
      pool.emplace_back([&] {
        for (int n = next.fetch_add(1); n < N; n = next.fetch_add(1))
          works[n] = assemble_slab(mesh, coeff, op, g1, opt, n);
      });
    for (auto& th : pool) th.join();
  }

  std::vector<Eigen::Triplet<double>> trips;
  double g1_dual_sq = 0.0;
  for (int n = 0; n < N; ++n) {
    trips.insert(trips.end(), works[n].trips.begin(), works[n].trips.end());
    for (const auto& [row, val] : works[n].rhs) sys.f[row] += val;
    g1_dual_sq += works[n].g1_dual_sq;
  }
  sys.g1_dual_norm = std::sqrt(g1_dual_sq);

  // initial block at t = 0
  const GaussRule& xr = gauss_rule(opt.quad_space);
  sys.y2_elliptic.assign(M, false);
  for (int j = 0; j < M; ++j) {
    const int node = mesh.node_of_dof(j);
    bool meets_sigma0 = false;
    for (int e : {node - 1, node})
      if (e >= 0 && e < nx && coeff.active(e < ig ? 1 : 2)) meets_sigma0 = true;
    sys.y2_elliptic[j] = !meets_sigma0;
  }

  double g2_sq = 0.0;
  for (int e = 0; e < nx; ++e) {
    const double xl = mesh.level_node(0, e), h = mesh.level_node(0, e + 1) - xl;
    const int side = (e < ig) ? 1 : 2;
    const bool active = coeff.active(side);
    for (std::size_t p = 0; p < xr.nodes.size(); ++p) {
      const double xi = 0.5 + 0.5 * xr.nodes[p];
      const double x = xl + xi * h;
      const double wx = 0.5 * h * xr.weights[p];
      const double Nsh[2] = {1.0 - xi, xi};
      const double dN[2] = {-1.0 / h, 1.0 / h};
      if (active) g2_sq += wx * g2.value(x) * g2.value(x);
      for (int b = 0; b < 2; ++b) {
        const int jd = mesh.dof_of_node(e + b);
        if (jd < 0) continue;
        const int row = N * M + jd;
        if (!sys.y2_elliptic[jd] && active) {
          // (u(0), chi_j) over Sigma0 and (g2, chi_j) over Sigma0
          for (int a = 0; a < 2; ++a) {
            const int id = mesh.dof_of_node(e + a);
            if (id < 0) continue;
            trips.emplace_back(row, id, wx * Nsh[a] * Nsh[b]); // trial level 0
          }
          sys.f[row] += wx * g2.value(x) * Nsh[b];
        } else if (sys.y2_elliptic[jd] && !active) {
          // elliptic closure on the inactive branch: <A(0) u(0), chi_j> = <g1(0), chi_j>
          const double kv = op.k(x, 0.0, side), bv = op.b(x, 0.0, side),
                       cv = op.c(x, 0.0, side);
          for (int a = 0; a < 2; ++a) {
            const int id = mesh.dof_of_node(e + a);
            if (id < 0) continue;
            trips.emplace_back(row, id,
                               wx * (kv * dN[a] * dN[b] + bv * dN[a] * Nsh[b] +
                                     cv * Nsh[a] * Nsh[b]));
          }
          sys.f[row] += wx * g1.value(x, 0.0, side) * Nsh[b];
        }
      }
    }
  }
  sys.g2_norm = std::sqrt(g2_sq);

  sys.B.resize(mesh.test_dim(), mesh.trial_dim());
  sys.B.setFromTriplets(trips.begin(), trips.end());
  sys.B.makeCompressed();
  return sys;
}

NormMatrices norm_matrices(const SpaceTimeMesh& mesh, const PiecewiseCoefficient& coeff,
                           const AssemblyOptions& opt) {
  const MotionMap& motion = mesh.motion();
  const int M = mesh.n_dof();
  const int N = mesh.n_slabs();
  const int nx = mesh.n_cells();
  const int ig = mesh.interface_index();
  const GaussRule& tr = gauss_rule(opt.quad_time);
  const GaussRule& xr = gauss_rule(opt.quad_space);

  NormMatrices nm;
  nm.MX = Eigen::MatrixXd::Zero(mesh.trial_dim(), mesh.trial_dim());
  nm.MY = Eigen::MatrixXd::Zero(mesh.test_dim(), mesh.test_dim());

  std::vector<double> xs(nx + 1), vs(nx + 1);
  for (int n = 0; n < N; ++n) {
    const double t0 = mesh.time(n), t1 = mesh.time(n + 1);
    const double dt = t1 - t0;
    for (std::size_t q = 0; q < tr.nodes.size(); ++q) {
      const double t = 0.5 * (t0 + t1) + 0.5 * dt * tr.nodes[q];
      const double wq = 0.5 * dt * tr.weights[q];
      for (int i = 0; i <= nx; ++i) {
        xs[i] = mesh.node(i, t);
        vs[i] = motion.velocity(xs[i], t);
      }
      const double lam[2] = {(t1 - t) / dt, (t - t0) / dt};
      const double dlam[2] = {-1.0 / dt, 1.0 / dt};

      Eigen::MatrixXd C = Eigen::MatrixXd::Zero(M, 2 * M); // alpha dt phi loads
      for (int e = 0; e < nx; ++e) {
        const double xl = xs[e], h = xs[e + 1] - xl;
        const int side = (e < ig) ? 1 : 2;
        for (std::size_t p = 0; p < xr.nodes.size(); ++p) {
          const double xi = 0.5 + 0.5 * xr.nodes[p];
          const double x = xl + xi * h;
          const double wx = 0.5 * h * xr.weights[p];
          const double alpha = coeff.value(x, t, side);
          const double wmesh = vs[e] * (1.0 - xi) + vs[e + 1] * xi;
          const double Nl[2] = {1.0 - xi, xi};
          const double dN[2] = {-1.0 / h, 1.0 / h};
          for (int a = 0; a < 2; ++a) {
            const int id = mesh.dof_of_node(e + a);
            if (id < 0) continue;
            for (int b = 0; b < 2; ++b) {
              const int jd = mesh.dof_of_node(e + b);
              if (jd < 0) continue;
              // trial L2(J,V) Gram (levels n, n+1)
              for (int m = 0; m < 2; ++m)
                for (int m2 = 0; m2 < 2; ++m2)
                  nm.MX((n + m) * M + id, (n + m2) * M + jd) +=
                      wq * lam[m] * lam[m2] * wx * (Nl[a] * Nl[b] + dN[a] * dN[b]);
              // y1 test Gram (piecewise constant in time)
              nm.MY(n * M + id, n * M + jd) += wq * wx * (Nl[a] * Nl[b] + dN[a] * dN[b]);
            }
            for (int m = 0; m < 2; ++m) {
              const double dphit = dlam[m] * Nl[a] - lam[m] * wmesh * dN[a];
              for (int b = 0; b < 2; ++b) {
                const int jd = mesh.dof_of_node(e + b);
                if (jd < 0) continue;
                C(jd, m * M + id) += wx * alpha * dphit * Nl[b];
              }
            }
          }
        }
      }
      // dual part: wq * C' MV(t)^-1 C into levels (n, n+1)
      const Eigen::MatrixXd G = v_gram(mesh, xs);
      const Eigen::MatrixXd X = G.llt().solve(C);
      const Eigen::MatrixXd block = C.transpose() * X;
      for (int m = 0; m < 2; ++m)
        for (int m2 = 0; m2 < 2; ++m2)
          nm.MX.block((n + m) * M, (n + m2) * M, M, M) +=
              wq * block.block(m * M, m2 * M, M, M);
    }
  }

  // y2 block: Sigma0 mass on rows meeting Sigma0, V-Gram at t=0 on elliptic rows
  std::vector<bool> elliptic(M, false);
  for (int j = 0; j < M; ++j) {
    const int node = mesh.node_of_dof(j);
    bool meets = false;
    for (int e : {node - 1, node})
      if (e >= 0 && e < nx && coeff.active(e < ig ? 1 : 2)) meets = true;
    elliptic[j] = !meets;
  }
  for (int e = 0; e < nx; ++e) {
    const double xl = mesh.level_node(0, e), h = mesh.level_node(0, e + 1) - xl;
    const int side = (e < ig) ? 1 : 2;
    const bool active = coeff.active(side);
    const double mass[2][2] = {{2 * h / 6, h / 6}, {h / 6, 2 * h / 6}};
    const double stiff[2][2] = {{1 / h, -1 / h}, {-1 / h, 1 / h}};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const int i = mesh.dof_of_node(e + a), j = mesh.dof_of_node(e + b);
        if (i < 0 || j < 0) continue;
        if (active && !elliptic[i] && !elliptic[j])
          nm.MY(N * M + i, N * M + j) += mass[a][b];
        else if (!active && elliptic[i] && elliptic[j])
          nm.MY(N * M + i, N * M + j) += mass[a][b] + stiff[a][b];
      }
  }
  return nm;
}

void attach_norms(DiscreteSystem& sys, const SpaceTimeMesh& mesh,
                  const PiecewiseCoefficient& coeff, const AssemblyOptions& opt) {
  NormMatrices nm = norm_matrices(mesh, coeff, opt);
  sys.MX = std::move(nm.MX);
  sys.MY = std::move(nm.MY);
  sys.has_norms = true;
}

void dump_triplets(const Eigen::SparseMatrix<double>& A, std::ostream& os) {
  char buf[64];
  os << "# " << A.rows() << " " << A.cols() << " " << A.nonZeros() << "\n";
  for (int k = 0; k < A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it) {
      std::snprintf(buf, sizeof buf, "%ld %ld %.17g\n", static_cast<long>(it.row()),
                    static_cast<long>(it.col()), it.value());
      os << buf;
    }
}

} // namespace eip
