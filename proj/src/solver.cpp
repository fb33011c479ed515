#include "eip/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include "eip/errors.hpp"
#include "eip/quadrature.hpp"
#include "eip/scenario.hpp"

namespace eip {

//------------------------------------------------------------------------------
// SolutionField
//------------------------------------------------------------------------------

SolutionField::SolutionField(SpaceTimeMesh mesh, Eigen::VectorXd coeffs)
    : m_mesh(std::move(mesh)), m_u(std::move(coeffs)) {
  if (m_u.size() != m_mesh.trial_dim())
    throw ValidationError("SolutionField: coefficient size mismatch");
}

double SolutionField::coeff(int level, int dof) const {
  return m_u[level * m_mesh.n_dof() + dof];
}

double SolutionField::nodal(int level, int node) const {
  const int dof = m_mesh.dof_of_node(node);
  return dof < 0 ? 0.0 : coeff(level, dof);
}

int SolutionField::locate_slab(double t) const {
  const int N = m_mesh.n_slabs();
  int n = static_cast<int>(std::floor(t / m_mesh.slab_dt()));
  return std::min(std::max(n, 0), N - 1);
}

double SolutionField::value(double x, double t) const {
  const int n = locate_slab(t);
  const double tau = (t - m_mesh.time(n)) / m_mesh.slab_dt();
  const int nx = m_mesh.n_cells();
  // locate the element on the moving mesh
  int lo = 0, hi = nx;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    if (m_mesh.node(mid, t) <= x) lo = mid; else hi = mid;
  }
  const double xl = m_mesh.node(lo, t), xr = m_mesh.node(lo + 1, t);
  const double xi = std::min(1.0, std::max(0.0, (x - xl) / (xr - xl)));
  const double cl = (1.0 - tau) * nodal(n, lo) + tau * nodal(n + 1, lo);
  const double cr = (1.0 - tau) * nodal(n, lo + 1) + tau * nodal(n + 1, lo + 1);
  return cl * (1.0 - xi) + cr * xi;
}

double SolutionField::dx_value(double x, double t) const {
  const int n = locate_slab(t);
  const double tau = (t - m_mesh.time(n)) / m_mesh.slab_dt();
  const int nx = m_mesh.n_cells();
  int lo = 0, hi = nx;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    if (m_mesh.node(mid, t) <= x) lo = mid; else hi = mid;
  }
  const double xl = m_mesh.node(lo, t), xr = m_mesh.node(lo + 1, t);
  const double cl = (1.0 - tau) * nodal(n, lo) + tau * nodal(n + 1, lo);
  const double cr = (1.0 - tau) * nodal(n, lo + 1) + tau * nodal(n + 1, lo + 1);
  return (cr - cl) / (xr - xl);
}

double SolutionField::dt_value(double x, double t) const {
  const int n = locate_slab(t);
  const double dt = m_mesh.slab_dt();
  const double tau = (t - m_mesh.time(n)) / dt;
  const int nx = m_mesh.n_cells();
  int lo = 0, hi = nx;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    if (m_mesh.node(mid, t) <= x) lo = mid; else hi = mid;
  }
  const double xl = m_mesh.node(lo, t), xr = m_mesh.node(lo + 1, t);
  const double xi = std::min(1.0, std::max(0.0, (x - xl) / (xr - xl)));
  const double cl = (1.0 - tau) * nodal(n, lo) + tau * nodal(n + 1, lo);
  const double cr = (1.0 - tau) * nodal(n, lo + 1) + tau * nodal(n + 1, lo + 1);
  const double dcl = (nodal(n + 1, lo) - nodal(n, lo)) / dt;
  const double dcr = (nodal(n + 1, lo + 1) - nodal(n, lo + 1)) / dt;
  const double wmesh = m_mesh.node_velocity(lo, t) * (1.0 - xi) +
                       m_mesh.node_velocity(lo + 1, t) * xi;
  const double dux = (cr - cl) / (xr - xl);
  return dcl * (1.0 - xi) + dcr * xi - wmesh * dux;
}

TimeDependentField SolutionField::as_field() const {
  SolutionField self = *this;
  BranchFn fn;
  fn.value = [self](double x, double t) { return self.value(x, t); };
  fn.dt = [self](double x, double t) { return self.dt_value(x, t); };
  fn.dx = [self](double x, double t) { return self.dx_value(x, t); };
  return TimeDependentField(fn);
}

//------------------------------------------------------------------------------
// Linear solve
//------------------------------------------------------------------------------

SolutionField solve(const DiscreteSystem& sys, const SpaceTimeMesh& mesh) {
  if (sys.B.rows() != sys.B.cols())
    throw ValidationError("solve: system is not square");
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(sys.B);
  lu.factorize(sys.B);
  if (lu.info() != Eigen::Success)
    throw InstabilityError("discrete instability: singular factorization (n_x=" +
                           std::to_string(sys.n_x) + ", n_t=" + std::to_string(sys.n_t) +
                           ")");
  Eigen::VectorXd u = lu.solve(sys.f);
  const double fn = sys.f.norm();
  Eigen::VectorXd r = sys.f - sys.B * u;
  if (fn > 0.0 && r.norm() > 1e-10 * fn) {
    u += lu.solve(r); // one refinement pass
    r = sys.f - sys.B * u;
    if (r.norm() > 1e-10 * fn)
      throw NumericalError("solve: relative residual above 1e-10 after refinement");
  }
  return SolutionField(mesh, std::move(u));
}

//------------------------------------------------------------------------------
// Discrete inf-sup
//------------------------------------------------------------------------------

double discrete_inf_sup(const DiscreteSystem& sys, int dense_cap) {
  if (!sys.has_norms)
    throw ValidationError("discrete_inf_sup: norm matrices missing");
  const int nu = sys.trial_dim();
  const Eigen::MatrixXd Bd = Eigen::MatrixXd(sys.B);
  Eigen::LLT<Eigen::MatrixXd> my(sys.MY);
  if (my.info() != Eigen::Success)
    throw InstabilityError("discrete_inf_sup: MY not positive definite");
  const Eigen::MatrixXd S = Bd.transpose() * my.solve(Bd);

  if (nu <= dense_cap) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(S, sys.MX,
                                                                 Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
      throw InstabilityError("discrete_inf_sup: eigensolver failed");
    const double lam = es.eigenvalues()(0);
    return lam > 0.0 ? std::sqrt(lam) : 0.0;
  }

  // inverse iteration on the pencil (S, MX): power iteration for the largest
  // eigenvalue of S^-1 MX, whose reciprocal is the smallest of (S, MX)
  Eigen::LDLT<Eigen::MatrixXd> sf(S);
  if (sf.info() != Eigen::Success)
    throw InstabilityError("discrete_inf_sup: singular normal matrix");
  Eigen::VectorXd x = Eigen::VectorXd::Ones(nu);
  x /= std::sqrt(x.dot(sys.MX * x));
  double mu = 0.0;
  for (int it = 0; it < 500; ++it) {
    Eigen::VectorXd y = sf.solve(sys.MX * x);
    const double norm = std::sqrt(y.dot(sys.MX * y));
    y /= norm;
    const double mu_new = y.dot(sys.MX * y) / y.dot(S * y);
    const bool done = std::abs(mu_new - mu) <= 1e-8 * std::abs(mu_new);
    mu = mu_new;
    x = y;
    if (done) return std::sqrt(1.0 / mu);
  }
  throw InstabilityError("discrete_inf_sup: inverse iteration did not converge");
}

//------------------------------------------------------------------------------
// A priori estimate
//------------------------------------------------------------------------------

AprioriReport apriori_check(const SolutionField& sol, const DiscreteSystem& sys,
                            double c_Bh) {
  if (!sys.has_norms)
    throw ValidationError("apriori_check: norm matrices missing");
  AprioriReport rep;
  rep.lhs = std::sqrt(sol.coeffs().dot(sys.MX * sol.coeffs()));
  rep.rhs = (sys.g1_dual_norm + sys.g2_norm) / c_Bh;
  rep.satisfied = rep.lhs <= rep.rhs * (1.0 + 1e-8);
  return rep;
}

//------------------------------------------------------------------------------
// Studies
//------------------------------------------------------------------------------

double fitted_order(const std::vector<double>& errors) {
  // log2 slope against halving meshes, least squares
  const int n = static_cast<int>(errors.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = -static_cast<double>(i); // log2(h_i) up to a constant
    const double y = std::log2(std::max(errors[i], 1e-300));
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ErrorNorms solution_errors(const SolutionField& u_h, const TimeDependentField& exact,
                           const PiecewiseCoefficient& coeff, int quad_space,
                           int quad_time) {
  const SpaceTimeMesh& mesh = u_h.mesh();
  const GaussRule& tr = gauss_rule(quad_time);
  const int nx = mesh.n_cells();
  const int ig = mesh.interface_index();
  double l2q = 0.0, l2jv = 0.0, trace_sq_max = 0.0;

  auto trace_sq_at = [&](double t) {
    double acc = 0.0;
    for (int e = 0; e < nx; ++e) {
      const double xl = mesh.node(e, t), xr = mesh.node(e + 1, t);
      const int side = (e < ig) ? 1 : 2;
      acc += integrate(
          [&](double x) {
            const double d = u_h.value(x, t) - exact.value(x, t, side);
            return coeff.value(x, t, side) * d * d;
          },
          xl, xr, quad_space, 1);
    }
    return acc;
  };

  for (int n = 0; n < mesh.n_slabs(); ++n) {
    const double t0 = mesh.time(n), t1 = mesh.time(n + 1);
    const double half = 0.5 * (t1 - t0);
    for (std::size_t q = 0; q < tr.nodes.size(); ++q) {
      const double t = 0.5 * (t0 + t1) + half * tr.nodes[q];
      const double wq = half * tr.weights[q];
      double sq_val = 0.0, sq_v = 0.0;
      for (int e = 0; e < nx; ++e) {
        const double xl = mesh.node(e, t), xr = mesh.node(e + 1, t);
        const int side = (e < ig) ? 1 : 2;
        sq_val += integrate(
            [&](double x) {
              const double d = u_h.value(x, t) - exact.value(x, t, side);
              return d * d;
            },
            xl, xr, quad_space, 1);
        sq_v += integrate(
            [&](double x) {
              const double d = u_h.value(x, t) - exact.value(x, t, side);
              const double dd = u_h.dx_value(x, t) - exact.dx(x, t, side);
              return d * d + dd * dd;
            },
            xl, xr, quad_space, 1);
      }
      l2q += wq * sq_val;
      l2jv += wq * sq_v;
      trace_sq_max = std::fmax(trace_sq_max, trace_sq_at(t));
    }
  }
  for (int n = 0; n <= mesh.n_slabs(); ++n)
    trace_sq_max = std::fmax(trace_sq_max, trace_sq_at(mesh.time(n)));

  return ErrorNorms{std::sqrt(l2q), std::sqrt(l2jv), std::sqrt(trace_sq_max)};
}

namespace {
// ordered parallel map over level indices
void for_levels(std::size_t count, int jobs, const std::function<void(std::size_t)>& work) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) work(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const int n_threads = std::min<std::size_t>(jobs, count);
  for (int w = 0; w < n_threads; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) work(i);
    });
  for (auto& th : pool) th.join();
}
} // namespace

ConvergenceTable convergence_study(const Scenario& scenario,
                                   const std::vector<std::pair<int, int>>& levels,
                                   bool with_stability) {
  if (!scenario.exact)
    throw ValidationError("convergence_study: scenario has no exact solution");
  for (std::size_t i = 0; i + 1 < levels.size(); ++i)
    if (levels[i + 1].first != 2 * levels[i].first ||
        levels[i + 1].second != 2 * levels[i].second)
      throw ValidationError("convergence_study: non-nested levels");

  ConvergenceTable table;
  table.rows.resize(levels.size());
  for_levels(levels.size(), scenario.disc.jobs, [&](std::size_t i) {
    const auto [n_x, n_t] = levels[i];
    SpaceTimeMesh mesh(n_x, n_t, scenario.motion, scenario.op.space());
    AssemblyOptions opt{scenario.disc.quad_space, scenario.disc.quad_time, 1};
    DiscreteSystem sys = assemble_system(mesh, scenario.coefficient, scenario.op,
                                         scenario.g1, scenario.g2, opt);
    ConvergenceRow row;
    row.n_x = n_x;
    row.n_t = n_t;
    row.c_Bh = 0.0;
    row.apriori_lhs = row.apriori_rhs = 0.0;
    SolutionField u_h = solve(sys, mesh);
    const ErrorNorms err = solution_errors(u_h, *scenario.exact, scenario.coefficient);
    row.err_l2q = err.l2q;
    row.err_l2jv = err.l2jv;
    row.err_trace = err.trace_alpha;
    if (with_stability) {
      attach_norms(sys, mesh, scenario.coefficient, opt);
      row.c_Bh = discrete_inf_sup(sys);
      const AprioriReport ap = apriori_check(u_h, sys, row.c_Bh);
      row.apriori_lhs = ap.lhs;
      row.apriori_rhs = ap.rhs;
    }
    table.rows[i] = row;
  });
  std::vector<double> e_q, e_v;
  for (const auto& row : table.rows) {
    e_q.push_back(row.err_l2q);
    e_v.push_back(row.err_l2jv);
  }
  table.order_l2q = fitted_order(e_q);
  table.order_l2jv = fitted_order(e_v);
  return table;
}

StabilityReport stability_study(const Scenario& scenario,
                                const std::vector<std::pair<int, int>>& levels) {
  StabilityReport rep;
  rep.rows.resize(levels.size());
  for_levels(levels.size(), scenario.disc.jobs, [&](std::size_t i) {
    const auto [n_x, n_t] = levels[i];
    SpaceTimeMesh mesh(n_x, n_t, scenario.motion, scenario.op.space());
    AssemblyOptions opt{scenario.disc.quad_space, scenario.disc.quad_time, 1};
    DiscreteSystem sys = assemble_system(mesh, scenario.coefficient, scenario.op,
                                         scenario.g1, scenario.g2, opt);
    attach_norms(sys, mesh, scenario.coefficient, opt);
    StabilityRow row;
    row.n_x = n_x;
    row.n_t = n_t;
    row.trial_dim = mesh.trial_dim();
    row.c_Bh = discrete_inf_sup(sys);
    const AprioriReport ap = apriori_check(solve(sys, mesh), sys, row.c_Bh);
    row.apriori_lhs = ap.lhs;
    row.apriori_rhs = ap.rhs;
    row.satisfied = row.c_Bh > 0.0 && ap.satisfied;
    rep.rows[i] = row;
  });
  double lo = 1e300, hi = 0.0;
  for (const auto& r : rep.rows) {
    lo = std::min(lo, r.c_Bh);
    hi = std::max(hi, r.c_Bh);
  }
  rep.ratio = (lo > 0.0) ? hi / lo : 1e300;
  return rep;
}

ShiftReport shift_equivalence(const Scenario& scenario, double lambda0) {
  SpaceTimeMesh mesh(scenario.disc.cells, scenario.disc.slabs, scenario.motion,
                     scenario.op.space());
  AssemblyOptions opt{scenario.disc.quad_space, scenario.disc.quad_time,
                      scenario.disc.jobs};

  const DiscreteSystem sys0 = assemble_system(mesh, scenario.coefficient, scenario.op,
                                              scenario.g1, scenario.g2, opt);
  const SolutionField u = solve(sys0, mesh);

  SpatialOperator op_l0 = scenario.op;
  op_l0.set_lambda0(lambda0);
  const SpatialOperator op_hat = op_l0.shifted(scenario.coefficient);
  const TimeDependentField g1_hat = scale_by_exp(scenario.g1, -lambda0);
  const DiscreteSystem sys_hat = assemble_system(mesh, scenario.coefficient, op_hat,
                                                 g1_hat, scenario.g2, opt);
  const SolutionField u_hat = solve(sys_hat, mesh);

  double gap = 0.0;
  for (int m = 0; m <= mesh.n_slabs(); ++m) {
    const double factor = std::exp(lambda0 * mesh.time(m));
    for (int d = 0; d < mesh.n_dof(); ++d)
      gap = std::fmax(gap, std::abs(u.coeff(m, d) - u_hat.coeff(m, d) * factor));
  }
  return ShiftReport{gap};
}

} // namespace eip
