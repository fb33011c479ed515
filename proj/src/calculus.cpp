#include "eip/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "eip/errors.hpp"
#include "eip/quadrature.hpp"

namespace eip {

namespace {
constexpr int kTimePanels = 48;
constexpr int kSpacePanels = 24; // per interface side
} // namespace

void NormContext::validate() const {
  if (!(h_ref > 0.0)) throw ValidationError("NormContext: h_ref must be positive");
  if (quad_space < 2 || quad_time < 2)
    throw ValidationError("NormContext: quadrature orders must be >= 2");
  if (p < 2.0) throw ValidationError("NormContext: p < 2 unsupported");
}

//------------------------------------------------------------------------------
// RieszSolver
//------------------------------------------------------------------------------

RieszSolver::RieszSolver(int cells, SpaceKind space)
    : m_cells(cells), m_space(space) {
  const double h = 1.0 / cells;
  m_dim = (space == SpaceKind::Dirichlet) ? cells - 1 : cells + 1;
  const int off = (space == SpaceKind::Dirichlet) ? 1 : 0; // node index of dof 0
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(4 * cells);
  auto dof = [&](int node) { return node - off; };
  for (int k = 0; k < cells; ++k) {
    const double mloc[2][2] = {{2 * h / 6 + 1 / h, h / 6 - 1 / h},
                               {h / 6 - 1 / h, 2 * h / 6 + 1 / h}};
    const int nodes[2] = {k, k + 1};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const int i = dof(nodes[a]), j = dof(nodes[b]);
        if (i >= 0 && i < m_dim && j >= 0 && j < m_dim)
          trips.emplace_back(i, j, mloc[a][b]);
      }
  }
  m_gram.resize(m_dim, m_dim);
  m_gram.setFromTriplets(trips.begin(), trips.end());
  m_llt.compute(m_gram);
  if (m_llt.info() != Eigen::Success)
    throw InstabilityError("RieszSolver: V-Gram factorization failed");
}

Eigen::VectorXd RieszSolver::load(const std::function<double(double, int)>& z,
                                  double gamma, int qorder) const {
  const double h = 1.0 / m_cells;
  const int off = (m_space == SpaceKind::Dirichlet) ? 1 : 0;
  Eigen::VectorXd r = Eigen::VectorXd::Zero(m_dim);
  const GaussRule& rule = gauss_rule(qorder);
  for (int k = 0; k < m_cells; ++k) {
    const double xl = k * h, xr = xl + h;
    for (const auto& [lo, hi] : fitted_segments(xl, xr, gamma)) {
      const int side = (0.5 * (lo + hi) < gamma) ? 1 : 2;
      const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double x = mid + half * rule.nodes[q];
        const double wq = half * rule.weights[q];
        const double zv = z(x, side);
        const double phiL = (xr - x) / h, phiR = (x - xl) / h;
        const int iL = k - off, iR = k + 1 - off;
        if (iL >= 0 && iL < m_dim) r[iL] += wq * zv * phiL;
        if (iR >= 0 && iR < m_dim) r[iR] += wq * zv * phiR;
      }
    }
  }
  return r;
}

double RieszSolver::dual_norm_sq(const Eigen::VectorXd& r) const {
  return r.dot(m_llt.solve(r));
}

double RieszSolver::vnorm_sq(const std::function<double(double, int)>& w,
                             const std::function<double(double, int)>& dw,
                             double gamma, int qorder) const {
  const double h = 1.0 / m_cells;
  double sum = 0.0;
  for (int k = 0; k < m_cells; ++k) {
    for (const auto& [lo, hi] : fitted_segments(k * h, k * h + h, gamma)) {
      const int side = (0.5 * (lo + hi) < gamma) ? 1 : 2;
      sum += integrate(
          [&](double x) {
            const double wv = w(x, side), dv = dw(x, side);
            return wv * wv + dv * dv;
          },
          lo, hi, qorder, 1);
    }
  }
  return sum;
}

//------------------------------------------------------------------------------
// Mollification
//------------------------------------------------------------------------------

double mollifier_constant() {
  static const double c = [] {
    auto bump1 = [](double t) {
      if (std::abs(t) >= 1.0) return 0.0;
      return std::exp(t * t / (t * t - 1.0));
    };
    return 1.0 / adaptive_simpson(bump1, -1.0, 1.0, 1e-15);
  }();
  return c;
}

double mollifier_kernel(double eps, double tau) {
  if (!(eps > 0.0)) throw std::invalid_argument("mollifier_kernel: eps must be positive");
  if (std::abs(tau) >= eps) return 0.0;
  return mollifier_constant() / eps * std::exp(tau * tau / (tau * tau - eps * eps));
}

double kernel_shift(double eps, double t, double T) {
  return eps * (T - 2.0 * t) / T;
}

namespace {

// Break points of s -> u(x, s) on [lo, hi]: declared time kinks plus the times
// where the interface crosses x (per-branch fields switch side there).
std::vector<double> window_breaks(const TimeDependentField& u, const MotionMap& motion,
                                  double x, double lo, double hi) {
  std::vector<double> breaks;
  for (double k : u.time_kinks())
    if (k > lo && k < hi) breaks.push_back(k);
  if (!u.globally_smooth()) {
    const int scan = 64;
    double prev = motion.interface_position(lo) - x;
    for (int i = 1; i <= scan; ++i) {
      const double s = lo + (hi - lo) * i / scan;
      const double cur = motion.interface_position(s) - x;
      if ((prev < 0.0) != (cur < 0.0)) {
        double a = lo + (hi - lo) * (i - 1) / scan, b = s;
        for (int it = 0; it < 60; ++it) {
          const double m = 0.5 * (a + b);
          if ((motion.interface_position(m) - x < 0.0) == (prev < 0.0)) a = m; else b = m;
        }
        breaks.push_back(0.5 * (a + b));
      }
      prev = cur;
    }
  }
  std::sort(breaks.begin(), breaks.end());
  return breaks;
}

double mollify_component(const TimeDependentField& u, bool derivative, double eps,
                         double x, double t, const MotionMap& motion, int qorder) {
  const double T = motion.horizon();
  const double cen = t + kernel_shift(eps, t, T);
  const double lo = std::fmax(0.0, cen - eps), hi = std::fmin(T, cen + eps);
  if (!(hi > lo)) return 0.0;
  std::vector<double> pts{lo};
  for (double b : window_breaks(u, motion, x, lo, hi)) pts.push_back(b);
  pts.push_back(hi);
  double sum = 0.0;
  for (std::size_t seg = 0; seg + 1 < pts.size(); ++seg) {
    const double a = pts[seg], b = pts[seg + 1];
    const int side = u.globally_smooth()
                         ? 1
                         : ((x < motion.interface_position(0.5 * (a + b))) ? 1 : 2);
    sum += integrate(
        [&](double s) {
          const double uv = derivative ? u.dx(x, s, side) : u.value(x, s, side);
          return mollifier_kernel(eps, cen - s) * uv;
        },
        a, b, qorder, 32);
  }
  return sum;
}

} // namespace

double mollify(const TimeDependentField& u, double eps, double x, double t,
               const MotionMap& motion, int qorder) {
  const double T = motion.horizon();
  if (!(eps > 0.0)) throw std::invalid_argument("mollify: eps must be positive");
  if (!(eps < T / 4.0)) throw std::invalid_argument("mollify: eps too large (needs eps < T/4)");
  return mollify_component(u, false, eps, x, t, motion, qorder);
}

std::vector<DensityRow> density_study(const TimeDependentField& u,
                                      const std::vector<double>& eps_list,
                                      const MotionMap& motion, const NormContext& ctx) {
  ctx.validate();
  for (std::size_t i = 0; i + 1 < eps_list.size(); ++i)
    if (!(eps_list[i + 1] < eps_list[i]))
      throw ValidationError("density_study: eps_list must be strictly decreasing");

  const double T = motion.horizon();
  std::vector<DensityRow> rows;
  for (double eps : eps_list) {
    // coarse time panels refined around declared kinks (error has eps-wide layers there)
    std::vector<double> edges;
    const int coarse = 32;
    for (int i = 0; i <= coarse; ++i) edges.push_back(T * i / coarse);
    for (double k : u.time_kinks()) {
      const double lo = std::fmax(0.0, k - 2 * eps), hi = std::fmin(T, k + 2 * eps);
      for (int i = 0; i <= 16; ++i) edges.push_back(lo + (hi - lo) * i / 16.0);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-15; }),
                edges.end());

    const GaussRule& trule = gauss_rule(ctx.quad_time);
    const int xcells = std::max(16, ctx.ref_cells());
    double acc = 0.0;
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
      const double mid = 0.5 * (edges[e] + edges[e + 1]);
      const double half = 0.5 * (edges[e + 1] - edges[e]);
      for (std::size_t q = 0; q < trule.nodes.size(); ++q) {
        const double t = mid + half * trule.nodes[q];
        const double wt = half * trule.weights[q];
        const double g = motion.interface_position(t);
        double space = 0.0;
        const double hx = 1.0 / xcells;
        for (int k = 0; k < xcells; ++k) {
          for (const auto& [lo, hi] : fitted_segments(k * hx, k * hx + hx, g)) {
            const int side = (0.5 * (lo + hi) < g) ? 1 : 2;
            space += integrate(
                [&](double x) {
                  const double ev = mollify_component(u, false, eps, x, t, motion,
                                                      ctx.quad_time) -
                                    u.value(x, t, side);
                  const double ed = mollify_component(u, true, eps, x, t, motion,
                                                      ctx.quad_time) -
                                    u.dx(x, t, side);
                  return ev * ev + ed * ed;
                },
                lo, hi, ctx.quad_space, 1);
          }
        }
        acc += wt * space;
      }
    }
    rows.push_back({eps, std::sqrt(acc)});
  }
  return rows;
}

//------------------------------------------------------------------------------
// Pairings
//------------------------------------------------------------------------------

namespace {

void check_bump_support(const TimeBump& phi, double T) {
  if (std::abs(phi.value(0.0)) > 1e-12 || std::abs(phi.value(T)) > 1e-12)
    throw std::domain_error("pairing: phi does not vanish near 0 and T");
}

template <typename Integrand>
double spacetime_integral(const MotionMap& motion, const NormContext& ctx,
                          double t1, double t2, Integrand&& f) {
  const GaussRule& trule = gauss_rule(ctx.quad_time);
  double acc = 0.0;
  const double ht = (t2 - t1) / kTimePanels;
  for (int p = 0; p < kTimePanels; ++p) {
    const double mid = t1 + (p + 0.5) * ht;
    for (std::size_t q = 0; q < trule.nodes.size(); ++q) {
      const double t = mid + 0.5 * ht * trule.nodes[q];
      const double wt = 0.5 * ht * trule.weights[q];
      const double g = motion.interface_position(t);
      acc += wt * integrate_fitted([&](double x, int side) { return f(x, t, side); }, g,
                                   ctx.quad_space, kSpacePanels);
    }
  }
  return acc;
}

} // namespace

namespace {
std::pair<double, double> bump_window(const TimeBump& phi, double T) {
  return {std::fmax(0.0, phi.support_lo), std::fmin(T, phi.support_hi)};
}
} // namespace

double weighted_pairing(const TimeDependentField& u, const TimeBump& phi,
                        const SpatialField& w, const PiecewiseCoefficient& coeff,
                        const MotionMap& motion, const NormContext& ctx) {
  ctx.validate();
  check_bump_support(phi, motion.horizon());
  const auto [lo, hi] = bump_window(phi, motion.horizon());
  const double val = spacetime_integral(
      motion, ctx, lo, hi, [&](double x, double t, int side) {
        const BranchEval a = coeff.eval(x, t, side);
        const double uv = u.value(x, t, side), ux = u.dx(x, t, side);
        const double wv = w.value(x), wx = w.dx(x);
        const double v = motion.velocity(x, t), vx = motion.velocity_dx(x, t);
        const double phiv = phi.value(t), phid = phi.dt(t);
        const double div_auwv =
            (a.dx_value * uv * wv + a.value * ux * wv + a.value * uv * wx) * v +
            a.value * uv * wv * vx;
        return a.value * uv * wv * phid + uv * phiv * wv * a.dt_value + phiv * div_auwv;
      });
  return -val;
}

double material_pairing(const TimeDependentField& u, const TimeBump& phi,
                        const SpatialField& w, const PiecewiseCoefficient& coeff,
                        const MotionMap& motion, const NormContext& ctx) {
  ctx.validate();
  check_bump_support(phi, motion.horizon());
  const auto [lo, hi] = bump_window(phi, motion.horizon());
  const double val = spacetime_integral(
      motion, ctx, lo, hi, [&](double x, double t, int side) {
        const BranchEval a = coeff.eval(x, t, side);
        const double uv = u.value(x, t, side);
        const double wv = w.value(x), wx = w.dx(x);
        const double v = motion.velocity(x, t), vx = motion.velocity_dx(x, t);
        const double phiv = phi.value(t), phid = phi.dt(t);
        const double div_av = a.dx_value * v + a.value * vx;
        return a.value * uv * (wv * phid + phiv * v * wx) + uv * phiv * wv * a.dt_value +
               phiv * uv * wv * div_av;
      });
  return -val;
}

double ibp_residual(const TimeDependentField& u, const TimeDependentField& z,
                    double t1, double t2, const PiecewiseCoefficient& coeff,
                    const MotionMap& motion, const NormContext& ctx) {
  ctx.validate();
  if (!(t1 < t2)) throw std::invalid_argument("ibp_residual: needs t1 < t2");

  auto trace = [&](double t) {
    const double g = motion.interface_position(t);
    return integrate_fitted(
        [&](double x, int side) {
          return coeff.value(x, t, side) * u.value(x, t, side) * z.value(x, t, side);
        },
        g, ctx.quad_space, kSpacePanels);
  };

  const double lhs = spacetime_integral(
      motion, ctx, t1, t2, [&](double x, double t, int side) {
        const double a = coeff.value(x, t, side);
        return a * (u.dt(x, t, side) * z.value(x, t, side) +
                    z.dt(x, t, side) * u.value(x, t, side));
      });

  const double correction = spacetime_integral(
      motion, ctx, t1, t2, [&](double x, double t, int side) {
        const BranchEval a = coeff.eval(x, t, side);
        const double uv = u.value(x, t, side), zv = z.value(x, t, side);
        const double v = motion.velocity(x, t), vx = motion.velocity_dx(x, t);
        const double div_auzv =
            a.dx_value * uv * zv * v +
            a.value * (u.dx(x, t, side) * zv + z.dx(x, t, side) * uv) * v +
            a.value * uv * zv * vx;
        return uv * zv * a.dt_value + div_auzv;
      });

  const double rhs = trace(t2) - trace(t1) - correction;
  return std::abs(lhs - rhs);
}

//------------------------------------------------------------------------------
// Embedding
//------------------------------------------------------------------------------

double embedding_constant(double p, const EmbeddingConstants& c, double T) {
  if (p < 2.0) throw std::invalid_argument("embedding_constant: requires p >= 2");
  if (!(c.C_v >= 0.0) || !(c.C_alpha > 0.0) || !(c.C_emb > 0.0) || !(T > 0.0))
    throw std::invalid_argument("embedding_constant: nonpositive input");
  return std::sqrt((c.C_v + 1.0 + 1.0 / T) * c.C_alpha * c.C_emb * c.C_emb *
                       std::pow(T, (p - 2.0) / p) +
                   1.0);
}

double l2jv_norm(const TimeDependentField& u, const MotionMap& motion,
                 const NormContext& ctx) {
  ctx.validate();
  const double sq = spacetime_integral(
      motion, ctx, 0.0, motion.horizon(), [&](double x, double t, int side) {
        const double uv = u.value(x, t, side), ux = u.dx(x, t, side);
        return uv * uv + ux * ux;
      });
  return std::sqrt(sq);
}

EmbeddingReport embedding_ratio(const TimeDependentField& u,
                                const PiecewiseCoefficient& coeff,
                                const MotionMap& motion, const NormContext& ctx) {
  ctx.validate();
  const double T = motion.horizon();

  double max_trace_sq = 0.0;
  const int samples = 200;
  for (int k = 0; k < samples; ++k) {
    const double t = T * k / (samples - 1.0);
    const double g = motion.interface_position(t);
    const double tr = integrate_fitted(
        [&](double x, int side) {
          if (!coeff.active(side)) return 0.0; // Sigma(t) is the active region
          const double uv = u.value(x, t, side);
          return uv * uv;
        },
        g, ctx.quad_space, kSpacePanels);
    max_trace_sq = std::fmax(max_trace_sq, tr);
  }
  const double max_trace = std::sqrt(max_trace_sq);

  const double l2v = l2jv_norm(u, motion, ctx);

  RieszSolver riesz(ctx.ref_cells(), ctx.space);
  const GaussRule& trule = gauss_rule(ctx.quad_time);
  const int tpanels = 32;
  double dual_sq = 0.0;
  for (int p = 0; p < tpanels; ++p) {
    const double mid = (p + 0.5) * T / tpanels;
    for (std::size_t q = 0; q < trule.nodes.size(); ++q) {
      const double t = mid + 0.5 * (T / tpanels) * trule.nodes[q];
      const double wt = 0.5 * (T / tpanels) * trule.weights[q];
      const double g = motion.interface_position(t);
      const Eigen::VectorXd r = riesz.load(
          [&](double x, int side) { return coeff.value(x, t, side) * u.dt(x, t, side); },
          g, ctx.quad_space);
      dual_sq += wt * riesz.dual_norm_sq(r);
    }
  }
  const double graph = l2v + std::sqrt(dual_sq);

  EmbeddingReport rep;
  rep.max_trace_norm = max_trace;
  rep.graph_norm = graph;
  if (graph == 0.0) {
    if (max_trace > 1e-12)
      throw NumericalError("embedding_ratio: zero graph norm with nonzero trace");
    rep.ratio = 0.0;
  } else {
    rep.ratio = max_trace / graph;
  }
  const GlobalConstants gc = coeff.global_constants(motion);
  rep.bound = embedding_constant(2.0, {gc.C_v, gc.C_alpha, 1.0}, T) / std::sqrt(gc.alpha0);
  return rep;
}

} // namespace eip
