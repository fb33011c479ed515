#ifndef EIP_QUADRATURE_HPP
#define EIP_QUADRATURE_HPP

#include <functional>
#include <utility>
#include <vector>

namespace eip {

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Cached rule with n points (1 <= n <= 32), nodes computed by Newton iteration
// to machine precision.
const GaussRule& gauss_rule(int n);

// Composite Gauss quadrature of f over [a, b] with the given number of equal panels.
double integrate(const std::function<double(double)>& f, double a, double b,
                 int order, int panels);

// Sub-intervals of [a, b] after inserting `split`. If the split collides with an
// endpoint within 1e-14 it is nudged 1e-12 toward the larger sub-interval; a split
// outside (a, b) leaves the interval whole.
std::vector<std::pair<double, double>> fitted_segments(double a, double b, double split);

// Composite Gauss quadrature over [0,1] split at gamma; f receives (x, side)
// where side = 1 left of gamma and 2 right of it.
double integrate_fitted(const std::function<double(double, int)>& f, double gamma,
                        int order, int panels_per_side);

// Adaptive Simpson quadrature; used for one-off high-accuracy constants.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-14, int max_depth = 60);

} // namespace eip

#endif
