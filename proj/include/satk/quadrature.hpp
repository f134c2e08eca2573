#ifndef SATK_QUADRATURE_HPP
#define SATK_QUADRATURE_HPP

#include <functional>
#include <vector>

namespace satk {

struct QuadRule {
  std::vector<double> x;
  std::vector<double> w;
};

// n-point Gauss-Legendre rule on [-1, 1], Newton iteration on P_n.
QuadRule gauss_legendre(int n);

// Same rule mapped to [a, b].
QuadRule gauss_legendre(int n, double a, double b);

struct QuadResult {
  double value = 0.0;
  double err = 0.0;
};

// Global adaptive Gauss-Kronrod (10/21 point), at most 2^max_depth segments.
// Either bound may be infinite; err sums the per-segment K21 - G10 gaps.
QuadResult integrate(const std::function<double(double)>& f, double a,
                     double b, double tol = 1e-12, unsigned max_depth = 12,
                     double abs_tol = 0.0);

// Composite Gauss-Legendre with fixed panels; for oscillatory integrands
// where the panel width is matched to the oscillation.
double integrate_panels(const std::function<double(double)>& f, double a,
                        double b, double panel_width, int order = 20);

}  // namespace satk

#endif
