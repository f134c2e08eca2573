#ifndef SATK_GAP_HPP
#define SATK_GAP_HPP

#include <vector>

#include "satk/kernels.hpp"

namespace satk {

struct GapResult {
  double xi = 0.0;         // right end of the interval
  double det_value = 1.0;  // det(I - K) on the interval
  double cdf = 0.0;        // 1 - det_value
  int order = 0;
  double err_estimate = 0.0;  // |det(order) - det(order / 2)|
};

// Nystrom determinant det(delta_ij - sqrt(w_i) K(x_i, x_j) sqrt(w_j)) with
// Gauss-Legendre nodes on [lo, hi]; order >= 4. A non-finite kernel sample
// throws NumericalFailure naming the node pair.
GapResult fredholm_det(const KernelHandle& K, double lo, double hi, int order = 40);

// Doubles the order from `order` until err_estimate < tol or max_order.
GapResult fredholm_det_refined(const KernelHandle& K, double lo, double hi, int order = 40,
                               double tol = 1e-9, int max_order = 640);

// P[first particle <= xi] = 1 - det(I - K) on [0, xi] for each xi of an
// increasing grid in [0, inf). order = 0 refines each point as above.
// Throws NumericalFailure when the cdf drops by more than 1e-8.
std::vector<GapResult> first_particle_cdf(const KernelHandle& K, const std::vector<double>& xi_grid,
                                          int order = 0);

// Half-line limit kernels at spacing a: the sine kernel (free), and its odd
// (absorbing) and even (reflecting) combinations.
KernelHandle boundary_law_kernel(Boundary law, double a = 1.0);

// max_i |a_i.cdf - b_i.cdf| over matching grids
double cdf_sup_distance(const std::vector<GapResult>& a, const std::vector<GapResult>& b);

}  // namespace satk

#endif
