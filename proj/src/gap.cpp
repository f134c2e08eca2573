#include "satk/gap.hpp"

#include <cmath>
#include <sstream>

#include "satk/errors.hpp"
#include "satk/linalg.hpp"
#include "satk/quadrature.hpp"

namespace satk {

namespace {

double nystrom_det(const KernelHandle& K, double lo, double hi, int n) {
  const QuadRule q = gauss_legendre(n, lo, hi);
  std::vector<double> sw(n);
  for (int i = 0; i < n; ++i) sw[i] = std::sqrt(q.w[i]);
  std::vector<double> A(std::size_t(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double k = K(q.x[i], q.x[j]);
      if (!std::isfinite(k)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "fredholm_det: kernel not finite at (" << q.x[i] << ", " << q.x[j] << ")";
        throw NumericalFailure(msg.str(), k);
      }
      A[std::size_t(i) * n + j] = (i == j ? 1.0 : 0.0) - sw[i] * k * sw[j];
    }
  }
  return determinant(A, n);
}

}  // namespace

GapResult fredholm_det(const KernelHandle& K, double lo, double hi, int order) {
  if (order < 4) throw PreconditionError("fredholm_det: order must be >= 4");
  if (!(hi >= lo) || !std::isfinite(lo) || !std::isfinite(hi))
    throw PreconditionError("fredholm_det: need a finite interval lo <= hi");
  if (lo < K.lo || hi > K.hi) throw PreconditionError("fredholm_det: interval outside the kernel domain");
  GapResult r;
  r.xi = hi;
  r.order = order;
  if (hi > lo) {
    r.det_value = nystrom_det(K, lo, hi, order);
    r.err_estimate = std::abs(r.det_value - nystrom_det(K, lo, hi, order / 2));
  }
  r.cdf = 1.0 - r.det_value;
  return r;
}

GapResult fredholm_det_refined(const KernelHandle& K, double lo, double hi, int order, double tol,
                               int max_order) {
  GapResult r = fredholm_det(K, lo, hi, order);
  while (r.err_estimate >= tol && 2 * r.order <= max_order) {
    // the previous full-order value is the new half-order one
    const double prev = r.det_value;
    r.order *= 2;
    r.det_value = nystrom_det(K, lo, hi, r.order);
    r.err_estimate = std::abs(r.det_value - prev);
    r.cdf = 1.0 - r.det_value;
  }
  return r;
}

std::vector<GapResult> first_particle_cdf(const KernelHandle& K, const std::vector<double>& xi_grid,
                                          int order) {
  std::vector<GapResult> out;
  out.reserve(xi_grid.size());
  for (std::size_t i = 0; i < xi_grid.size(); ++i) {
    const double xi = xi_grid[i];
    if (!(xi >= 0.0) || (i > 0 && !(xi > xi_grid[i - 1])))
      throw PreconditionError("first_particle_cdf: grid must be increasing in [0, inf)");
    GapResult r = order > 0 ? fredholm_det(K, 0.0, xi, order) : fredholm_det_refined(K, 0.0, xi);
    if (!out.empty() && r.cdf < out.back().cdf - 1e-8) {
      std::ostringstream msg;
      msg << "first_particle_cdf: cdf decreases at xi = " << xi;
      throw NumericalFailure(msg.str(), out.back().cdf - r.cdf);
    }
    out.push_back(r);
  }
  return out;
}

KernelHandle boundary_law_kernel(Boundary law, double a) {
  KernelHandle s = sine_kernel(a);
  if (law != Boundary::free) return boundary_combine(s, law);
  s.lo = 0.0;
  return s;
}

double cdf_sup_distance(const std::vector<GapResult>& a, const std::vector<GapResult>& b) {
  if (a.size() != b.size()) throw PreconditionError("cdf_sup_distance: grids differ");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].xi != b[i].xi) throw PreconditionError("cdf_sup_distance: grids differ");
    m = std::max(m, std::abs(a[i].cdf - b[i].cdf));
  }
  return m;
}

}  // namespace satk
