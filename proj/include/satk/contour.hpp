#ifndef SATK_CONTOUR_HPP
#define SATK_CONTOUR_HPP

#include <cmath>
#include <limits>
#include <vector>

#include "satk/kernels.hpp"
#include "satk/specfun.hpp"

namespace satk {

// Contour and quadrature settings. Zero / NaN fields are chosen automatically.
struct ContourSpec {
  double L_offset = std::numeric_limits<double>::quiet_NaN();  // Gamma_L abscissa
  double M = 0.0;          // half-height of the gamma_M lines
  double trunc = 0.0;      // |Im w| cutoff on Gamma_L; 0 = stop when negligible
  int nodes_per_unit = 0;  // trapezoid nodes per unit of Im w on Gamma_L
  double gap = 0.0;        // distance Gamma_L to gamma, >= 0.1 a (default 0.5 a)
  bool refine = false;     // repeat at twice the density, err = |delta|
};

struct FiniteModel {
  std::vector<double> y;  // initial points, increasing
  double a = 1.0;         // final point spacing z_j = a(j - n)
  double S = 1.0;
  double T = std::numeric_limits<double>::infinity();
  Boundary boundary = Boundary::free;

  int N() const { return static_cast<int>(y.size()); }
  void validate() const;
  // y_k = Delta + a k, k = -n..n (free) or y_k = a k, k = 1..N (boundary)
  static FiniteModel equidistant(int N, double a, double S, double T = INFINITY,
                                 Boundary b = Boundary::free, double Delta = 0.0);
};

struct ContourResult {
  double value = 0.0;
  double err = 0.0;   // last refinement delta when spec.refine, else 0
  double imag = 0.0;  // imaginary residue of the complex quadrature
};

// Finite S, T, free boundary: double contour form and its residue sum.
ContourResult kernel_finite_ST(const FiniteModel& m, const ContourSpec& spec,
                               double u, double v);
ContourResult kernel_finite_ST_residue(const FiniteModel& m,
                                       const ContourSpec& spec, double u,
                                       double v);

// T = infinity, free boundary, Lagrange residue form (any increasing y).
ContourResult kernel_finite_free(const FiniteModel& m, const ContourSpec& spec,
                                 double u, double v);

// T = infinity, absorbing or reflecting: double contour and residue forms.
ContourResult kernel_finite_boundary(const FiniteModel& m,
                                     const ContourSpec& spec, double u,
                                     double v);
ContourResult kernel_finite_boundary_residue(const FiniteModel& m,
                                             const ContourSpec& spec, double u,
                                             double v);

// Infinite-N absorbing kernel for initial points seq (sum 1/y_j^2 finite).
ContourResult kernel_infinite_absorbing(const PointSequence& seq, double S,
                                        const ContourSpec& spec, double u,
                                        double v);
// One-sided part K*(u,v); the absorbing kernel is K*(u,v) - K*(-u,v).
ContourResult infinite_star(const PointSequence& seq, double S,
                            const ContourSpec& spec, double u, double v);

// (1/2 pi i) int_{L-iM}^{L+iM} exp((w-v)^2/2S - (w-u)^2/2S) dw in closed form.
double segment_integral(double S, double L, double M, double u, double v);

// Handles for the grid/variance engines (residue forms for finite N).
KernelHandle finite_kernel_handle(const FiniteModel& m, const ContourSpec& spec = {});
KernelHandle infinite_absorbing_handle(const PointSequence& seq, double S,
                                       const ContourSpec& spec = {});

}  // namespace satk

#endif
