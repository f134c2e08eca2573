#ifndef SATK_VARIANCE_HPP
#define SATK_VARIANCE_HPP

#include <string>

#include "satk/kernels.hpp"

namespace satk {

enum class VarianceMethod { direct, leading_part, averaged, vd_average, sine_closed, unitary };
std::string to_string(VarianceMethod m);

struct VarianceReport {
  double R = 0.0;
  double L = 0.0;
  double value = 0.0;
  double err_estimate = 0.0;
  VarianceMethod method = VarianceMethod::direct;
  // set by the direct engine when the tail bound exceeds 10% of the value
  bool tail_warning = false;
};

// How the part of I^c beyond the cutoff is treated.
enum class TailModel {
  bound_only,   // dropped; its size goes into err_estimate
  mean_square,  // adds the averaged 1/(2 pi^2 r^2) decay of sine-class kernels
};

struct DirectOptions {
  TailModel tail = TailModel::bound_only;
  double tol = 1e-10;  // relative tolerance of both quadrature levels
};

// int_I dx int_{I^c} dy K(x,y) K(y,x) for I = [R, R+L], with I^c cut to
// [R - cutoff, R) u (R+L, R+L+cutoff] and to the kernel's domain.
VarianceReport variance_direct(const KernelHandle& K, double R, double L, double cutoff,
                               const DirectOptions& opt = {});
// max(50 a, 20 a d)
double default_cutoff(const EquidistantModel& m);

// Sine kernel with density 1/a on [0, L].
VarianceReport variance_sine_closed(double a, double L);

// Leading-part variance of the free LS model on [R, R+L] in closed form,
// through f and g at 2A + 2 i pi d and 2 i pi d; theta from the offset of R
// against the lattice a j + Delta. printed_last_block selects the
// alternative sin(2 phi) {h2 s4 - h4 c4} last block, which misses the
// f(2 i pi d) term (an O(1/d^2) error); kept for comparison only.
VarianceReport variance_leading_part(const EquidistantModel& m, double R, double L,
                                     bool printed_last_block = false);

// Delta-averaged leading-part variance of the free LS model.
VarianceReport variance_averaged(const EquidistantModel& m, double L);

// Averaged (S,S) variance V_d(L) from its three-integral form.
VarianceReport variance_Vd(const EquidistantModel& m, double L);
// lim_{L -> inf} V_d(L)
double variance_Vd_limit(double d);

// Haar unitary U(n), arc of length arc in [0, 2 pi].
VarianceReport variance_Un(int n, double arc);

// (1/pi^2)(log(2 pi d) + gamma + 1)
double saturation_level(const EquidistantModel& m);
double saturation_level(double d);
// d with saturation_level(d) = level
double d_from_saturation_level(double level);

// 2 int_0^L x f(x) dx + 2 L int_L^inf f(x) dx for an even pair product f.
double translation_invariant_variance(const std::function<double(double)>& f, double L,
                                      double scale);

}  // namespace satk

#endif
