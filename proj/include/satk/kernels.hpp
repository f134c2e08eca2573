#ifndef SATK_KERNELS_HPP
#define SATK_KERNELS_HPP

#include <functional>
#include <limits>
#include <string>

namespace satk {

enum class Boundary { free, absorbing, reflecting };
enum class Representation { closed_form, series, theta, approximate, contour, composite };

Boundary parse_boundary(const std::string& s);
std::string to_string(Boundary b);

// Equidistant initial points a(j - n) + Delta; T = S selects the (S,S) model,
// T = inf the one-sided limit.
struct EquidistantModel {
  double a = 1.0;
  double S = 1.0;
  double Delta = 0.0;
  Boundary boundary = Boundary::free;
  double T = std::numeric_limits<double>::infinity();

  double d() const;  // 2 pi S / a^2
  void validate() const;
  // model with a given d at spacing a
  static EquidistantModel from_d(double d, double a = 1.0);
};

struct KernelHandle {
  std::function<double(double, double)> evaluate;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  Representation representation = Representation::closed_form;
  bool symmetric = false;

  double operator()(double x, double y) const { return evaluate(x, y); }
};

// Raw kernels in units a = 1.
double ls_series(double d, double x, double y, double tol = 1e-17);
double ls_approx(double d, double x, double y);
double lss_theta(double d, double u, double v, double tol = 1e-17);
double lss_approx(double d, double u, double v);

KernelHandle sine_kernel(double a);
KernelHandle kernel_LS(const EquidistantModel& m, double tol = 1e-17);
KernelHandle kernel_LS_approx(const EquidistantModel& m);
KernelHandle kernel_LSS(const EquidistantModel& m, double tol = 1e-17);
KernelHandle kernel_LSS_approx(const EquidistantModel& m);

// base(u,v) - base(-u,v) (absorbing) or + (reflecting) on [0, inf).
KernelHandle boundary_combine(const KernelHandle& base, Boundary mode);

// Free kernel for the model's T (LS for T = inf, LSS for T = S), optionally
// the leading-part approximation, combined with the model's boundary.
KernelHandle equidistant_kernel(const EquidistantModel& m, bool approximate);

enum class PairFamily { LS, LSS };
// Delta-averaged K(x,y)K(y,x) as a function of r = x - y.
double averaged_pair_product(const EquidistantModel& m, PairFamily which, double r);

// B_nu(x,y) with the confluent limit on the diagonal.
double bessel_kernel(double nu, double x, double y);
// sqrt(2 pi^2 x 2 pi^2 y) B_nu(pi^2 x^2, pi^2 y^2)
double rescaled_bessel(double nu, double x, double y);
KernelHandle bessel_handle(double nu);

// base(G(x), G(y)) sqrt(G'(x) G'(y)); throws domain_error on G' <= 0.
KernelHandle rescale(const KernelHandle& base, std::function<double(double)> G,
                     std::function<double(double)> G_prime);

}  // namespace satk

#endif
