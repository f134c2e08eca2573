#ifndef SATK_APPROX_HPP
#define SATK_APPROX_HPP

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "satk/contour.hpp"
#include "satk/kernels.hpp"
#include "satk/specfun.hpp"

namespace satk {

// Smooth increasing F with F(0) = F'(0) = 0; initial points are y_j = F^{-1}(j).
struct CountingFunction {
  std::string name;
  std::function<double(double)> F, F_prime, F_double_prime;
  double delta = 0.0;     // F(x) <= C x^(1+delta)
  double C_growth = 1.0;
  // Below this point F is a completion that only preserves F' > 0;
  // the F'' monotonicity is checked from here on.
  double knot = 0.0;

  // Samples [0, x_max] and throws ConfigurationError on a violated condition.
  void validate(double x_max = 1e8) const;

  // x^(1+delta), 0 < delta < 1 (delta = 1 accepted as a test stub)
  static CountingFunction power(double delta);
  // (x/2pi) log(x/2pi) - x/2pi, completed below y_1
  static CountingFunction zeta_counting();
  // 1 + int_{2pi e}^x sqrt(log(t/2pi)) dt, completed below 2pi e
  static CountingFunction unfolding();
  // "power:<delta>", "zeta-counting" or "unfolding"
  static CountingFunction from_name(const std::string& name);
};

// Root of F(y) = value; relative residual below 1e-12.
double inverse_F(const CountingFunction& cf, double value);
// y_j = F^{-1}(j), j >= 1.
double invert_F(const CountingFunction& cf, long j);

struct XiValue {
  double value = 0.0;
  double err = 0.0;
};

struct Location {
  long m = 0;
  double zeta = 0.0;
  double lambda = 0.0;
  double eta = 0.0;
  double xi = 0.0;
};

class GeneralConfiguration {
 public:
  explicit GeneralConfiguration(CountingFunction cf, long prefix_len = 20000);
  // Explicit positions, for stubs; F is used for the tail only.
  GeneralConfiguration(CountingFunction cf, std::vector<double> prefix);

  const CountingFunction& source() const { return cf_; }
  long prefix_len() const { return static_cast<long>(y_.size()); }
  // Signed index with y_{-j} = -y_j and y_0 = 0.
  double y(long j) const;
  double lambda(long m) const { return 1.0 / cf_.F_prime(y(m)); }
  double eta(long m) const { return cf_.F_double_prime(y(m)); }
  double zeta(long m, double S, long tail_len = 0) const;
  // Prefix plus density tail, ready for the infinite-N contour kernel.
  const PointSequence& sequence() const { return seq_; }

 private:
  CountingFunction cf_;
  std::vector<double> y_;
  PointSequence seq_;
};

// sum_j (1/c_j - 1/b_j), c_j = y_{m+j} - y_m, b_j = y_m - y_{m-j}, summed to
// tail_len and completed by an integral against F'. tail_len = 0 picks
// max(2000, 4m). err compares the tail estimates at tail_len/2 and tail_len.
XiValue xi_m(const GeneralConfiguration& config, long m, long tail_len = 0);

// m in [1, m_max] minimising |zeta_m - alpha|, ties to the smaller m.
// Throws PreconditionError when zeta is not locally increasing or
// |zeta_m - alpha| > lambda_m (the message names the nearest m).
Location locate_index(const std::function<double(long)>& zeta,
                      const std::function<double(long)>& lambda, double alpha,
                      long m_max);
Location locate_m(const GeneralConfiguration& config, double alpha, double S);

// Equidistant absorbing model with a = lambda(alpha), Delta = 0, plus the
// gauge rate xi(alpha) and shift zeta(alpha) used in comparisons.
struct Surrogate {
  EquidistantModel model;
  Location at;
  double S = 1.0;
  // lower end of the admissible S range read as lambda(alpha); used
  double S_min = 0.0;
  bool S_admissible = false;
  // the literal F'(F(alpha)) reading, reported only
  double S_min_literal = 0.0;
  bool S_admissible_literal = false;
};
Surrogate surrogate_model(const GeneralConfiguration& config, double alpha,
                          double S);

enum class Comparator { free_line, absorbing };

struct ComparisonReport {
  Surrogate surrogate;
  Comparator comparator = Comparator::free_line;
  double T = 0.0;
  double T0 = 0.0;
  std::vector<std::pair<double, double>> grid;
  std::vector<double> lhs;  // |e^{-xi(u-v)} K(y;u,v) - K(y~;u-zeta,v-zeta)|
  double max_lhs = 0.0;
  // lambda S^{-3/2} e^{-R^2/8S} + (T^2 + R^2) m^{-(1-delta)^2/(1+delta)} / S
  // with R^2 at the low end of its admissible interval (c0 = 1)
  double bound_shape = 0.0;
  double R2 = 0.0;
  double epsilon = 0.0;
};

// grid points must lie in [alpha - T, alpha + T]; T <= T0(alpha).
ComparisonReport compare_at_height(const GeneralConfiguration& config,
                                   double alpha, double S, double T,
                                   const std::vector<std::pair<double, double>>& grid,
                                   Comparator cmp = Comparator::free_line,
                                   const ContourSpec& spec = {},
                                   double epsilon = 0.05);

// Least-squares C in max_lhs ~ C * bound_shape over several reports.
double fit_bound_constant(const std::vector<ComparisonReport>& reports);

// sup over the (x, y) grid of
// |lambda e^{-xi lambda (x-y)} K(y; alpha + lambda x, alpha + lambda y) - sinc(x-y)|
double local_sine_distance(const GeneralConfiguration& config, double alpha,
                           double S, const std::vector<double>& points,
                           const ContourSpec& spec = {});

struct UnfoldedModel {
  double height = 0.0;
  double lambda = 0.0;        // 1/F'(height)
  double d = 0.0;             // 2 pi / lambda^2
  double lambda_origin = 0.0; // 1/F'(F^{-1}(height)), spacing before rescaling
  KernelHandle local;         // closed local form in the unfolded variable
  KernelHandle rescaled;      // equidistant kernel pushed through G = F^{-1}
};

// Unfolded model at height alpha >= 2 pi e for the "unfolding" F.
UnfoldedModel unfolded_model(double alpha);

}  // namespace satk

#endif
