#ifndef SATK_SPECFUN_HPP
#define SATK_SPECFUN_HPP

#include <complex>
#include <functional>
#include <utility>
#include <vector>

namespace satk {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kEulerGamma = 0.5772156649015329;

// Jacobi theta functions with quasi-period tau (Im tau > 0), convention
// theta_3(x;tau) = sum_n exp(i pi tau n^2 + 2 i pi n x).
struct ThetaArg {
  cplx x;
  cplx tau;
};

// Sum is cut once the next pair of terms falls below tol * (|partial| + 1).
// Throws std::domain_error for Im tau <= 0 or k outside 1..4.
cplx theta(int k, const ThetaArg& arg, double tol = 1e-17);
inline cplx theta(int k, cplx x, cplx tau, double tol = 1e-17) {
  return theta(k, ThetaArg{x, tau}, tol);
}

// d/dx theta_1 at x = 0, from the termwise derivative of the series.
cplx theta1_prime0(cplx tau, double tol = 1e-17);

// Sine and cosine integrals. Power series up to x = 4, auxiliary f/g beyond.
double sin_integral(double x);
double cos_integral(double x);  // x > 0, domain_error at 0

// Auxiliary integrals f(z) = int_0^inf sin t/(t+z) dt and
// g(z) = int_0^inf cos t/(t+z) dt for Re z > 0 or (Re z = 0, Im z != 0).
struct FG {
  cplx f;
  cplx g;
};
FG fg(cplx z);

// int_0^inf e^{it}/(t+z) dt, equal to g(z) + i f(z). For complex z the two
// parts are not its real and imaginary parts; fg() separates them.
cplx exp_integral_aux(cplx z);

// Complex exponential integral E1 on the cut plane.
cplx expint_e1(cplx w);

// Bessel J for nu in {-1/2, 1/2, 3/2} or nu a nonnegative integer.
double bessel_j(double nu, double x);

// Zeros c_1 < c_2 < ... of a genus-one canonical product. The stored prefix is
// used exactly; the tail beyond it is modelled from the counting function.
struct PointSequence {
  std::vector<double> values;
  double growth_exponent = 0.0;  // delta in n(t) <= C t^(1+delta)
  double growth_constant = 1.0;  // C
  // Optional counting density n'(t) used for the tail beyond the prefix.
  // Without it a power law matched at the last stored point is assumed.
  std::function<double(double)> density;

  // Throws std::invalid_argument if values are not positive and increasing or
  // the growth bound fails on the prefix.
  void validate() const;
  // Tail power sums sum_{j>J} c_j^{-k} for k = 2..kmax (index k-2).
  std::vector<double> tail_power_sums(int kmax) const;
  // Fills the cache read by the product functions; call after the last
  // change to values. Without it tails are recomputed on every call.
  void prepare();
  std::vector<double> tail_cache;
  // suffix power sums sum_{j >= split_index[b]} c_j^{-2k}, k = 1..kSplitOrder,
  // over the stored values; lets log_even_product skip the far points
  static constexpr int kSplitOrder = 30;
  std::vector<std::size_t> split_index;
  std::vector<std::vector<double>> split_sums;
};

struct ProductValue {
  cplx value;
  double err_estimate;  // magnitude of the first neglected tail order
};

// prod_j (1 - z/c_j) exp(z/c_j), exact 0 at a stored zero.
ProductValue canonical_product(const PointSequence& seq, cplx z);

// prod_j (1 - z^2/c_j^2) = P(z) P(-z), the even product with the same zeros.
ProductValue even_product(const PointSequence& seq, cplx z);

// log of even_product; real part log|F|, imaginary part an unwrapped phase.
// Returns -inf real part at a zero.
cplx log_even_product(const PointSequence& seq, cplx z);

}  // namespace satk

#endif
