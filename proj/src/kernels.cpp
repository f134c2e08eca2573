#include "satk/kernels.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "satk/specfun.hpp"

namespace satk {

namespace {

// sin t / t, 5th order Taylor near 0
double sinc(double t) {
  if (std::abs(t) < 3e-4) {
    const double t2 = t * t;
    return 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
  }
  return std::sin(t) / t;
}

// s / sinh s
double x_over_sinh(double s) {
  if (std::abs(s) < 3e-4) {
    const double s2 = s * s;
    return 1.0 - s2 / 6.0 + 7.0 * s2 * s2 / 360.0;
  }
  return s / std::sinh(s);
}

void check_tol(double tol) {
  if (!(tol > 0.0)) throw std::domain_error("kernel tolerance must be positive");
}

struct LssConstants {
  double pref;     // 1 / (d theta_2(0;id)^2 sqrt(theta_3 theta_4))
  double t1p;      // theta_1'(0; 2id)
};

LssConstants lss_constants(double d, double tol) {
  const cplx I(0.0, 1.0);
  const cplx t2 = theta(2, 0.0, I * d, tol), t3 = theta(3, 0.0, I * d, tol),
             t4 = theta(4, 0.0, I * d, tol);
  LssConstants c;
  c.pref = 1.0 / (d * (t2 * t2).real() * std::sqrt((t3 * t4).real()));
  c.t1p = theta1_prime0(I * (2.0 * d), tol).real();
  return c;
}

double lss_eval(const LssConstants& c, double d, double u, double v,
                double tol) {
  const cplx tau(0.0, 2.0 * d);
  const double s = u + v, r = u - v;
  const double arg = kPi * r / (2.0 * d);
  double first;
  if (r == 0.0) {
    first = theta(3, s, tau, tol).real() * c.t1p * 2.0 * d / kPi;
  } else {
    first = theta(3, s, tau, tol).real() * theta(1, r, tau, tol).real() /
            std::sinh(arg);
  }
  const double second = theta(2, s, tau, tol).real() *
                        theta(4, r, tau, tol).real() / std::cosh(arg);
  return c.pref * (first + second);
}

}  // namespace

Boundary parse_boundary(const std::string& s) {
  if (s == "free") return Boundary::free;
  if (s == "absorbing") return Boundary::absorbing;
  if (s == "reflecting") return Boundary::reflecting;
  throw std::invalid_argument("unknown boundary '" + s + "'");
}

std::string to_string(Boundary b) {
  switch (b) {
    case Boundary::free: return "free";
    case Boundary::absorbing: return "absorbing";
    case Boundary::reflecting: return "reflecting";
  }
  return "?";
}

double EquidistantModel::d() const { return 2.0 * kPi * S / (a * a); }

void EquidistantModel::validate() const {
  if (!(a > 0.0)) throw std::invalid_argument("model: a must be positive");
  if (!(S > 0.0)) throw std::invalid_argument("model: S must be positive");
  if (!(Delta >= 0.0 && Delta < a))
    throw std::invalid_argument("model: Delta must lie in [0, a)");
  if (!(T > 0.0)) throw std::invalid_argument("model: T must be positive");
  if (std::isfinite(T) && T != S)
    throw std::invalid_argument("model: finite T is only supported for T = S");
}

EquidistantModel EquidistantModel::from_d(double d, double a) {
  EquidistantModel m;
  m.a = a;
  m.S = d * a * a / (2.0 * kPi);
  return m;
}

double ls_series(double d, double x, double y, double tol) {
  check_tol(tol);
  const double r = y - x;
  // n = 0 and n = 1
  double sum = sinc(kPi * r);
  sum += (d * std::cos(kPi * (x + y)) + r * std::sin(kPi * (x + y))) /
         (kPi * (d * d + r * r));
  // pair n = k+1 with n = -k; both carry exp(-pi d k(k+1))
  for (int k = 1; k < 1000; ++k) {
    const double w = std::exp(-kPi * d * double(k) * double(k + 1));
    if (w < tol) break;
    double pair = 0.0;
    for (int n : {k + 1, -k}) {
      const std::complex<double> num =
          std::polar(1.0, kPi * (y + (2.0 * n - 1.0) * x));
      const std::complex<double> den(n * d, r);
      pair += (num / den).real();
    }
    sum += w * pair / kPi;
  }
  return sum;
}

double ls_approx(double d, double x, double y) {
  const double r = y - x;
  return sinc(kPi * r) +
         (d * std::cos(kPi * (x + y)) + r * std::sin(kPi * (x + y))) /
             (kPi * (d * d + r * r));
}

double lss_theta(double d, double u, double v, double tol) {
  check_tol(tol);
  return lss_eval(lss_constants(d, tol), d, u, v, tol);
}

double lss_approx(double d, double u, double v) {
  const double r = u - v;
  const double s = kPi * r / (2.0 * d);
  return sinc(kPi * r) * x_over_sinh(s) +
         std::cos(kPi * (u + v)) / (2.0 * d * std::cosh(s));
}

KernelHandle sine_kernel(double a) {
  if (!(a > 0.0)) throw std::invalid_argument("sine_kernel: a must be positive");
  KernelHandle h;
  h.evaluate = [a](double x, double y) { return sinc(kPi * (x - y) / a) / a; };
  h.symmetric = true;
  h.representation = Representation::closed_form;
  return h;
}

KernelHandle kernel_LS(const EquidistantModel& m, double tol) {
  m.validate();
  check_tol(tol);
  const double a = m.a, D = m.Delta, d = m.d();
  KernelHandle h;
  h.evaluate = [a, D, d, tol](double u, double v) {
    return ls_series(d, (u - D) / a, (v - D) / a, tol) / a;
  };
  h.representation = Representation::series;
  h.symmetric = false;
  return h;
}

KernelHandle kernel_LS_approx(const EquidistantModel& m) {
  m.validate();
  const double a = m.a, D = m.Delta, d = m.d();
  KernelHandle h;
  h.evaluate = [a, D, d](double u, double v) {
    return ls_approx(d, (u - D) / a, (v - D) / a) / a;
  };
  h.representation = Representation::approximate;
  h.symmetric = false;
  return h;
}

KernelHandle kernel_LSS(const EquidistantModel& m, double tol) {
  m.validate();
  check_tol(tol);
  const double a = m.a, D = m.Delta, d = m.d();
  const LssConstants c = lss_constants(d, tol);
  KernelHandle h;
  h.evaluate = [a, D, d, tol, c](double u, double v) {
    return lss_eval(c, d, (u - D) / a, (v - D) / a, tol) / a;
  };
  h.representation = Representation::theta;
  h.symmetric = true;
  return h;
}

KernelHandle kernel_LSS_approx(const EquidistantModel& m) {
  m.validate();
  const double a = m.a, D = m.Delta, d = m.d();
  KernelHandle h;
  h.evaluate = [a, D, d](double u, double v) {
    return lss_approx(d, (u - D) / a, (v - D) / a) / a;
  };
  h.representation = Representation::approximate;
  h.symmetric = true;
  return h;
}

KernelHandle boundary_combine(const KernelHandle& base, Boundary mode) {
  if (mode == Boundary::free) return base;
  if (std::isfinite(base.lo))
    throw std::invalid_argument("boundary_combine: base must live on the line");
  const double sign = (mode == Boundary::absorbing) ? -1.0 : 1.0;
  KernelHandle h;
  auto f = base.evaluate;
  h.evaluate = [f, sign](double u, double v) { return f(u, v) + sign * f(-u, v); };
  h.lo = 0.0;
  h.representation = Representation::composite;
  h.symmetric = base.symmetric;
  return h;
}

KernelHandle equidistant_kernel(const EquidistantModel& m, bool approximate) {
  m.validate();
  EquidistantModel free_m = m;
  free_m.boundary = Boundary::free;
  KernelHandle base;
  if (std::isinf(m.T))
    base = approximate ? kernel_LS_approx(free_m) : kernel_LS(free_m);
  else
    base = approximate ? kernel_LSS_approx(free_m) : kernel_LSS(free_m);
  return boundary_combine(base, m.boundary);
}

double averaged_pair_product(const EquidistantModel& m, PairFamily which,
                             double r) {
  const double a = m.a, d = m.d();
  const double x = r / a;
  const double s = sinc(kPi * x);
  if (which == PairFamily::LS) {
    const double q = d * d + x * x;
    return (s * s + (d * d - x * x) / (2.0 * kPi * kPi * q * q)) / (a * a);
  }
  const double t = kPi * x / (2.0 * d);
  const double ch = std::cosh(t);
  const double ratio = s * x_over_sinh(t);
  return (ratio * ratio + 1.0 / (8.0 * d * d * ch * ch)) / (a * a);
}

double bessel_kernel(double nu, double x, double y) {
  if (!(nu == 0.5 || nu == -0.5 || nu == 0.0 || nu == 1.0 || nu == 2.0))
    throw std::domain_error("bessel_kernel: nu must be one of -1/2, 1/2, 0, 1, 2");
  if (!(x > 0.0 && y > 0.0))
    throw std::domain_error("bessel_kernel: arguments must be positive");
  auto diag = [nu](double s) {
    const double t = std::sqrt(s);
    const double jn = bessel_j(nu, t), jp = bessel_j(nu + 1.0, t);
    const double jm = 2.0 * nu / t * jn - jp;  // J_{nu-1} by recurrence
    return 0.25 * (jn * jn - jp * jm);
  };
  auto direct = [nu](double x, double y) {
    const double sx = std::sqrt(x), sy = std::sqrt(y);
    return (sx * bessel_j(nu + 1.0, sx) * bessel_j(nu, sy) -
            bessel_j(nu, sx) * sy * bessel_j(nu + 1.0, sy)) /
           (2.0 * (x - y));
  };
  const double scale = std::max(1.0, std::max(x, y));
  const double t0 = 1e-4 * scale;
  const double t = x - y;
  if (std::abs(t) >= t0) return direct(x, y);
  // symmetric kernel: quadratic in t about the midpoint
  const double m = 0.5 * (x + y);
  const double b0 = diag(m);
  if (t == 0.0) return b0;
  const double bt = direct(m + 0.5 * t0, m - 0.5 * t0);
  return b0 + (t / t0) * (t / t0) * (bt - b0);
}

double rescaled_bessel(double nu, double x, double y) {
  const double tiny = 1e-150;
  x = std::max(x, tiny);
  y = std::max(y, tiny);
  const double p2 = kPi * kPi;
  return 2.0 * p2 * std::sqrt(x * y) * bessel_kernel(nu, p2 * x * x, p2 * y * y);
}

KernelHandle bessel_handle(double nu) {
  (void)bessel_kernel(nu, 1.0, 2.0);  // validates nu
  KernelHandle h;
  h.evaluate = [nu](double x, double y) { return rescaled_bessel(nu, x, y); };
  h.lo = 0.0;
  h.symmetric = true;
  h.representation = Representation::closed_form;
  return h;
}

KernelHandle rescale(const KernelHandle& base, std::function<double(double)> G,
                     std::function<double(double)> G_prime) {
  KernelHandle h;
  auto f = base.evaluate;
  h.evaluate = [f, G, G_prime](double x, double y) {
    const double gx = G_prime(x), gy = G_prime(y);
    if (!(gx > 0.0) || !(gy > 0.0))
      throw std::domain_error("rescale: G' must be positive");
    return f(G(x), G(y)) * std::sqrt(gx * gy);
  };
  h.lo = base.lo;
  h.hi = base.hi;
  h.representation = Representation::composite;
  h.symmetric = base.symmetric;
  return h;
}

}  // namespace satk
