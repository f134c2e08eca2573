#include "satk/variance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "satk/errors.hpp"
#include "satk/quadrature.hpp"
#include "satk/specfun.hpp"

namespace satk {

namespace {

constexpr double kPi2 = kPi * kPi;

void check_L(double L) {
  if (!(L > 0.0) || !std::isfinite(L)) throw PreconditionError("variance: L must be positive");
}

// (x / sinh x)^2 without overflow
double xsinh2(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 3.0;
  if (x > 350.0) return 0.0;
  const double r = x / std::sinh(x);
  return r * r;
}

double frac(double x) { return x - std::floor(x); }

// The part of the sine closed form shared with the averaged model:
// gamma + 1 - Ci(x) + x (pi/2 - Si(x)) - cos x, x = 2 pi L / a.
double sine_remainder(double x) {
  return kEulerGamma + 1.0 - cos_integral(x) + x * (kPi / 2.0 - sin_integral(x)) - std::cos(x);
}

}  // namespace

std::string to_string(VarianceMethod m) {
  switch (m) {
    case VarianceMethod::direct: return "direct";
    case VarianceMethod::leading_part: return "leading-part";
    case VarianceMethod::averaged: return "averaged";
    case VarianceMethod::vd_average: return "vd";
    case VarianceMethod::sine_closed: return "sine";
    case VarianceMethod::unitary: return "unitary";
  }
  return "?";
}

double default_cutoff(const EquidistantModel& m) { return std::max(50.0 * m.a, 20.0 * m.a * m.d()); }

VarianceReport variance_direct(const KernelHandle& K, double R, double L, double cutoff,
                               const DirectOptions& opt) {
  check_L(L);
  if (!(cutoff > 0.0)) throw PreconditionError("variance_direct: cutoff must be positive");
  if (R < K.lo || R + L > K.hi) throw PreconditionError("variance_direct: interval outside the kernel domain");
  const double lo = std::max(R - cutoff, K.lo);
  const double hi = std::min(R + L + cutoff, K.hi);
  const auto& f = K.evaluate;
  double inner_err = 0.0;
  auto inner = [&](double x) {
    auto g = [&](double y) { return f(x, y) * f(y, x); };
    double v = 0.0;
    // one panel per unit of the local spacing keeps the adaptive rule honest
    for (const auto& [p, q] : {std::pair{lo, R}, std::pair{R + L, hi}}) {
      if (!(q > p)) continue;
      const int n = std::max(1, int(std::ceil(q - p)));
      const double h = (q - p) / n;
      for (int k = 0; k < n; ++k) {
        const auto r = integrate(g, p + k * h, p + (k + 1) * h, opt.tol, 8, 1e-16);
        v += r.value;
        inner_err += r.err;
      }
    }
    return v;
  };
  double value = 0.0, outer_err = 0.0;
  const int n = std::max(1, int(std::ceil(L)));
  for (int k = 0; k < n; ++k) {
    const auto r = integrate(inner, R + k * L / n, R + (k + 1) * L / n, opt.tol, 8, 1e-15);
    value += r.value;
    outer_err += r.err;
  }
  // the dropped part of I^c: |x - y| > cutoff on each open side
  const bool left_open = R - cutoff > K.lo, right_open = R + L + cutoff < K.hi;
  const double open_sides = (left_open ? 1.0 : 0.0) + (right_open ? 1.0 : 0.0);
  // int_I dx int_{|x - y| > cutoff, one side} dy 1/(2 pi^2 (x-y)^2)
  const double mean_tail = open_sides / (2.0 * kPi2) * std::log((L + cutoff) / cutoff);
  VarianceReport rep;
  rep.R = R;
  rep.L = L;
  rep.method = VarianceMethod::direct;
  double tail_err;
  if (opt.tail == TailModel::mean_square) {
    value += mean_tail;
    // the oscillating remainder integrates to O(L / cutoff^2)
    tail_err = open_sides * L / (kPi2 * cutoff * cutoff) * std::max(1.0, L);
  } else {
    tail_err = mean_tail;
  }
  rep.value = value;
  rep.err_estimate = outer_err + tail_err + 1e-3 * inner_err / std::max(1.0, L);
  rep.tail_warning = tail_err > 0.1 * std::abs(value);
  return rep;
}

VarianceReport variance_sine_closed(double a, double L) {
  check_L(L);
  if (!(a > 0.0)) throw PreconditionError("variance_sine_closed: a must be positive");
  const double x = 2.0 * kPi * L / a;
  VarianceReport rep;
  rep.L = L;
  rep.method = VarianceMethod::sine_closed;
  if (x < 1e-3) {
    // L/a - (L/a)^2 + pi^2 (L/a)^4 / 18 from the series of the pair product
    const double t = L / a;
    rep.value = t - t * t + kPi2 * t * t * t * t / 18.0;
  } else {
    rep.value = (std::log(x) + sine_remainder(x)) / kPi2;
  }
  rep.err_estimate = 1e-14 * std::max(1.0, std::abs(rep.value));
  return rep;
}

VarianceReport variance_leading_part(const EquidistantModel& m, double R, double L,
                                     bool printed_last_block) {
  m.validate();
  check_L(L);
  if (m.boundary != Boundary::free || std::isfinite(m.T))
    throw PreconditionError("variance_leading_part: needs the free one-sided model");
  const double a = m.a, d = m.d();
  const double th = kPi * frac((R - m.Delta) / a);
  const double ph = kPi * frac(L / a);
  const double A = kPi * L / a;
  const double pd = kPi * d;
  const double c2 = std::cos(2 * (th + ph)) + std::cos(2 * th);
  const double s2 = std::sin(2 * (th + ph)) - std::sin(2 * th);
  const double s4 = std::sin(4 * (th + ph)) - std::sin(4 * th);
  const double c4 = std::cos(4 * (th + ph)) + std::cos(4 * th);
  const FG z = fg(cplx(2 * A, 2 * pd));
  const FG z0 = fg(cplx(0.0, 2 * pd));
  const double h1 = 2 * z.f.real(), h2 = 2 * z.f.imag();
  const double h3 = 2 * z.g.real();
  const double h3_0 = 2 * z0.g.real();
  const double Si = sin_integral(2 * A), Ci = cos_integral(2 * A);

  double v = (1.0 + c2 / pd) * (std::log(2 * kPi * A * d / std::hypot(A, pd)) + kEulerGamma - Ci) / kPi2;
  v += (1.0 + 2 * A * (kPi / 2 - Si) - std::cos(2 * A)) / kPi2;
  v += (c2 * (h3_0 - h3) + s2 * (h1 + kPi - 2 * Si)) / (2 * kPi2 * pd);
  if (printed_last_block) {
    const double h4 = 2 * z.g.imag();
    v += std::sin(2 * ph) / (8 * kPi2 * pd) * (h2 * s4 - h4 * c4);
  } else {
    // cos 2 pi (x+y) / (2 pi^2 (d^2 + r^2)) part of the pair product, reduced
    // to f at 2 i pi d and 2A + 2 i pi d
    const double h2_0 = 2 * z0.f.imag();
    v += (h2 * (c4 * std::cos(2 * ph) + s4 * std::sin(2 * ph)) - h2_0 * c4) / (8 * kPi2 * pd);
  }
  VarianceReport rep;
  rep.R = R;
  rep.L = L;
  rep.value = v;
  rep.method = VarianceMethod::leading_part;
  rep.err_estimate = 1e-12 * std::max(1.0, std::abs(v));
  return rep;
}

VarianceReport variance_averaged(const EquidistantModel& m, double L) {
  m.validate();
  check_L(L);
  const double a = m.a, d = m.d();
  const double x = 2 * kPi * L / a, t = L / a;
  VarianceReport rep;
  rep.L = L;
  rep.method = VarianceMethod::averaged;
  if (x < 1e-3) {
    // sine series plus the d-term 2 int_0^t x g + 2 t int_t^inf g, g the
    // second part of the averaged pair product: -(1/2pi^2) log(1 + t^2/d^2)
    rep.value = t - t * t + kPi2 * t * t * t * t / 18.0 - std::log1p(t * t / (d * d)) / (2 * kPi2);
  } else {
    // log(x d / sqrt(t^2 + d^2)) = log(2 pi t d / sqrt(t^2 + d^2))
    rep.value = (std::log(x * d / std::hypot(t, d)) + sine_remainder(x)) / kPi2;
  }
  rep.err_estimate = 1e-14 * std::max(1.0, std::abs(rep.value));
  return rep;
}

namespace {

// int_0^U w(u) sin^2(u) / u du and int_U^inf w(u) sin^2(u) / u^2 du with
// w(u) = (s / sinh s)^2, s = u / 2d; w is below 1e-18 past u = 50 d
double vd_first(double d, double U) {
  const double umax = std::min(U, 50.0 * d + 50.0);
  auto f = [d](double u) {
    if (u == 0.0) return 0.0;
    const double s = std::sin(u);
    return xsinh2(u / (2 * d)) * s * s / u;
  };
  return integrate_panels(f, 0.0, umax, kPi / 2, 20);
}

double vd_second(double d, double U) {
  const double umax = 50.0 * d + 50.0;
  if (U >= umax) return 0.0;
  auto f = [d](double u) {
    const double s = std::sin(u);
    return xsinh2(u / (2 * d)) * s * s / (u * u);
  };
  return integrate_panels(f, U, umax, kPi / 2, 20);
}

// int_0^inf min(u, c) / cosh^2 u du = c - log cosh c
double vd_third(double c) { return std::log(2.0) - std::log1p(std::exp(-2 * c)); }

}  // namespace

VarianceReport variance_Vd(const EquidistantModel& m, double L) {
  m.validate();
  check_L(L);
  if (!(m.T == m.S)) throw PreconditionError("variance_Vd: needs the (S,S) model");
  const double a = m.a, d = m.d();
  const double U = kPi * L / a;
  VarianceReport rep;
  rep.L = L;
  rep.method = VarianceMethod::vd_average;
  rep.value = 2.0 / kPi2 * vd_first(d, U) + 2.0 * L / (kPi * a) * vd_second(d, U) +
              vd_third(kPi * L / (2 * a * d)) / kPi2;
  rep.err_estimate = 1e-11 * std::max(1.0, rep.value);
  return rep;
}

double variance_Vd_limit(double d) {
  if (!(d > 0.0)) throw PreconditionError("variance_Vd_limit: d must be positive");
  return (2.0 * vd_first(d, INFINITY) + std::log(2.0)) / kPi2;
}

VarianceReport variance_Un(int n, double arc) {
  if (n < 1) throw PreconditionError("variance_Un: n must be >= 1");
  if (!(arc >= 0.0 && arc <= 2 * kPi)) throw std::domain_error("variance_Un: arc outside [0, 2 pi]");
  double s = 0.0;
  for (int k = 1; k < n; ++k) {
    const double sn = std::sin(k * arc / 2);
    s += double(n - k) / (double(k) * k) * sn * sn;
  }
  VarianceReport rep;
  rep.L = arc;
  rep.method = VarianceMethod::unitary;
  rep.value = n * arc / (2 * kPi) - n * arc * arc / (4 * kPi2) - 2.0 / kPi2 * s;
  rep.err_estimate = 1e-15 * n;
  return rep;
}

double saturation_level(double d) {
  if (!(d > 0.0)) throw PreconditionError("saturation_level: d must be positive");
  return (std::log(2 * kPi * d) + kEulerGamma + 1.0) / kPi2;
}

double saturation_level(const EquidistantModel& m) {
  m.validate();
  return saturation_level(m.d());
}

double d_from_saturation_level(double level) {
  return std::exp(kPi2 * level - kEulerGamma - 1.0) / (2 * kPi);
}

double translation_invariant_variance(const std::function<double(double)>& f, double L,
                                      double scale) {
  check_L(L);
  // oscillation period ~ scale; beyond X the remainder is O(1/X^2) for the
  // sine-class products and exponentially small for the (S,S) ones
  const double X = L + 4000.0 * scale;
  const double w = scale / 2;
  auto xf = [&](double x) { return x * f(x); };
  return 2.0 * integrate_panels(xf, 0.0, L, w, 20) + 2.0 * L * integrate_panels(f, L, X, w, 20);
}

}  // namespace satk
