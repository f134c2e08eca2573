#include "satk/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "satk/quadrature.hpp"

namespace satk {

namespace {

const cplx I(0.0, 1.0);

int theta_min_terms(double im_tau, double im_x, double tol) {
  double n = std::sqrt(-std::log(tol) / (kPi * im_tau));
  return static_cast<int>(std::ceil(n + std::abs(im_x) / im_tau)) + 2;
}

// log(1 - x) + x without cancellation for small |x|.
cplx log1m_plus(cplx x) {
  if (std::abs(x) < 0.05) {
    cplx s = 0.0, p = x;
    for (int k = 2; k < 40; ++k) {
      p *= x;
      cplx t = p / double(k);
      s -= t;
      if (std::abs(t) < 1e-18 * (std::abs(s) + 1e-300)) break;
    }
    return s;
  }
  return std::log(1.0 - x) + x;
}

// log(1 - x) for small |x| through the same series.
cplx log1m(cplx x) {
  if (std::abs(x) < 0.05) return log1m_plus(x) - x;
  return std::log(1.0 - x);
}

// e^w E1(w) = 1/(w+1- 1/(w+3- 4/(w+5- ...))), modified Lentz.
cplx e1_scaled_cf(cplx w) {
  const double tiny = 1e-300;
  cplx b = w + 1.0;
  cplx c = 1.0 / tiny;
  cplx d = 1.0 / b;
  cplx h = d;
  for (int i = 1; i < 200000; ++i) {
    const double an = -double(i) * double(i);
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    const cplx del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) return h;
  }
  throw std::runtime_error("E1 continued fraction did not converge");
}

// e^w E1(w) near the negative real axis, where the fraction stalls. The power
// series has no cancellation there; beyond |w| = 40 the asymptotic series is
// used (the Stokes term is below e^{-40}).
cplx e1_scaled_near_cut(cplx w) {
  const double r = std::abs(w);
  if (r < 40.0) {
    cplx s = 0.0, t = 1.0;
    for (int k = 1; k < 400; ++k) {
      t *= -w / double(k);
      const cplx term = t / double(k);
      s += term;
      if (std::abs(term) < 1e-17 * std::abs(s)) break;
    }
    return std::exp(w) * (-kEulerGamma - std::log(w) - s);
  }
  cplx s = 0.0, t = 1.0 / w;
  for (int k = 1; k < 80; ++k) {
    s += t;
    const cplx next = -t * double(k) / w;
    if (std::abs(next) > std::abs(t) || std::abs(next) < 1e-18 * std::abs(s)) break;
    t = next;
  }
  return s;
}

cplx e1_scaled(cplx w) {
  if (w.real() < 0.0 && std::abs(w.imag()) < 0.5 * -w.real()) return e1_scaled_near_cut(w);
  return e1_scaled_cf(w);
}

}  // namespace

cplx theta(int k, const ThetaArg& arg, double tol) {
  if (k < 1 || k > 4)
    throw std::domain_error("theta: index must be 1..4, got " +
                            std::to_string(k));
  const double im_tau = arg.tau.imag();
  if (!(im_tau > 0.0))
    throw std::domain_error("theta: Im(tau) must be positive");
  const cplx x = arg.x, tau = arg.tau;
  const int nmin = theta_min_terms(im_tau, x.imag(), tol);
  const int nmax = nmin + 10000;
  cplx sum = (k >= 3) ? cplx(1.0) : cplx(0.0);
  for (int n = (k >= 3 ? 1 : 0); n < nmax; ++n) {
    cplx term;
    if (k <= 2) {
      const double h = n + 0.5;
      const cplx q = std::exp(I * kPi * tau * (h * h));
      const cplx ang = (2.0 * n + 1.0) * kPi * x;
      term = (k == 1) ? ((n % 2) ? -2.0 : 2.0) * q * std::sin(ang)
                      : 2.0 * q * std::cos(ang);
    } else {
      const cplx q = std::exp(I * kPi * tau * double(n) * double(n));
      term = 2.0 * q * std::cos(2.0 * n * kPi * x);
      if (k == 4 && (n % 2)) term = -term;
    }
    sum += term;
    if (n >= nmin && std::abs(term) < tol * (std::abs(sum) + 1.0)) break;
  }
  return sum;
}

cplx theta1_prime0(cplx tau, double tol) {
  if (!(tau.imag() > 0.0))
    throw std::domain_error("theta1_prime0: Im(tau) must be positive");
  const int nmin = theta_min_terms(tau.imag(), 0.0, tol);
  cplx sum = 0.0;
  for (int n = 0; n < nmin + 10000; ++n) {
    const double h = n + 0.5;
    cplx term = 2.0 * (2.0 * n + 1.0) * kPi * std::exp(I * kPi * tau * (h * h));
    if (n % 2) term = -term;
    sum += term;
    if (n >= nmin && std::abs(term) < tol * (std::abs(sum) + 1.0)) break;
  }
  return sum;
}

cplx expint_e1(cplx w) {
  const double r = std::abs(w);
  if (r == 0.0) throw std::domain_error("expint_e1: singular at 0");
  if (r < 4.0) {
    // E1(w) = -gamma - log w - sum_{k>=1} (-w)^k / (k k!)
    cplx s = 0.0, t = 1.0;
    for (int k = 1; k < 200; ++k) {
      t *= -w / double(k);
      cplx term = t / double(k);
      s += term;
      if (std::abs(term) < 1e-17 * std::abs(s)) break;
    }
    return -kEulerGamma - std::log(w) - s;
  }
  return e1_scaled(w) * std::exp(-w);
}

cplx exp_integral_aux(cplx z) {
  if (z.real() < 0.0 || (z.real() == 0.0 && z.imag() == 0.0))
    throw std::domain_error("fg: argument outside Re z > 0 or imaginary axis");
  // w = -i z, built componentwise to keep the sign of zero imaginary parts.
  const cplx w(z.imag(), -z.real());
  if (std::abs(w) < 4.0) {
    return std::exp(-I * z) * expint_e1(w);
  }
  // e^{-iz} E1(-iz) = e^{w} E1(w)
  return e1_scaled(w);
}

namespace {

// e^{-y} Ei(y), y > 0: positive series below 40, asymptotic above
double ei_scaled(double y) {
  if (y < 40.0) {
    double s = 0.0, t = 1.0;
    for (int k = 1; k < 400; ++k) {
      t *= y / k;
      s += t / k;
      if (t / k < 1e-17 * s) break;
    }
    return std::exp(-y) * (kEulerGamma + std::log(y) + s);
  }
  double s = 1.0, t = 1.0;
  for (int k = 1; k < 40; ++k) {
    const double nt = t * k / y;
    if (nt > t) break;
    t = nt;
    s += t;
  }
  return s / y;
}

// z = iy, y > 0. The continued fraction for e^w E1(w) stalls on the cut
// that -i conj(z) lands on, so use the real Laplace-type closed forms.
FG fg_imaginary(double y) {
  const double em = std::exp(-y);
  const double eEi = ei_scaled(y);  // e^{-y} Ei(y)
  const double eE1 = y < 4.0 ? std::exp(y) * expint_e1(cplx(y, 0.0)).real()
                             : e1_scaled_cf(cplx(y, 0.0)).real();  // e^{y} E1(y)
  const cplx f(0.5 * kPi * em, -0.5 * (eEi + eE1));
  const cplx g(-0.5 * (eEi - eE1), -0.5 * kPi * em);
  return FG{f, g};
}

}  // namespace

FG fg(cplx z) {
  if (z.real() < 0.0 || (z.real() == 0.0 && z.imag() == 0.0))
    throw std::domain_error("fg: argument outside Re z > 0 or imaginary axis");
  if (z.real() == 0.0) {
    if (z.imag() > 0.0) return fg_imaginary(z.imag());
    const FG r = fg_imaginary(-z.imag());
    return FG{std::conj(r.f), std::conj(r.g)};
  }
  const cplx ip = exp_integral_aux(z);             // g + i f
  const cplx im = std::conj(exp_integral_aux(std::conj(z)));  // g - i f
  return FG{(ip - im) / (2.0 * I), 0.5 * (ip + im)};
}

double sin_integral(double x) {
  if (x < 0.0) return -sin_integral(-x);
  if (x == 0.0) return 0.0;
  if (x <= 4.0) {
    double s = 0.0, t = x;  // t = (-1)^k x^{2k+1}/(2k+1)!
    for (int k = 0; k < 60; ++k) {
      const double term = t / (2.0 * k + 1.0);
      s += term;
      if (std::abs(term) < 1e-18 * std::abs(s)) break;
      t *= -x * x / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
    }
    return s;
  }
  const cplx a = exp_integral_aux(cplx(x, 0.0));
  const double f = a.imag(), g = a.real();
  return 0.5 * kPi - f * std::cos(x) - g * std::sin(x);
}

double cos_integral(double x) {
  if (!(x > 0.0))
    throw std::domain_error("cos_integral: argument must be positive");
  if (x <= 4.0) {
    double s = 0.0, t = 1.0;  // t = (-1)^k x^{2k}/(2k)!
    for (int k = 1; k < 60; ++k) {
      t *= -x * x / ((2.0 * k - 1.0) * (2.0 * k));
      const double term = t / (2.0 * k);
      s += term;
      if (std::abs(term) < 1e-18 * (std::abs(s) + 1e-300)) break;
    }
    return kEulerGamma + std::log(x) + s;
  }
  const cplx a = exp_integral_aux(cplx(x, 0.0));
  const double f = a.imag(), g = a.real();
  return f * std::sin(x) - g * std::cos(x);
}

namespace {

double bessel_j_int(int n, double x) {
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;
  if (x < 12.0) {
    const double h = 0.5 * x;
    double t = 1.0;
    for (int k = 1; k <= n; ++k) t *= h / k;
    double s = t;
    for (int k = 1; k < 200; ++k) {
      t *= -h * h / (double(k) * double(k + n));
      s += t;
      if (std::abs(t) < 1e-18 * std::abs(s) && k > h) break;
    }
    return s;
  }
  // Hankel expansion, summed until the terms stop decreasing.
  const double mu = 4.0 * n * n;
  double p = 0.0, q = 0.0;
  double term = 1.0, last = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 200; ++k) {
    if (k > 0) term *= (mu - (2.0 * k - 1) * (2.0 * k - 1)) / (k * 8.0 * x);
    if (std::abs(term) > last) break;
    last = std::abs(term);
    const int r = k % 4;
    if (r == 0) p += term;
    else if (r == 1) q += term;
    else if (r == 2) p -= term;
    else q -= term;
    if (last < 1e-17) break;
  }
  const double chi = x - (0.5 * n + 0.25) * kPi;
  return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

double bessel_j(double nu, double x) {
  if (!(x >= 0.0)) throw std::domain_error("bessel_j: x must be >= 0");
  if (nu == 0.5 || nu == -0.5 || nu == 1.5) {
    if (x == 0.0) {
      if (nu == -0.5) return std::numeric_limits<double>::infinity();
      return 0.0;
    }
    const double pre = std::sqrt(2.0 / (kPi * x));
    if (nu == 0.5) return pre * std::sin(x);
    if (nu == -0.5) return pre * std::cos(x);
    if (x < 1e-3) {
      // sin x / x - cos x = x^2/3 - x^4/30 + x^6/840
      const double x2 = x * x;
      return pre * x * (1.0 / 3.0 - x2 / 30.0 + x2 * x2 / 840.0);
    }
    return pre * (std::sin(x) / x - std::cos(x));
  }
  if (nu >= 0.0 && nu == std::floor(nu) && nu < 1000.0)
    return bessel_j_int(static_cast<int>(nu), x);
  throw std::domain_error("bessel_j: unsupported order " + std::to_string(nu));
}

void PointSequence::validate() const {
  if (values.empty()) throw std::invalid_argument("PointSequence: empty");
  double prev = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (!(values[j] > prev))
      throw std::invalid_argument(
          "PointSequence: values must be positive and strictly increasing");
    prev = values[j];
    const double bound = growth_constant *
                         std::pow(values[j], 1.0 + growth_exponent);
    if (double(j + 1) > bound * (1.0 + 1e-9))
      throw std::invalid_argument(
          "PointSequence: counting function exceeds C t^(1+delta) at index " +
          std::to_string(j + 1));
  }
}

void PointSequence::prepare() {
  tail_cache.clear();
  tail_cache = tail_power_sums(8);
  split_index.clear();
  split_sums.clear();
  for (std::size_t i = 64; i < values.size(); i *= 2) split_index.push_back(i);
  std::vector<double> acc(kSplitOrder, 0.0);
  split_sums.assign(split_index.size(), acc);
  std::size_t j = values.size();
  for (std::size_t b = split_index.size(); b-- > 0;) {
    for (; j > split_index[b]; --j) {
      const double r = 1.0 / (values[j - 1] * values[j - 1]);
      double rk = r;
      for (int k = 0; k < kSplitOrder; ++k, rk *= r) acc[k] += rk;
    }
    split_sums[b] = acc;
  }
}

std::vector<double> PointSequence::tail_power_sums(int kmax) const {
  if (int(tail_cache.size()) >= kmax - 1)
    return std::vector<double>(tail_cache.begin(), tail_cache.begin() + kmax - 1);
  std::vector<double> out;
  const double J = double(values.size());
  const double cJ = values.back();
  if (density) {
    const double tstar = cJ + 0.5 / density(cJ);
    for (int k = 2; k <= kmax; ++k) {
      auto f = [this, k](double t) { return density(t) * std::pow(t, -k); };
      out.push_back(integrate(f, tstar, std::numeric_limits<double>::infinity(),
                              1e-12)
                        .value);
    }
    return out;
  }
  const double p = 1.0 + growth_exponent;
  const double c_eff = J / std::pow(cJ, p);
  const double tstar = std::pow((J + 0.5) / c_eff, 1.0 / p);
  for (int k = 2; k <= kmax; ++k)
    out.push_back(p * c_eff * std::pow(tstar, p - k) / (k - p));
  return out;
}

ProductValue canonical_product(const PointSequence& seq, cplx z) {
  if (z == cplx(0.0)) return {1.0, 0.0};
  cplx lg = 0.0;
  for (double c : seq.values) {
    if (z.imag() == 0.0 && z.real() == c) return {0.0, 0.0};
    lg += log1m_plus(z / c);
  }
  // tail: log(1-x)+x = -sum_{k>=2} x^k/k, orders 2..6 kept
  const int kmax = 7;
  const std::vector<double> T = seq.tail_power_sums(kmax);
  cplx zk = z;
  for (int k = 2; k < kmax; ++k) {
    zk *= z;
    lg -= zk * T[k - 2] / double(k);
  }
  const cplx val = std::exp(lg);
  const double err = std::abs(val) * std::abs(zk * z) * T[kmax - 2] / kmax;
  return {val, err};
}

cplx log_even_product(const PointSequence& seq, cplx z) {
  cplx lg = 0.0;
  const cplx z2 = z * z;
  // points beyond 2|z| go through the suffix power series (ratio <= 1/4)
  std::size_t stop = seq.values.size();
  std::size_t b = 0;
  const double az = std::abs(z);
  const bool splits = !seq.split_index.empty() && seq.split_index.back() < seq.values.size();
  while (splits && b < seq.split_index.size() && seq.values[seq.split_index[b]] < 2.0 * az) ++b;
  if (splits && b < seq.split_index.size()) stop = seq.split_index[b];
  for (std::size_t j = 0; j < stop; ++j) {
    const double c = seq.values[j];
    if (z.imag() == 0.0 && std::abs(z.real()) == c)
      return cplx(-std::numeric_limits<double>::infinity(), 0.0);
    lg += log1m(z2 / (c * c));
  }
  if (stop < seq.values.size()) {
    const auto& P = seq.split_sums[b];
    cplx zk = 1.0;
    for (int k = 1; k <= PointSequence::kSplitOrder; ++k) {
      zk *= z2;
      const cplx term = zk * P[k - 1] / double(k);
      lg -= term;
      if (std::abs(term) < 1e-18 * (1.0 + std::abs(lg))) break;
    }
  }
  // log(1 - z^2/c^2) tail = -sum_k z^{2k} / k * sum_j c_j^{-2k}
  const std::vector<double> T = seq.tail_power_sums(8);
  cplx zk = 1.0;
  for (int k = 1; k <= 3; ++k) {
    zk *= z2;
    lg -= zk * T[2 * k - 2] / double(k);
  }
  return lg;
}

ProductValue even_product(const PointSequence& seq, cplx z) {
  const cplx lg = log_even_product(seq, z);
  if (std::isinf(lg.real()) && lg.real() < 0) return {0.0, 0.0};
  const cplx val = std::exp(lg);
  const std::vector<double> T = seq.tail_power_sums(8);
  const double err = std::abs(val) * std::pow(std::abs(z), 8) * T[6] / 4.0;
  return {val, err};
}

}  // namespace satk
