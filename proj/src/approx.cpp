#include "satk/approx.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "satk/errors.hpp"
#include "satk/quadrature.hpp"

namespace satk {

namespace {

// C^2 completion on [0, X] of a function with F(X) = f0, F'(X) = f1,
// F''(X) = f2: F'' = f2 (x/X)^4 + B sin^2 bump on [X - 2w, X]. Gives
// F(0) = F'(0) = 0 and F' > 0, but F'' is not monotone there.
struct Completion {
  double X, f2, B, w, x0;
  static constexpr double r = 4.0;

  Completion(double X_, double f0, double f1, double f2_) : X(X_), f2(f2_) {
    const double mh = f2 * X / (r + 1.0);
    const double muh = f2 * X * X / ((r + 1.0) * (r + 2.0));
    w = (f0 - muh) / (f1 - mh);
    B = (f1 - mh) / w;
    x0 = X - 2.0 * w;
    if (!(w > 0.0) || !(B > 0.0) || !(x0 > 0.0))
      throw ConfigurationError("small-x completion has no admissible bump");
  }
  double F(double x) const {
    const double t = x / X;
    double v = f2 * X * X * std::pow(t, r + 2.0) / ((r + 1.0) * (r + 2.0));
    if (x > x0) {
      const double s = x - x0;
      v += B * (s * s / 4.0 - w * w / (2.0 * kPi * kPi) * (1.0 - std::cos(kPi * s / w)));
    }
    return v;
  }
  double Fp(double x) const {
    const double t = x / X;
    double v = f2 * X * std::pow(t, r + 1.0) / (r + 1.0);
    if (x > x0) {
      const double s = x - x0;
      v += B * (s / 2.0 - w / (2.0 * kPi) * std::sin(kPi * s / w));
    }
    return v;
  }
  double Fpp(double x) const {
    double v = f2 * std::pow(x / X, r);
    if (x > x0) {
      const double sn = std::sin(kPi * (x - x0) / (2.0 * w));
      v += B * sn * sn;
    }
    return v;
  }
};

// sup of F(x)/x^(1+delta) on a geometric grid, padded
double growth_constant(const CountingFunction& cf) {
  double c = 0.0;
  for (double lx = -3.0; lx <= 14.0; lx += 0.01) {
    const double x = std::pow(10.0, lx);
    c = std::max(c, cf.F(x) / std::pow(x, 1.0 + cf.delta));
  }
  return 1.001 * c;
}

// sqrt(s) e^s - (sqrt(pi)/2) erfi(sqrt(s)), an antiderivative of sqrt(s) e^s
double sqrt_exp_antideriv(double s) {
  const double r = std::sqrt(s), r2 = s;
  double term = r, sum = r;  // n = 0 of sum r^(2n+1) / (n! (2n+1))
  double pw = r;
  for (int n = 1; n < 400; ++n) {
    pw *= r2 / n;
    term = pw / (2.0 * n + 1.0);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return r * std::exp(s) - sum;
}

double sinc_pi(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - kPi * kPi * x * x / 6.0;
  return std::sin(kPi * x) / (kPi * x);
}

}  // namespace

void CountingFunction::validate(double x_max) const {
  if (!(delta > 0.0 && delta <= 1.0))
    throw ConfigurationError(name + ": growth exponent must lie in (0, 1)");
  if (std::abs(F_prime(0.0)) > 0.0 || std::abs(F(0.0)) > 0.0)
    throw ConfigurationError(name + ": need F(0) = F'(0) = 0");
  double prev_pp = INFINITY;
  for (double lx = -3.0; std::pow(10.0, lx) <= x_max; lx += 0.005) {
    const double x = std::pow(10.0, lx);
    if (F(x) > C_growth * std::pow(x, 1.0 + delta) * (1.0 + 1e-9))
      throw ConfigurationError(name + ": F exceeds C x^(1+delta) at x = " + std::to_string(x));
    if (!(F_prime(x) > 0.0))
      throw ConfigurationError(name + ": F' not positive at x = " + std::to_string(x));
    if (x >= knot) {
      const double pp = F_double_prime(x);
      if (pp > prev_pp * (1.0 + 1e-12))
        throw ConfigurationError(name + ": F'' increases at x = " + std::to_string(x));
      prev_pp = pp;
    }
  }
}

CountingFunction CountingFunction::power(double delta) {
  if (!(delta > 0.0 && delta <= 1.0))
    throw ConfigurationError("power: delta must lie in (0, 1]");
  CountingFunction cf;
  cf.name = "power:" + std::to_string(delta);
  const double p = 1.0 + delta;
  cf.F = [p](double x) { return std::pow(x, p); };
  cf.F_prime = [p](double x) { return x == 0.0 ? 0.0 : p * std::pow(x, p - 1.0); };
  cf.F_double_prime = [p](double x) { return p * (p - 1.0) * std::pow(x, p - 2.0); };
  cf.delta = delta;
  cf.C_growth = 1.0;
  return cf;
}

CountingFunction CountingFunction::zeta_counting() {
  const double tp = 2.0 * kPi;
  auto G = [tp](double x) { return x / tp * std::log(x / tp) - x / tp; };
  // y_1: G(y_1) = 1; the completion joins there
  const double X = boost::math::tools::bisect(
                       [&](double x) { return G(x) - 1.0; }, tp * std::exp(1.0), 100.0,
                       boost::math::tools::eps_tolerance<double>(60))
                       .first;
  const Completion c(X, 1.0, std::log(X / tp) / tp, 1.0 / (tp * X));
  CountingFunction cf;
  cf.name = "zeta-counting";
  cf.F = [G, c, X](double x) { return x >= X ? G(x) : c.F(x); };
  cf.F_prime = [c, X, tp](double x) { return x >= X ? std::log(x / tp) / tp : c.Fp(x); };
  cf.F_double_prime = [c, X, tp](double x) { return x >= X ? 1.0 / (tp * x) : c.Fpp(x); };
  cf.delta = 0.1;
  cf.knot = X;
  cf.C_growth = growth_constant(cf);
  return cf;
}

CountingFunction CountingFunction::unfolding() {
  const double tp = 2.0 * kPi, X = tp * std::exp(1.0);
  const double E1 = sqrt_exp_antideriv(1.0);
  // F = 1 + 2 pi [E(s) - E(1)], s = log(x / 2 pi)
  auto G = [tp, E1](double x) { return 1.0 + tp * (sqrt_exp_antideriv(std::log(x / tp)) - E1); };
  const Completion c(X, 1.0, 1.0, 0.5 / X);
  CountingFunction cf;
  cf.name = "unfolding";
  cf.F = [G, c, X](double x) { return x >= X ? G(x) : c.F(x); };
  cf.F_prime = [c, X, tp](double x) { return x >= X ? std::sqrt(std::log(x / tp)) : c.Fp(x); };
  cf.F_double_prime = [c, X, tp](double x) {
    return x >= X ? 0.5 / (x * std::sqrt(std::log(x / tp))) : c.Fpp(x);
  };
  cf.delta = 0.1;
  cf.knot = X;
  cf.C_growth = growth_constant(cf);
  return cf;
}

CountingFunction CountingFunction::from_name(const std::string& name) {
  if (name == "zeta-counting") return zeta_counting();
  if (name == "unfolding") return unfolding();
  if (name.rfind("power:", 0) == 0) {
    std::size_t used = 0;
    double d = 0.0;
    try {
      d = std::stod(name.substr(6), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != name.size() - 6)
      throw ConfigurationError("bad counting function '" + name + "'");
    return power(d);
  }
  throw ConfigurationError("unknown counting function '" + name + "'");
}

double inverse_F(const CountingFunction& cf, double value) {
  if (!(value > 0.0)) throw PreconditionError("inverse_F: value must be positive");
  // F(x) <= C x^(1+delta) puts the root above x0; the upper end is grown
  // because the growth bound says nothing about it
  const double x0 = std::pow(value / cf.C_growth, 1.0 / (1.0 + cf.delta));
  auto f = [&](double x) { return cf.F(x) - value; };
  double lo = 0.5 * x0, hi = 10.0 * x0;
  for (int k = 0; k < 60 && f(hi) < 0.0; ++k) lo = hi, hi *= 2.0;
  if (f(lo) > 0.0 || f(hi) < 0.0)
    throw ConfigurationError("inverse_F: no bracket for F(y) = " + std::to_string(value));
  std::uintmax_t iters = 200;
  auto r = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
  double y = 0.5 * (r.first + r.second);
  for (int k = 0; k < 2; ++k) {
    const double fp = cf.F_prime(y);
    if (fp > 0.0) y -= f(y) / fp;
  }
  if (std::abs(f(y)) > 1e-12 * std::max(1.0, value))
    throw ConfigurationError("inverse_F: residual too large at " + std::to_string(value));
  return y;
}

double invert_F(const CountingFunction& cf, long j) {
  if (j < 1) throw PreconditionError("invert_F: j must be >= 1");
  return inverse_F(cf, double(j));
}

GeneralConfiguration::GeneralConfiguration(CountingFunction cf, long prefix_len)
    : cf_(std::move(cf)) {
  if (prefix_len < 2) throw ConfigurationError("configuration prefix too short");
  y_.reserve(prefix_len);
  for (long j = 1; j <= prefix_len; ++j) y_.push_back(invert_F(cf_, j));
  seq_.values = y_;
  seq_.growth_exponent = cf_.delta;
  seq_.growth_constant = cf_.C_growth;
  seq_.density = cf_.F_prime;
  seq_.prepare();
}

GeneralConfiguration::GeneralConfiguration(CountingFunction cf, std::vector<double> prefix)
    : cf_(std::move(cf)), y_(std::move(prefix)) {
  if (y_.size() < 2) throw ConfigurationError("configuration prefix too short");
  seq_.values = y_;
  seq_.growth_exponent = cf_.delta;
  seq_.growth_constant = cf_.C_growth;
  seq_.density = cf_.F_prime;
  seq_.validate();
  seq_.prepare();
}

double GeneralConfiguration::y(long j) const {
  if (j == 0) return 0.0;
  if (j < 0) return -y(-j);
  if (j <= prefix_len()) return y_[j - 1];
  return invert_F(cf_, j);
}

double GeneralConfiguration::zeta(long m, double S, long tail_len) const {
  return y(m) - xi_m(*this, m, tail_len).value * S;
}

XiValue xi_m(const GeneralConfiguration& config, long m, long tail_len) {
  if (m < 1) throw PreconditionError("xi_m: m must be >= 1");
  const long J = std::max(tail_len > 0 ? tail_len : std::max(2000L, 4 * m), 2 * (m + 1));
  const double ym = config.y(m);
  const auto& F = config.source();

  auto tail = [&](long K) {
    const double tc = inverse_F(F, double(m + K) + 0.5);
    const double tb = inverse_F(F, double(K - m) + 0.5);
    auto fc = [&](double t) { return F.F_prime(t) * 2.0 * ym / ((t - ym) * (t + ym)); };
    auto fb = [&](double t) { return F.F_prime(t) / (t + ym); };
    return integrate(fc, tc, std::numeric_limits<double>::infinity(), 1e-12).value -
           integrate(fb, tb, tc, 1e-12).value;
  };

  double partial = 0.0, half_total = 0.0;
  const long J2 = J / 2;
  for (long j = 1; j <= J; ++j) {
    const double c = config.y(m + j) - ym, b = ym - config.y(m - j);
    const double term = 1.0 / c - 1.0 / b;
    if (!std::isfinite(term) || !(c > 0.0) || !(b > 0.0))
      throw ConfigurationError("xi_m: coincident points at j = " + std::to_string(j));
    partial += term;
    if (j == J2) half_total = partial + tail(J2);
  }
  XiValue out;
  out.value = partial + tail(J);
  out.err = 2.0 * std::abs(out.value - half_total) + 1e-15 * std::abs(partial);
  return out;
}

Location locate_index(const std::function<double(long)>& zeta,
                      const std::function<double(long)>& lambda, double alpha,
                      long m_max) {
  if (m_max < 1) throw PreconditionError("locate: empty index range");
  std::map<long, double> memo;
  auto z = [&](long m) {
    auto it = memo.find(m);
    if (it != memo.end()) return it->second;
    return memo[m] = zeta(m);
  };
  // last m with zeta_m <= alpha, assuming monotone
  long lo = 1, hi = m_max;
  if (z(1) > alpha) {
    hi = 1;
  } else {
    while (hi - lo > 1) {
      const long mid = lo + (hi - lo) / 2;
      (z(mid) <= alpha ? lo : hi) = mid;
    }
    if (z(hi) > alpha) hi = lo;
  }
  long best = hi;
  for (long m = std::max(1L, hi - 3); m <= std::min(m_max, hi + 3); ++m)
    if (std::abs(z(m) - alpha) < std::abs(z(best) - alpha) ||
        (std::abs(z(m) - alpha) == std::abs(z(best) - alpha) && m < best))
      best = m;
  if (best > 1 && best < m_max && !(z(best - 1) < z(best) && z(best) < z(best + 1)))
    throw PreconditionError("locate: zeta not increasing near m = " + std::to_string(best));
  Location loc;
  loc.m = best;
  loc.zeta = z(best);
  loc.lambda = lambda(best);
  if (std::abs(loc.zeta - alpha) > loc.lambda)
    throw PreconditionError("locate: nearest m = " + std::to_string(best) +
                            " has |zeta - alpha| = " + std::to_string(std::abs(loc.zeta - alpha)) +
                            " > lambda = " + std::to_string(loc.lambda) + "; alpha too small");
  return loc;
}

Location locate_m(const GeneralConfiguration& config, double alpha, double S) {
  if (!(alpha > 0.0) || !(S > 0.0)) throw PreconditionError("locate_m: alpha, S must be positive");
  std::map<long, double> xis;
  auto xi = [&](long m) {
    auto it = xis.find(m);
    if (it != xis.end()) return it->second;
    return xis[m] = xi_m(config, m).value;
  };
  const long m_max = long(2.0 * config.source().F(alpha)) + 10;
  Location loc = locate_index([&](long m) { return config.y(m) - xi(m) * S; },
                              [&](long m) { return config.lambda(m); }, alpha, m_max);
  loc.eta = config.eta(loc.m);
  loc.xi = xi(loc.m);
  return loc;
}

Surrogate surrogate_model(const GeneralConfiguration& config, double alpha, double S) {
  Surrogate s;
  s.at = locate_m(config, alpha, S);
  s.S = S;
  s.model.a = s.at.lambda;
  s.model.S = S;
  s.model.Delta = 0.0;
  s.model.boundary = Boundary::absorbing;
  s.S_min = s.at.lambda;
  s.S_admissible = S >= s.S_min && S <= 1.0;
  const auto& F = config.source();
  s.S_min_literal = F.F_prime(F.F(alpha));
  s.S_admissible_literal = S >= s.S_min_literal && S <= 1.0;
  return s;
}

ComparisonReport compare_at_height(const GeneralConfiguration& config, double alpha,
                                   double S, double T,
                                   const std::vector<std::pair<double, double>>& grid,
                                   Comparator cmp, const ContourSpec& spec,
                                   double epsilon) {
  ComparisonReport rep;
  rep.surrogate = surrogate_model(config, alpha, S);
  const Location& at = rep.surrogate.at;
  const double delta = config.source().delta;
  rep.comparator = cmp;
  rep.T = T;
  rep.T0 = std::min(1.0 / (4.0 * std::sqrt(at.eta)),
                    std::pow(double(at.m), (1 + delta) * (1 + delta) / (2.0 * (1 - delta))));
  if (!(T > 0.0) || T > rep.T0)
    throw PreconditionError("compare_at_height: T = " + std::to_string(T) +
                            " outside (0, T0 = " + std::to_string(rep.T0) + "]");
  for (const auto& [u, v] : grid)
    if (std::abs(u - alpha) > T || std::abs(v - alpha) > T)
      throw PreconditionError("compare_at_height: grid point outside the window");

  EquidistantModel free_m = rep.surrogate.model;
  free_m.boundary = Boundary::free;
  KernelHandle ref = kernel_LS(free_m);
  if (cmp == Comparator::absorbing) ref = boundary_combine(ref, Boundary::absorbing);

  rep.grid = grid;
  for (const auto& [u, v] : grid) {
    const double k = kernel_infinite_absorbing(config.sequence(), S, spec, u, v).value;
    const double l = std::abs(std::exp(-at.xi * (u - v)) * k - ref(u - at.zeta, v - at.zeta));
    rep.lhs.push_back(l);
    rep.max_lhs = std::max(rep.max_lhs, l);
  }
  const double lam = at.lambda;
  rep.epsilon = epsilon;
  rep.R2 = std::max({std::pow(S / lam, 2.0 / (1.0 - epsilon)),
                     std::pow(T, 1.0 + delta + epsilon) * S,
                     std::pow(T, 1.0 + epsilon) * S / lam});
  rep.bound_shape = lam * std::pow(S, -1.5) * std::exp(-rep.R2 / (8.0 * S)) +
                    (T * T + rep.R2) *
                        std::pow(double(at.m), -(1 - delta) * (1 - delta) / (1 + delta)) / S;
  return rep;
}

double fit_bound_constant(const std::vector<ComparisonReport>& reports) {
  double num = 0.0, den = 0.0;
  for (const auto& r : reports) {
    num += r.max_lhs * r.bound_shape;
    den += r.bound_shape * r.bound_shape;
  }
  if (!(den > 0.0)) throw PreconditionError("fit_bound_constant: no reports");
  return num / den;
}

double local_sine_distance(const GeneralConfiguration& config, double alpha, double S,
                           const std::vector<double>& points, const ContourSpec& spec) {
  const Location at = locate_m(config, alpha, S);
  const double lam = at.lambda;
  double sup = 0.0;
  for (double x : points)
    for (double y : points) {
      const double k =
          kernel_infinite_absorbing(config.sequence(), S, spec, alpha + lam * x, alpha + lam * y).value;
      const double val = lam * std::exp(-at.xi * lam * (x - y)) * k;
      sup = std::max(sup, std::abs(val - sinc_pi(x - y)));
    }
  return sup;
}

UnfoldedModel unfolded_model(double alpha) {
  const double floor_h = 2.0 * kPi * std::exp(1.0);
  if (!(alpha >= floor_h))
    throw PreconditionError("unfolded_model: height must be at least 2 pi e");
  static const CountingFunction cf = CountingFunction::unfolding();
  UnfoldedModel um;
  um.height = alpha;
  um.lambda = 1.0 / cf.F_prime(alpha);
  um.d = 2.0 * kPi / (um.lambda * um.lambda);
  const double p = inverse_F(cf, alpha);
  um.lambda_origin = 1.0 / cf.F_prime(p);

  const double d = um.d;
  um.local.evaluate = [d, alpha](double x, double y) { return ls_approx(d, x - alpha, y - alpha); };
  um.local.representation = Representation::approximate;

  EquidistantModel m;
  m.a = um.lambda_origin;
  m.S = 1.0;
  KernelHandle base = kernel_LS(m);
  auto f = base.evaluate;
  KernelHandle shifted;
  shifted.evaluate = [f, p](double u, double v) { return f(u - p, v - p); };
  shifted.lo = 0.0;
  auto G = [](double x) { return inverse_F(cf, x); };
  auto Gp = [](double x) { return 1.0 / cf.F_prime(inverse_F(cf, x)); };
  um.rescaled = rescale(shifted, G, Gp);
  um.rescaled.lo = 0.0;
  return um;
}

}  // namespace satk
