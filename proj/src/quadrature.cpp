#include "satk/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <queue>
#include <stdexcept>

namespace satk {

namespace {

QuadRule compute_gl(int n) {
  QuadRule r;
  r.x.resize(n);
  r.w.resize(n);
  const double pi = 3.14159265358979323846;
  auto legendre = [n](double z, double& p1, double& p2) {
    p1 = 1.0;
    p2 = 0.0;
    for (int j = 1; j <= n; ++j) {
      double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
    }
  };
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double p1, p2;
    for (int it = 0; it < 100; ++it) {
      legendre(z, p1, p2);
      double pp = n * (z * p1 - p2) / (z * z - 1.0);
      double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    legendre(z, p1, p2);
    double pp = n * (z * p1 - p2) / (z * z - 1.0);
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
  return r;
}

struct Segment {
  double a, b, value, err;
  bool operator<(const Segment& o) const { return err < o.err; }
};

// 21-point Kronrod extension of the 10-point Gauss rule.
Segment gk21(const std::function<double(double)>& f, double a, double b) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
  static const auto& xk = GK::abscissa();
  static const auto& wk = GK::weights();
  using G = boost::math::quadrature::gauss<double, 10>;
  static const auto& wg = G::weights();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  // abscissa()[0] = 0; odd entries are the nodes of the embedded Gauss rule.
  double fc = f(c);
  double k = wk[0] * fc, g = 0.0;
  for (std::size_t i = 1; i < xk.size(); ++i) {
    double fp = f(c + h * xk[i]), fm = f(c - h * xk[i]);
    k += wk[i] * (fp + fm);
    if (i % 2 == 1) g += wg[(i - 1) / 2] * (fp + fm);
  }
  Segment s{a, b, k * h, std::abs((k - g) * h)};
  return s;
}

}  // namespace

QuadRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n < 1");
  static std::mutex mu;
  static std::map<int, QuadRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  return cache.emplace(n, compute_gl(n)).first->second;
}

QuadRule gauss_legendre(int n, double a, double b) {
  QuadRule r = gauss_legendre(n);
  const double h = 0.5 * (b - a), c = 0.5 * (b + a);
  for (int i = 0; i < n; ++i) {
    r.x[i] = c + h * r.x[i];
    r.w[i] *= h;
  }
  return r;
}

QuadResult integrate(const std::function<double(double)>& f, double a,
                     double b, double tol, unsigned max_depth,
                     double abs_tol) {
  if (a == b) return {};
  if (a > b) {
    QuadResult r = integrate(f, b, a, tol, max_depth, abs_tol);
    r.value = -r.value;
    return r;
  }
  const bool ainf = std::isinf(a), binf = std::isinf(b);
  std::function<double(double)> g = f;
  double lo = a, hi = b;
  if (ainf && binf) {
    g = [&f](double t) {
      double u = 1.0 - t * t;
      return f(t / u) * (1.0 + t * t) / (u * u);
    };
    lo = -1.0;
    hi = 1.0;
  } else if (binf) {
    g = [&f, a](double t) {
      double u = 1.0 - t;
      return f(a + t / u) / (u * u);
    };
    lo = 0.0;
    hi = 1.0;
  } else if (ainf) {
    g = [&f, b](double t) {
      double u = 1.0 - t;
      return f(b - t / u) / (u * u);
    };
    lo = 0.0;
    hi = 1.0;
  }
  const std::size_t max_segments = std::size_t(1) << std::min(max_depth, 24u);
  std::priority_queue<Segment> heap;
  Segment s0 = gk21(g, lo, hi);
  heap.push(s0);
  double total = s0.value, err = s0.err;
  while (heap.size() < max_segments) {
    if (err <= std::max(tol * std::abs(total), abs_tol)) break;
    Segment s = heap.top();
    heap.pop();
    double m = 0.5 * (s.a + s.b);
    Segment l = gk21(g, s.a, m), r = gk21(g, m, s.b);
    total += l.value + r.value - s.value;
    err += l.err + r.err - s.err;
    heap.push(l);
    heap.push(r);
  }
  // re-sum to shed accumulated rounding from the running updates
  double sum = 0.0, esum = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    esum += heap.top().err;
    heap.pop();
  }
  return {sum, esum};
}

double integrate_panels(const std::function<double(double)>& f, double a,
                        double b, double panel_width, int order) {
  if (!(b > a)) return 0.0;
  const int panels =
      std::max(1, static_cast<int>(std::ceil((b - a) / panel_width)));
  const double h = (b - a) / panels;
  const QuadRule g = gauss_legendre(order);
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * h;
    double s = 0.0;
    for (int i = 0; i < order; ++i) s += g.w[i] * f(c + 0.5 * h * g.x[i]);
    sum += 0.5 * h * s;
  }
  return sum;
}

}  // namespace satk
