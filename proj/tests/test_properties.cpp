// Randomized invariants. Every generator is a fixed-seed mt19937_64.
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "satk/approx.hpp"
#include "satk/contour.hpp"
#include "satk/kernels.hpp"
#include "satk/quadrature.hpp"
#include "satk/specfun.hpp"
#include "satk/variance.hpp"

using namespace satk;

namespace {

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  cplx tau() { return {uniform(-0.5, 0.5), uniform(0.3, 2.0)}; }
};

std::vector<CountingFunction> catalog() {
  return {CountingFunction::power(0.05), CountingFunction::power(0.3), CountingFunction::zeta_counting(),
          CountingFunction::unfolding()};
}

}  // namespace

TEST_CASE("theta: parity and quasi-periodicity at random arguments") {
  Gen g(11);
  const int sign[5] = {0, -1, 1, 1, 1};
  double parity = 0.0, per = 0.0, quasi = 0.0;
  for (int i = 0; i < 100; ++i) {
    const cplx x{g.uniform(-1, 1), g.uniform(-0.3, 0.3)}, t = g.tau();
    for (int k = 1; k <= 4; ++k)
      parity = std::max(parity, std::abs(theta(k, -x, t) - double(sign[k]) * theta(k, x, t)));
    const cplx th = theta(3, x, t);
    per = std::max(per, std::abs(theta(3, x + 1.0, t) - th) / (1 + std::abs(th)));
    const cplx shifted = std::exp(cplx(0, -1) * kPi * t - cplx(0, 2) * kPi * x) * th;
    quasi = std::max(quasi, std::abs(theta(3, x + t, t) - shifted) / (1 + std::abs(shifted)));
  }
  CHECK(parity < 1e-12);
  CHECK(per < 1e-10);
  CHECK(quasi < 1e-10);
  for (cplx t : {cplx(0, 1), cplx(0, 2), cplx(0, 0.5)}) {
    const cplx t2 = theta(2, 0.0, t), t3 = theta(3, 0.0, t), t4 = theta(4, 0.0, t);
    CHECK(std::abs(std::pow(t2, 4) + std::pow(t4, 4) - std::pow(t3, 4)) < 1e-10);
  }
}

TEST_CASE("canonical product changes sign at each stored point") {
  Gen g(12);
  PointSequence seq;
  double c = 0.0;
  for (int j = 0; j < 60; ++j) seq.values.push_back(c += g.uniform(0.4, 1.6));
  seq.growth_exponent = 0.0;
  seq.growth_constant = 2.5;
  seq.prepare();
  int crossings = 0;
  double prev = canonical_product(seq, 0.5 * seq.values[0]).value.real();
  for (std::size_t j = 0; j < seq.values.size(); ++j) {
    const double next = j + 1 < seq.values.size() ? seq.values[j + 1] : seq.values[j] + 0.5;
    const double mid = 0.5 * (seq.values[j] + next);
    const double v = canonical_product(seq, mid).value.real();
    crossings += (v > 0) != (prev > 0);
    prev = v;
  }
  CHECK(crossings == int(seq.values.size()));
}

TEST_CASE("h functions: large-argument expansions at |z| = 50") {
  Gen g(13);
  for (int i = 0; i < 40; ++i) {
    const double phi = g.uniform(-kPi / 2, kPi / 2);
    const cplx z = std::polar(50.0, phi);
    const FG v = fg(z);
    const double r = std::abs(z);
    // next terms are 24/z^5 and -6/z^4
    CHECK(std::abs(v.f - (1.0 / z - 2.0 / (z * z * z))) < 30.0 / std::pow(r, 5));
    CHECK(std::abs(v.g - 1.0 / (z * z)) < 8.0 / std::pow(r, 4));
  }
}

TEST_CASE("kernels: two-point function nonnegative") {
  Gen g(21);
  for (double d : {0.5, 1.0, 5.0}) {
    EquidistantModel m = EquidistantModel::from_d(d);
    const KernelHandle LS = kernel_LS(m);
    m.T = m.S;
    const KernelHandle LSS = kernel_LSS(m);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double x = g.uniform(-4, 4), y = x + g.uniform(-3, 3);
      for (const KernelHandle* K : {&LS, &LSS}) {
        const double rho2 = (*K)(x, x) * (*K)(y, y) - (*K)(x, y) * (*K)(y, x);
        worst = std::min(worst, rho2);
      }
    }
    CHECK(worst >= -1e-10);
  }
}

TEST_CASE("kernels: offset, period and symmetry structure") {
  Gen g(22);
  for (int i = 0; i < 50; ++i) {
    const double d = g.log_uniform(0.3, 10), a = g.uniform(0.5, 2.0), D = g.uniform(0, a);
    EquidistantModel m0 = EquidistantModel::from_d(d, a);
    EquidistantModel m1 = m0;
    m1.Delta = D;
    const double x = g.uniform(-3, 3), y = g.uniform(-3, 3);
    CHECK(kernel_LS(m1)(x, y) == kernel_LS(m0)(x - D, y - D));
    CHECK(std::abs(ls_series(d, x + 1, y + 1) - ls_series(d, x, y)) < 1e-12);
    CHECK(lss_approx(d, x, y) == lss_approx(d, y, x));
  }
}

TEST_CASE("kernels: reproducing property of the half-line variants") {
  const KernelHandle LS = kernel_LS(EquidistantModel::from_d(1.0));
  for (Boundary b : {Boundary::absorbing, Boundary::reflecting}) {
    const KernelHandle K = boundary_combine(LS, b);
    double prev = 1e300;
    for (double X : {10.0, 20.0, 50.0}) {
      double e = 0.0;
      for (auto [x, y] : {std::pair{0.3, 0.7}, std::pair{1.2, 0.4}, std::pair{2.0, 2.0}}) {
        auto f = [&](double z) { return K(x, z) * K(z, y); };
        e = std::max(e, std::abs(integrate_panels(f, 0.0, X, 0.5, 20) - K(x, y)));
      }
      CHECK(e < prev);
      prev = e;
    }
    CHECK(prev < 1e-2);
  }
}

TEST_CASE("contour: independence of the contour placement") {
  Gen g(31);
  for (int N : {3, 5}) {
    const FiniteModel m = FiniteModel::equidistant(N, 1.0, g.uniform(0.4, 1.2), g.uniform(0.5, 1.5));
    for (int i = 0; i < 4; ++i) {
      const double u = g.uniform(-2, 2), v = g.uniform(-2, 2);
      const double base = kernel_finite_ST(m, {}, u, v).value;
      // default abscissa sits half a spacing past the outer point; move it
      // 0.5 further out on either side
      const double edge = (N - 1) / 2.0 + 0.5;
      for (double L : {edge + 1.0, -edge - 1.0}) {
        ContourSpec s;
        s.L_offset = L;
        const double moved = kernel_finite_ST(m, s, u, v).value;
        CHECK(std::abs(moved - base) < 1e-9);
      }
    }
  }
}

TEST_CASE("approx: counting function facts on sampled grids") {
  Gen g(41);
  for (const CountingFunction& cf : catalog()) {
    INFO(cf.name);
    // facts are asserted past the completion knot
    const double t0 = std::max(cf.knot, 1.0);
    for (int i = 0; i < 200; ++i) {
      const double s = g.log_uniform(t0, 1e6), t = g.log_uniform(t0, 1e6);
      CHECK(cf.F_prime(s + t) <= (cf.F_prime(s) + cf.F_prime(t)) * (1 + 1e-12));
      CHECK(t * cf.F_double_prime(t) <= cf.F_prime(t) * (1 + 1e-12));
      const double u = g.log_uniform(1.0, 1e5), w = g.log_uniform(1.0, 1e5);
      CHECK(inverse_F(cf, u + w) <= (inverse_F(cf, u) + inverse_F(cf, w)) * (1 + 1e-12));
    }
    // t F'(t) <= 4 F(t) once F is past its first few units
    for (int i = 0; i < 200; ++i) {
      const double t = g.log_uniform(std::max(t0, inverse_F(cf, 10.0)), 1e6);
      CHECK(t * cf.F_prime(t) <= 4 * cf.F(t));
    }
  }
}

TEST_CASE("approx: spacings, lambda and eta monotone") {
  for (const CountingFunction& cf : catalog()) {
    INFO(cf.name);
    const GeneralConfiguration cfg(cf, 4000);
    long m0 = 1;
    while (cfg.y(m0) < cf.knot) ++m0;
    for (long m = m0; m < 3999; ++m) {
      const double gap = cfg.y(m + 1) - cfg.y(m);
      CHECK(cfg.y(m + 1) > cfg.y(m));
      CHECK(cfg.lambda(m + 1) <= cfg.lambda(m) * (1 + 1e-12));
      CHECK(cfg.eta(m + 1) <= cfg.eta(m) * (1 + 1e-12));
      CHECK(cfg.lambda(m + 1) <= gap * (1 + 1e-12));
      CHECK(gap <= cfg.lambda(m) * (1 + 1e-12));
      const double l = cfg.lambda(m);
      CHECK(std::abs(gap - l) <= l * l * l * cfg.eta(m) * (1 + 1e-9) + 1e-12 * l);
    }
  }
}

TEST_CASE("approx: counting sandwich around y_m") {
  Gen g(42);
  const GeneralConfiguration cfg(CountingFunction::power(0.05), 20000);
  const auto& cf = cfg.source();
  for (int i = 0; i < 30; ++i) {
    const long m = long(g.log_uniform(5, 5000));
    const double ym = cfg.y(m), lm = cfg.lambda(m);
    for (double t : {0.5, 2.0, 10.0, 50.0, 200.0}) {
      long nb = 0, nc = 0;
      for (long j = 1; cfg.y(m + j) - ym <= t; ++j) ++nc;
      for (long j = 1; ym - cfg.y(m - j) <= t; ++j) ++nb;
      CHECK(nb <= nc);
      CHECK(nc <= t / lm + cf.C_growth * std::pow(t, 1 + cf.delta));
    }
  }
}

TEST_CASE("approx: xi increment constant stable in m") {
  const GeneralConfiguration cfg(CountingFunction::power(0.05), 20000);
  const double delta = 0.05;
  std::vector<double> C;
  for (long m : {50L, 100L, 200L, 400L, 800L}) {
    const double dx = std::abs(xi_m(cfg, m).value - xi_m(cfg, m + 1).value);
    const double scale = (std::log(double(m)) + 1) * std::pow(double(m), -(1 - delta) / (1 + delta)) * cfg.lambda(m);
    C.push_back(dx / scale);
  }
  const auto [lo, hi] = std::minmax_element(C.begin(), C.end());
  MESSAGE("fitted increment constants " << C[0] << " .. " << C.back());
  CHECK(*hi < 4 * C[0]);
  CHECK(*lo > 0.0);
}

TEST_CASE("variance: nonnegative reports") {
  Gen g(51);
  for (int i = 0; i < 30; ++i) {
    const double d = g.log_uniform(0.3, 50), L = g.log_uniform(1e-3, 200), R = g.uniform(-2, 2);
    EquidistantModel m = EquidistantModel::from_d(d, g.uniform(0.5, 2));
    for (const VarianceReport& r : {variance_leading_part(m, R, L), variance_averaged(m, L),
                                    variance_sine_closed(m.a, L), variance_Un(32, g.uniform(0, 2 * kPi))})
      CHECK(r.value >= -r.err_estimate);
    m.T = m.S;
    const auto v = variance_Vd(m, L);
    CHECK(v.value >= -v.err_estimate);
  }
}

TEST_CASE("variance: crossover between log growth and the plateau") {
  for (double d : {1.0, 10.0, 100.0}) {
    const auto m = EquidistantModel::from_d(d);
    const double level = saturation_level(m);
    for (int k = 0; k <= 40; ++k) {
      const double L = std::pow(10.0, -1.0 + 7.0 * k / 40);
      const double v = variance_averaged(m, L).value;
      const double ref = std::min(variance_sine_closed(1.0, L).value, level);
      INFO("d = " << d << ", L = " << L);
      CHECK(v >= 0.5 * ref);
      CHECK(v <= 1.5 * ref);
    }
  }
}

TEST_CASE("variance: direct engine covariant under joint offset shifts") {
  Gen g(52);
  for (int i = 0; i < 6; ++i) {
    EquidistantModel m = EquidistantModel::from_d(g.uniform(0.5, 4));
    const double R = g.uniform(-1, 1), L = g.uniform(0.5, 4), D = g.uniform(0, 1);
    const double v0 = variance_direct(kernel_LS_approx(m), R, L, 60.0).value;
    m.Delta = D;
    const double v1 = variance_direct(kernel_LS_approx(m), R + D, L, 60.0).value;
    CHECK(std::abs(v0 - v1) < 1e-8);
  }
}
