#include <cmath>
// the boost pchip header calls isnan unqualified
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <random>
#include <vector>

#include "doctest.h"
#include "satk/approx.hpp"
#include "satk/errors.hpp"
#include "satk/kernels.hpp"
#include "satk/quadrature.hpp"

using namespace satk;

namespace {

// F(x) = x with an explicit lattice, for the stub configurations
CountingFunction linear_stub(double a) {
  CountingFunction cf;
  cf.name = "linear";
  cf.F = [a](double x) { return x / a; };
  cf.F_prime = [a](double) { return 1.0 / a; };
  cf.F_double_prime = [](double) { return 0.0; };
  cf.delta = 0.5;
  cf.C_growth = std::pow(a, -1.5);
  return cf;
}

const GeneralConfiguration& power05() {
  static const GeneralConfiguration cfg(CountingFunction::power(0.05), 20000);
  return cfg;
}

}  // namespace

TEST_CASE("invert_F analytic inverses") {
  const auto sq = CountingFunction::power(1.0);
  for (long j : {1L, 2L, 7L, 100L, 12345L})
    CHECK(invert_F(sq, j) == doctest::Approx(std::sqrt(double(j))).epsilon(1e-14));
  const auto p11 = CountingFunction::power(0.1);
  CHECK(std::abs(invert_F(p11, 1000) - std::pow(1000.0, 1.0 / 1.1)) < 1e-10);
  CHECK_THROWS_AS(invert_F(p11, 0), PreconditionError);
}

TEST_CASE("unfolding F against quadrature and a dense inverse table") {
  const auto cf = CountingFunction::unfolding();
  const double tp = 2.0 * kPi, X = tp * std::exp(1.0);
  CHECK(cf.knot == doctest::Approx(X));
  for (double x : {20.0, 100.0, 1e3, 1e4}) {
    auto f = [tp](double t) { return std::sqrt(std::log(t / tp)); };
    const double ref = 1.0 + integrate(f, X, x, 1e-14).value;
    CHECK(cf.F(x) == doctest::Approx(ref).epsilon(1e-11));
    CHECK(cf.F_prime(x) == doctest::Approx(f(x)).epsilon(1e-14));
  }
  // completion: F(0) = F'(0) = 0, value and slope continuous at the knot
  CHECK(cf.F(0.0) == 0.0);
  CHECK(cf.F_prime(0.0) == 0.0);
  CHECK(cf.F(X * (1 - 1e-12)) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(cf.F_prime(X * (1 - 1e-12)) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(cf.F_double_prime(X * (1 - 1e-12)) == doctest::Approx(cf.F_double_prime(X)).epsilon(1e-9));
  CHECK_NOTHROW(cf.validate(1e7));

  std::vector<double> fx, xs;
  for (double x = 1.0; x <= 400.0; x += 1e-3) {
    xs.push_back(x);
    fx.push_back(cf.F(x));
  }
  boost::math::interpolators::pchip<std::vector<double>> inv(std::move(fx), std::move(xs));
  for (long j = 1; j <= 150; ++j) CHECK(std::abs(invert_F(cf, j) - inv(double(j))) < 1e-7);
}

TEST_CASE("zeta-counting F completion") {
  const auto cf = CountingFunction::zeta_counting();
  const double tp = 2.0 * kPi;
  const double y1 = cf.knot;
  CHECK(y1 / tp * std::log(y1 / tp) - y1 / tp == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(invert_F(cf, 1) == doctest::Approx(y1).epsilon(1e-12));
  CHECK(cf.F(1e5) == doctest::Approx(1e5 / tp * (std::log(1e5 / tp) - 1)).epsilon(1e-14));
  CHECK_NOTHROW(cf.validate(1e8));
}

TEST_CASE("counting function catalog") {
  CHECK(CountingFunction::from_name("power:0.05").delta == doctest::Approx(0.05));
  CHECK(CountingFunction::from_name("unfolding").name == "unfolding");
  CHECK(CountingFunction::from_name("zeta-counting").name == "zeta-counting");
  CHECK_THROWS_AS(CountingFunction::from_name("power:x"), ConfigurationError);
  CHECK_THROWS_AS(CountingFunction::from_name("power:1.5"), ConfigurationError);
  CHECK_THROWS_AS(CountingFunction::from_name("gamma"), ConfigurationError);
}

TEST_CASE("xi vanishes for an equidistant stub") {
  const double a = 0.7;
  std::vector<double> y;
  for (int j = 1; j <= 5000; ++j) y.push_back(a * j);
  GeneralConfiguration cfg(linear_stub(a), y);
  for (long m : {1L, 5L, 40L}) {
    // direct long sum with the reflected terms
    double direct = 0.0;
    for (long j = 1; j <= 1000000; ++j) {
      const double c = a * double(m + j) - a * m;
      const double b = a * m - a * double(m - j);
      direct += 1.0 / c - 1.0 / b;
    }
    const auto xi = xi_m(cfg, m);
    CHECK(std::abs(xi.value - direct) < 1e-9);
    CHECK(std::abs(xi.value) < 1e-9);
  }
}

TEST_CASE("xi nonnegative for convex F") {
  const GeneralConfiguration p1(CountingFunction::power(0.1), 5000);
  const GeneralConfiguration z(CountingFunction::zeta_counting(), 5000);
  for (long m : {1L, 2L, 3L, 10L, 57L, 200L}) {
    CHECK(xi_m(power05(), m).value >= 0.0);
    CHECK(xi_m(p1, m).value >= 0.0);
    CHECK(xi_m(z, m).value >= 0.0);
  }
}

TEST_CASE("xi tail stability for x^1.1 at m = 100") {
  const GeneralConfiguration cfg(CountingFunction::power(0.1), 2000);
  const auto x4 = xi_m(cfg, 100, 10000);
  const auto x5 = xi_m(cfg, 100, 100000);
  CHECK(std::abs(x4.value - x5.value) < 5e-4 * std::abs(x5.value));
  // doubling stays inside the reported estimate
  const auto x2 = xi_m(cfg, 100, 20000);
  CHECK(std::abs(x2.value - x4.value) <= x4.err);
  CHECK_THROWS_AS(xi_m(cfg, 0), PreconditionError);
}

TEST_CASE("coincident points are rejected") {
  CHECK_THROWS_AS(GeneralConfiguration(linear_stub(1.0), std::vector<double>{1.0, 2.0, 2.0, 3.0}),
                  std::invalid_argument);
}

TEST_CASE("locate on a linear zeta stub") {
  const double a = 0.8, S = 1.3, xibar = 0.37;
  auto zeta = [&](long m) { return a * m - S * xibar; };
  auto lam = [&](long) { return a; };
  for (double alpha : {3.1, 10.0, 55.55, 123.4}) {
    const auto loc = locate_index(zeta, lam, alpha, 1000);
    CHECK(loc.m == std::lround((alpha + S * xibar) / a));
  }
  // tie: alpha exactly between two zeta values goes to the smaller m
  const auto tie = locate_index(zeta, lam, a * 10.5 - S * xibar, 1000);
  CHECK(tie.m == 10);
  CHECK_THROWS_AS(locate_index(zeta, lam, 5000.0, 1000), PreconditionError);
}

TEST_CASE("locate_m against an exhaustive scan") {
  const GeneralConfiguration cfg(CountingFunction::power(0.1), 5000);
  const double alpha = 50.0, S = 1.0;
  const auto loc = locate_m(cfg, alpha, S);
  long best = 1;
  double bd = INFINITY;
  for (long m = 1; m <= long(2 * cfg.source().F(alpha)); ++m) {
    const double d = std::abs(cfg.zeta(m, S) - alpha);
    if (d < bd) bd = d, best = m;
  }
  CHECK(loc.m == best);
  CHECK(std::abs(loc.zeta - alpha) <= loc.lambda);
  CHECK(loc.lambda == doctest::Approx(cfg.lambda(best)));
}

TEST_CASE("m(alpha) ~ F(alpha) and lambda asymptotics") {
  const auto loc = locate_m(power05(), 200.0, 1.0);
  CHECK(std::abs(loc.m / power05().source().F(200.0) - 1.0) < 0.10);
  const GeneralConfiguration p1(CountingFunction::power(0.1), 5000);
  const auto s = surrogate_model(p1, 100.0, 1.0);
  const double asym = 1.0 / (1.1 * std::pow(100.0, 0.1 / 1.1));
  CHECK(std::abs(s.model.a / asym - 1.0) < 0.05);
  CHECK(s.model.Delta == 0.0);
  CHECK(s.model.boundary == Boundary::absorbing);
  CHECK(s.S_min == doctest::Approx(s.at.lambda));
  CHECK(s.S_admissible);
}

TEST_CASE("zeta-counting height parameters") {
  const auto cf = CountingFunction::zeta_counting();
  const double tp = 2.0 * kPi;
  // located lambda agrees with 1/F'(alpha) at a moderate height
  const GeneralConfiguration z(cf, 4000);
  const auto loc = locate_m(z, 2000.0, 1.0);
  CHECK(loc.lambda * std::log(2000.0 / tp) / tp == doctest::Approx(1.0).epsilon(0.02));
  CHECK(2 * kPi * 2000.0 * loc.eta == doctest::Approx(1.0).epsilon(0.02));
  // d(alpha) = 2 pi / lambda^2 and the doubled log log level at 1e6
  const double alpha = 1e6;
  const double lam = 1.0 / cf.F_prime(alpha);
  const double d = 2 * kPi / (lam * lam);
  CHECK(d * lam * lam == doctest::Approx(2 * kPi).epsilon(1e-15));
  const double ratio = std::log(2 * kPi * d) / std::log(std::log(alpha / tp));
  CHECK(std::abs(ratio / 2.0 - 1.0) < 0.15);
}

TEST_CASE("comparison decreases with height") {
  std::vector<double> prev;
  double last = INFINITY;
  for (double alpha : {50.0, 100.0, 200.0}) {
    std::vector<std::pair<double, double>> grid;
    for (double du : {-1.5, 0.0, 1.5})
      for (double dv : {-1.5, 0.0, 1.5}) grid.push_back({alpha + du, alpha + dv});
    const auto rep = compare_at_height(power05(), alpha, 1.0, 2.0, grid);
    CHECK(rep.T0 >= 2.0);
    CHECK(rep.lhs.size() == grid.size());
    CHECK(rep.max_lhs < last);
    CHECK(rep.bound_shape > 0.0);
    last = rep.max_lhs;
  }
}

TEST_CASE("comparison preconditions and fitted constant") {
  const double alpha = 50.0;
  const std::vector<std::pair<double, double>> g{{alpha, alpha + 0.5}};
  const auto r = compare_at_height(power05(), alpha, 1.0, 1.0, g);
  CHECK_THROWS_AS(compare_at_height(power05(), alpha, 1.0, r.T0 * 1.01, g), PreconditionError);
  CHECK_THROWS_AS(compare_at_height(power05(), alpha, 1.0, 0.3, g), PreconditionError);
  const double C = fit_bound_constant({r});
  CHECK(C * r.bound_shape == doctest::Approx(r.max_lhs));
  CHECK_THROWS_AS(locate_m(power05(), -1.0, 1.0), PreconditionError);
}

TEST_CASE("gauge factor cancels in 2x2 determinants") {
  const double alpha = 50.0, S = 1.0;
  const auto loc = locate_m(power05(), alpha, S);
  const auto& seq = power05().sequence();
  std::mt19937_64 rng(314);
  std::uniform_real_distribution<double> U(alpha - 1.5, alpha + 1.5);
  for (int t = 0; t < 3; ++t) {
    const double u1 = U(rng), u2 = U(rng);
    auto K = [&](double u, double v) { return kernel_infinite_absorbing(seq, S, {}, u, v).value; };
    auto G = [&](double u, double v) { return std::exp(-loc.xi * (u - v)) * K(u, v); };
    const double d0 = K(u1, u1) * K(u2, u2) - K(u1, u2) * K(u2, u1);
    const double d1 = G(u1, u1) * G(u2, u2) - G(u1, u2) * G(u2, u1);
    CHECK(std::abs(d0 - d1) < 1e-12 * std::max(1.0, std::abs(d0)));
  }
}

TEST_CASE("local sine limit at alpha = 200") {
  std::vector<double> pts;
  for (double x = -2.0; x <= 2.0001; x += 0.5) pts.push_back(x);
  CHECK(local_sine_distance(power05(), 200.0, 1.0, pts) < 0.05);
}

TEST_CASE("unfolded model") {
  CHECK_THROWS_AS(unfolded_model(10.0), PreconditionError);
  const auto um = unfolded_model(1e4);
  CHECK(um.d * um.lambda * um.lambda == doctest::Approx(2 * kPi).epsilon(1e-15));
  for (double x = 1e4 - 2.0; x <= 1e4 + 2.0; x += 0.25) {
    CHECK(std::abs(um.rescaled.evaluate(x, x) - 1.0) < 0.02);
    CHECK(std::abs(um.local.evaluate(x, x) - 1.0) < 0.02);
  }
  double prev = 0.0;
  for (double h : {20.0, 100.0, 1e3, 1e4, 1e5, 1e6}) {
    const double d = unfolded_model(h).d;
    CHECK(d > prev);
    prev = d;
  }
}
